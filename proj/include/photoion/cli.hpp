// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/cli.hpp
//! Command-line front end: predict, kinetics, fit, analyze, sweep and
//! deviations subcommands.
//---------------------------------------------------------------------------//
#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "analysis.hpp"
#include "cloud.hpp"
#include "dataio.hpp"
#include "error.hpp"
#include "kinetics.hpp"
#include "models.hpp"
#include "units.hpp"

namespace photoion::cli
{
inline constexpr char const* output_dir_env = "PHOTOION_OUTPUT_DIR";

inline std::string help_footer()
{
    std::ostringstream os;
    os << "\nUnits (append to the number, e.g. 1e12W_per_cm2, 1.06um, "
          "15.76eV):\n ";
    for (auto const& row : detail::unit_table)
    {
        if (row.unit != Unit::none)
            os << ' ' << row.tag;
    }
    os << "\n  Speeds are m/s, angles rad, sigma m^2, volume m^3 (bare "
          "numbers).\n"
       << "\nExit codes:\n"
       << "  0  success\n"
       << "  1  validation error (bad flag, unit, config or input data)\n"
       << "  2  computation error (non-convergence, perturbation "
          "breakdown)\n"
       << "  3  I/O error\n"
       << "\nEnvironment:\n  " << output_dir_env
       << "  directory for default output files (otherwise stdout)\n";
    return os.str();
}

namespace detail
{
//---------------------------------------------------------------------------//
// OUTPUT TARGETS
//---------------------------------------------------------------------------//
/*!
 * Where a subcommand's primary artifact goes: an explicit path, "-" for
 * stdout, or <PHOTOION_OUTPUT_DIR>/<default_name> when the environment
 * variable is set and no path was given.
 */
inline std::string resolve_output(std::string const& flag,
                                  std::string const& config_value,
                                  std::string const& default_name)
{
    if (!flag.empty())
        return flag;
    if (!config_value.empty())
        return config_value;
    if (char const* dir = std::getenv(output_dir_env); dir && *dir)
        return (std::filesystem::path(dir) / default_name).string();
    return "-";
}

inline void emit(std::string const& target,
                 std::string const& text,
                 std::ostream& out)
{
    if (target == "-")
    {
        out << text;
        out.flush();
        return;
    }
    write_text_file(target, text);
}

inline std::string format_g(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

//---------------------------------------------------------------------------//
// FLAG PARSING
//---------------------------------------------------------------------------//
inline double flag_quantity(std::string const& name,
                            std::string const& text,
                            Dimension dim)
{
    try
    {
        return parse_si(text, dim);
    }
    catch (ParseError const& e)
    {
        throw ParseError("--" + name + ": " + e.what());
    }
}

inline double flag_number(std::string const& name, std::string const& text)
{
    try
    {
        auto q = parse_quantity(text, true);
        if (q.unit() != Unit::none)
            throw ParseError("expected a bare number");
        return q.value();
    }
    catch (Error const& e)
    {
        throw ParseError("--" + name + ": " + e.what());
    }
}

//! Number with or without a unit suffix, returned in SI.
inline double flag_any(std::string const& name, std::string const& text)
{
    try
    {
        return parse_quantity(text, true).si();
    }
    catch (Error const& e)
    {
        throw ParseError("--" + name + ": " + e.what());
    }
}

inline int flag_int(std::string const& name, std::string const& text)
{
    double v = flag_number(name, text);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ParseError("--" + name + ": expected an integer");
    return static_cast<int>(v);
}

//! Split "a:b:c" into at most three pieces.
inline std::vector<std::string> split_colon(std::string const& s)
{
    std::vector<std::string> parts;
    std::string part;
    std::istringstream is(s);
    while (std::getline(is, part, ':'))
        parts.push_back(part);
    return parts;
}

/*!
 * Physics flags shared by predict and sweep. Every string is empty unless
 * given on the command line; resolve() lays them over a RunConfig.
 */
struct PhysicsFlags
{
    std::string config_path;
    std::string model, wavelength, intensity, duration, shape, time;
    std::string v0, v_free, sigma, theta, phi, volume, solid_angle;
    std::string work, na0, z, atom_radius;
    std::string order, ati, beta_nu, ref_intensity;
    std::string work0, work_slope, electron_density, metal_gamma;

    void add_to(CLI::App& app)
    {
        app.add_option("--config", config_path, "JSON run configuration");
        app.add_option("--model", model, "multiphoton | effective | anomalous");
        app.add_option("--wavelength", wavelength, "laser wavelength [length]");
        app.add_option("--intensity", intensity, "peak intensity [intensity]");
        app.add_option("--duration", duration, "pulse duration [time]");
        app.add_option("--shape", shape, "triangular | rectangular");
        app.add_option("--time", time, "evaluation time on the ramp [time]");
        app.add_option("--v0", v0, "cloud electron speed [m/s]");
        app.add_option("--v-free", v_free, "free-electron speed [m/s]");
        app.add_option("--sigma", sigma, "capture cross section [m^2]");
        app.add_option("--theta", theta, "emission polar angle [rad]");
        app.add_option("--phi", phi, "emission azimuth [rad]");
        app.add_option("--volume", volume, "normalizing volume [m^3]");
        app.add_option("--solid-angle", solid_angle, "solid-angle element [sr]");
        app.add_option("--work", work, "gas ionization potential [energy]");
        app.add_option("--na0", na0, "gas atom density [number-density]");
        app.add_option("--z", z, "nuclear charge");
        app.add_option("--atom-radius", atom_radius, "atom radius [length]");
        app.add_option("--order", order, "multiphoton order N");
        app.add_option("--ati", ati, "above-threshold photons S");
        app.add_option("--beta-nu", beta_nu, "effective-photon beta");
        app.add_option("--ref-intensity", ref_intensity,
                       "effective-photon reference intensity [intensity]");
        app.add_option("--work0", work0, "metal work function [energy]");
        app.add_option("--work-slope", work_slope,
                       "work-function slope dW/dI [J m^2/W]");
        app.add_option("--electron-density", electron_density,
                       "metal electron density [number-density]");
        app.add_option("--metal-gamma", metal_gamma,
                       "correlation exponent gamma");
    }

    RunConfig resolve() const
    {
        RunConfig c;
        if (!config_path.empty())
            c = parse_config(config_path);
        if (!model.empty())
            c.model = parse_model(model);
        if (!wavelength.empty())
            c.laser.light_wavelength
                = flag_quantity("wavelength", wavelength, Dimension::length);
        if (!intensity.empty())
            c.laser.peak_intensity
                = flag_quantity("intensity", intensity, Dimension::intensity);
        if (!duration.empty())
            c.laser.duration_dt
                = flag_quantity("duration", duration, Dimension::time);
        if (!shape.empty())
        {
            if (shape == "triangular")
                c.laser.shape = PulseShape::triangular;
            else if (shape == "rectangular")
                c.laser.shape = PulseShape::rectangular;
            else
                throw ParseError("--shape: unknown pulse shape '" + shape + "'");
        }
        if (!time.empty())
            c.time = flag_quantity("time", time, Dimension::time);
        if (!v0.empty())
            c.v0 = flag_number("v0", v0);
        if (!v_free.empty())
            c.v_free = flag_number("v-free", v_free);
        if (!sigma.empty())
            c.sigma = flag_number("sigma", sigma);
        if (!theta.empty())
            c.theta = flag_number("theta", theta);
        if (!phi.empty())
            c.phi = flag_number("phi", phi);
        if (!volume.empty())
            c.volume = flag_number("volume", volume);
        if (!solid_angle.empty())
            c.solid_angle = flag_number("solid-angle", solid_angle);
        if (!work.empty())
            c.gas.ionization_potential_W
                = flag_quantity("work", work, Dimension::energy);
        if (!na0.empty())
            c.gas.atom_density_Na0
                = flag_quantity("na0", na0, Dimension::number_density);
        if (!z.empty())
            c.gas.nuclear_charge_Z = flag_int("z", z);
        if (!atom_radius.empty())
            c.gas.atom_radius_r
                = flag_quantity("atom-radius", atom_radius, Dimension::length);
        if (!order.empty())
            c.order = flag_int("order", order);
        if (!ati.empty())
            c.ati = flag_int("ati", ati);
        if (!beta_nu.empty())
            c.beta_nu = flag_number("beta-nu", beta_nu);
        if (!ref_intensity.empty())
            c.reference_intensity = flag_quantity(
                "ref-intensity", ref_intensity, Dimension::intensity);
        if (!work0.empty())
            c.metal.work_function_W0
                = flag_quantity("work0", work0, Dimension::energy);
        if (!work_slope.empty())
            c.metal.work_function_slope = flag_number("work-slope", work_slope);
        if (!electron_density.empty())
            c.metal.electron_density = flag_quantity(
                "electron-density", electron_density, Dimension::number_density);
        if (!metal_gamma.empty())
            c.metal.correlation_gamma = flag_number("metal-gamma", metal_gamma);
        return c;
    }
};

//---------------------------------------------------------------------------//
// MODEL EVALUATION
//---------------------------------------------------------------------------//
//! Multiphoton order used by a run: explicit, else ceil(W / h nu).
inline int resolve_order(RunConfig const& c, double photon_energy)
{
    if (c.order)
    {
        if (*c.order < 1)
            throw DomainError("multiphoton order must be >= 1");
        return *c.order;
    }
    return static_cast<int>(
        threshold_photon_number(c.gas.ionization_potential_W, photon_energy)
            .ceiling);
}

inline EffectivePhotonModel effective_model(RunConfig const& c)
{
    EffectivePhotonModel m;
    m.beta_nu = c.beta_nu;
    m.intensity_map = SaturatingIntensityMap{c.reference_intensity};
    return m;
}

//! Derived quantities of the anomalous model at one operating point.
struct AnomalousPoint
{
    ParticleKinematics kinematics;
    CrossSectionWindow window;
    double photon_density;
    double photons_on_cloud;
    ThresholdPhotonNumber threshold;
    double vector_potential_sq;
    double free_speed;
    double free_energy;
    double matrix_element_sq;
    double ramp_time;
    double ramp_probability;
    double flat_probability;
    double ion_density;
};

inline double default_free_speed(RunConfig const& c, Photon const& ph)
{
    auto th = threshold_photon_number(c.gas.ionization_potential_W, ph.energy);
    double e = th.ceiling * ph.energy - c.gas.ionization_potential_W;
    if (!(e > 0))
        throw DomainError("no excess energy above threshold for v_free");
    return std::sqrt(2 * e / codata.electron_mass_m);
}

inline AnomalousPoint
evaluate_anomalous(RunConfig const& c, double intensity, bool with_flat = true)
{
    if (!(intensity > 0))
        throw DomainError("anomalous model needs a positive intensity");
    auto ph = photon_from_wavelength(c.laser.light_wavelength);
    AnomalousPoint a;
    a.kinematics = derive_kinematics(c.v0);
    a.window = cross_section_bounds(a.kinematics);
    if (c.sigma)
        a.window = a.window.with_chosen(*c.sigma);
    a.photon_density = photon_density(intensity, ph.energy);
    a.photons_on_cloud = photons_on_cloud(a.window.sigma_chosen,
                                          a.photon_density);
    a.threshold = threshold_photon_number(c.gas.ionization_potential_W,
                                          ph.energy);
    a.vector_potential_sq = vector_potential_sq(intensity,
                                                ph.angular_frequency);
    a.free_speed = c.v_free ? *c.v_free : default_free_speed(c, ph);
    a.free_energy = 0.5 * codata.electron_mass_m * a.free_speed
                    * a.free_speed;
    auto inp = MatrixElementInputs::for_velocity(
        a.free_speed, ph.angular_frequency, c.volume, c.gas.nuclear_charge_Z);
    inp.theta = c.theta;
    inp.phi = c.phi;
    a.matrix_element_sq = matrix_element_sq(inp);
    double tp = c.laser.t_peak();
    a.ramp_time = c.time ? *c.time : tp / 10;
    a.ramp_probability = ionization_probability_ramp(a.matrix_element_sq,
                                                     a.threshold.value,
                                                     c.gas.ionization_potential_W,
                                                     tp,
                                                     intensity,
                                                     a.ramp_time);
    a.flat_probability = std::nan("");
    if (with_flat)
    {
        a.flat_probability = ionization_probability_flat(
            a.matrix_element_sq,
            a.photons_on_cloud,
            intensity,
            c.volume,
            inp.free_momentum_p,
            c.laser.duration_dt,
            c.solid_angle,
            PerturbationGuard{c.gas.ionization_potential_W,
                              ph.angular_frequency});
    }
    a.ion_density = ion_concentration(c.gas.atom_density_Na0,
                                      a.ramp_probability);
    return a;
}

//! ln of the perturbative N-photon ion yield N_a0 w_N duration.
inline double log_multiphoton_yield(RunConfig const& c,
                                    int order,
                                    double intensity,
                                    double duration)
{
    auto ph = photon_from_wavelength(c.laser.light_wavelength);
    auto s = generalized_cross_section(order, c.gas.atom_radius_r,
                                       ph.angular_frequency);
    auto w = multiphoton_rate(s, intensity_to_flux(intensity, ph.energy));
    return std::log(c.gas.atom_density_Na0) + w.log_value
           + std::log(duration);
}

inline int effective_order(RunConfig const& c, double intensity)
{
    auto ph = photon_from_wavelength(c.laser.light_wavelength);
    double eps = effective_photon_energy(effective_model(c), ph.energy,
                                         intensity);
    return static_cast<int>(
        threshold_photon_number(c.gas.ionization_potential_W, eps).ceiling);
}

inline double checked_exp(double log_value, std::string const& what)
{
    double v = std::exp(log_value);
    if (!std::isnormal(v))
    {
        throw ComputationError("range",
                               what + " is outside the double range (ln = "
                                   + format_g(log_value) + ")");
    }
    return v;
}

//! Response of the selected model at one sweep point.
inline double sweep_response(RunConfig const& c,
                             SweepVariable var,
                             double x)
{
    double intensity = c.laser.peak_intensity;
    double duration = c.laser.duration_dt;
    if (var == SweepVariable::intensity)
    {
        intensity = x;
    }
    else
    {
        if (!(intensity > 0))
            throw DomainError("time sweep needs a positive --intensity");
        duration = x;
    }
    switch (c.model)
    {
        case ModelKind::anomalous: {
            RunConfig rc = c;
            if (var == SweepVariable::time)
                rc.time = x;
            return evaluate_anomalous(rc, intensity, false).ion_density;
        }
        case ModelKind::multiphoton: {
            auto ph = photon_from_wavelength(c.laser.light_wavelength);
            int n = resolve_order(c, ph.energy);
            return checked_exp(log_multiphoton_yield(c, n, intensity, duration),
                               "multiphoton yield");
        }
        case ModelKind::effective: {
            int n = effective_order(c, intensity);
            return checked_exp(log_multiphoton_yield(c, n, intensity, duration),
                               "effective-photon yield");
        }
    }
    throw DomainError("unknown model");
}

//---------------------------------------------------------------------------//
// PREDICT
//---------------------------------------------------------------------------//
struct TextBlock
{
    std::ostringstream os;

    void line(std::string const& key, std::string const& value)
    {
        os << key;
        for (std::size_t i = key.size(); i < 22; ++i)
            os << ' ';
        os << "= " << value << '\n';
    }
    void line(std::string const& key, double v, std::string const& unit = {})
    {
        line(key, format_g(v, 4) + (unit.empty() ? "" : " " + unit));
    }
};

inline ordered_json predict_results(RunConfig const& c, TextBlock& text)
{
    double intensity = c.laser.peak_intensity;
    if (!(intensity > 0))
        throw ParseError("predict needs --intensity (or laser.intensity)");
    auto ph = photon_from_wavelength(c.laser.light_wavelength);
    ordered_json r;
    text.line("model", std::string(model_name(c.model)));
    text.line("photon energy", joule_to_ev(ph.energy), "eV");
    text.line("intensity", si_to_w_per_cm2(intensity), "W/cm^2");
    r["photon_energy_J"] = ph.energy;
    r["angular_frequency_rad_per_s"] = ph.angular_frequency;

    auto th = threshold_photon_number(c.gas.ionization_potential_W, ph.energy);
    r["threshold_photon_number"] = th.value;
    r["threshold_photon_number_ceil"] = th.ceiling;

    if (c.model == ModelKind::anomalous)
    {
        auto a = evaluate_anomalous(c, intensity);
        auto const& k = a.kinematics;
        text.line("v0", k.velocity_v0, "m/s");
        text.line("lambda", k.de_broglie_lambda * 1e9, "nm");
        text.line("Lambda", k.inerton_amplitude_Lambda * 1e9, "nm");
        text.line("Lambda/pi", k.cloud_radius * 1e9, "nm");
        text.line("sigma window",
                  "[" + format_g(a.window.sigma_lower, 4) + ", "
                      + format_g(a.window.sigma_upper, 4) + "] m^2");
        text.line("sigma", a.window.sigma_chosen, "m^2");
        text.line("photon density", a.photon_density, "m^-3");
        text.line("N on cloud", a.photons_on_cloud);
        text.line("N_th", th.value);
        text.line("ceil N_th", std::to_string(th.ceiling));
        text.line("v_free", a.free_speed, "m/s");
        text.line("|M|^2 kernel", a.matrix_element_sq, "");
        text.line("ramp time", a.ramp_time, "s");
        text.line("P ramp", a.ramp_probability);
        text.line("P flat", a.flat_probability);
        text.line("N_i ramp", a.ion_density, "m^-3");
        r["de_broglie_lambda_m"] = k.de_broglie_lambda;
        r["inerton_amplitude_m"] = k.inerton_amplitude_Lambda;
        r["cloud_radius_m"] = k.cloud_radius;
        r["sigma_lower_m2"] = a.window.sigma_lower;
        r["sigma_upper_m2"] = a.window.sigma_upper;
        r["sigma_m2"] = a.window.sigma_chosen;
        r["photon_density_per_m3"] = a.photon_density;
        r["photons_on_cloud"] = a.photons_on_cloud;
        r["vector_potential_sq"] = a.vector_potential_sq;
        r["free_speed_m_per_s"] = a.free_speed;
        r["matrix_element_sq"] = a.matrix_element_sq;
        r["ramp_time_s"] = a.ramp_time;
        r["ramp_probability"] = a.ramp_probability;
        r["flat_probability"] = a.flat_probability;
        r["ion_density_per_m3"] = a.ion_density;
        return r;
    }

    int order = c.model == ModelKind::multiphoton
                    ? resolve_order(c, ph.energy)
                    : effective_order(c, intensity);
    double flux = intensity_to_flux(intensity, ph.energy);
    auto s = generalized_cross_section(order, c.gas.atom_radius_r,
                                       ph.angular_frequency);
    auto w = multiphoton_rate(s, flux);
    double quantum = ph.energy;
    if (c.model == ModelKind::effective)
    {
        quantum = effective_photon_energy(effective_model(c), ph.energy,
                                          intensity);
        text.line("effective photon", joule_to_ev(quantum), "eV");
        text.line("eps / h nu", quantum / ph.energy);
        r["effective_photon_energy_J"] = quantum;
    }
    auto e = photoelectron_energy(order, quantum,
                                  c.gas.ionization_potential_W, c.ati);
    double log10_yield = log_multiphoton_yield(c, order, intensity,
                                               c.laser.duration_dt)
                         / std::log(10.0);
    text.line("N_th", th.value);
    text.line("ceil N_th", std::to_string(th.ceiling));
    text.line("order N", std::to_string(order));
    text.line("photon flux", flux, "m^-2 s^-1");
    text.line("log10 s_N", s.log_value / std::log(10.0));
    text.line("log10 w_N", w.log_value / std::log(10.0));
    text.line("log10 N_i", log10_yield);
    text.line("electron energy", joule_to_ev(e.energy), "eV");
    if (e.below_threshold)
        text.line("note", "below threshold");
    r["order"] = order;
    r["photon_flux"] = flux;
    r["log_cross_section"] = s.log_value;
    r["log_rate"] = w.log_value;
    r["rate_overflow"] = w.overflow;
    r["log10_ion_density"] = log10_yield;
    r["electron_energy_J"] = e.energy;
    r["below_threshold"] = e.below_threshold;
    return r;
}

//---------------------------------------------------------------------------//
// SWEEP
//---------------------------------------------------------------------------//
/*!
 * Evaluate f at every grid point on up to \c jobs threads. Results are
 * stored by grid index; the first failure (by index) is rethrown.
 */
inline std::vector<double> parallel_map(std::vector<double> const& xs,
                                        std::function<double(double)> const& f,
                                        int jobs)
{
    std::vector<double> ys(xs.size());
    std::vector<std::exception_ptr> errors(xs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < xs.size(); i = next++)
        {
            try
            {
                ys[i] = f(xs[i]);
            }
            catch (...)
            {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t n_threads = std::min<std::size_t>(
        static_cast<std::size_t>(std::max(jobs, 1)), xs.size());
    if (n_threads <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (auto const& e : errors)
    {
        if (e)
            std::rethrow_exception(e);
    }
    return ys;
}

inline Series run_sweep(RunConfig const& c)
{
    if (!c.sweep)
        throw ParseError("sweep needs --var, --lo, --hi and --steps");
    auto const& sw = *c.sweep;
    auto xs = sw.grid();
    auto ys = parallel_map(
        xs,
        [&](double x) { return sweep_response(c, sw.variable, x); },
        c.jobs);
    std::vector<Point> pts(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        pts[i] = {xs[i], ys[i]};
    bool by_intensity = sw.variable == SweepVariable::intensity;
    Series s(std::move(pts),
             by_intensity ? Unit::W_per_m2 : Unit::s,
             Unit::per_m3,
             by_intensity ? "Ni" : "Ne");
    if (c.noise > 0)
        s = add_lognormal_noise(s, c.noise, *c.seed);
    return s;
}

//---------------------------------------------------------------------------//
// ANALYZE / FIT INPUT
//---------------------------------------------------------------------------//
inline std::string read_text(std::string const& path, std::istream& in)
{
    std::ostringstream buf;
    if (path == "-")
    {
        buf << in.rdbuf();
        return buf.str();
    }
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open '" + path + "'");
    buf << f.rdbuf();
    return buf.str();
}

//! Pick the series schema from the header line.
inline SeriesSchema detect_schema(std::string const& text)
{
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line))
    {
        auto t = photoion::detail::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        auto cells = photoion::detail::split_csv(t);
        if (std::find(cells.begin(), cells.end(), schema::electron_growth.x_column)
            != cells.end())
        {
            return schema::electron_growth;
        }
        return schema::ion_yield;
    }
    throw ParseError("input has no header line");
}

inline std::optional<Window> parse_window(std::string const& text)
{
    if (text.empty())
        return std::nullopt;
    auto parts = split_colon(text);
    if (parts.size() != 2)
        throw ParseError("--window: expected lo:hi");
    Window w{flag_any("window", parts[0]), flag_any("window", parts[1])};
    if (!(w.lo < w.hi))
        throw ParseError("--window: lo must be below hi");
    return w;
}

inline ordered_json to_json(LogLogFit const& f)
{
    ordered_json j;
    j["slope"] = f.slope;
    j["intercept"] = f.intercept;
    j["r_squared"] = f.r_squared;
    j["slope_stderr"] = f.slope_stderr;
    j["intercept_stderr"] = f.intercept_stderr;
    j["points_used"] = f.points_used;
    return j;
}

}  // namespace detail

//---------------------------------------------------------------------------//
/*!
 * Run the command line. \c args excludes the program name. Standard input is
 * read when an input path is "-".
 */
inline int run(std::vector<std::string> const& args,
               std::ostream& out,
               std::ostream& err,
               std::istream& in = std::cin)
{
    using namespace detail;

    CLI::App app{"Photoionization model calculator", "photoion"};
    app.footer(help_footer());
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(artifact_version));

    // predict
    auto* predict = app.add_subcommand(
        "predict", "Evaluate a photoionization model at one operating point");
    PhysicsFlags pf;
    std::string predict_format = "text", predict_output;
    pf.add_to(*predict);
    predict->add_option("--format", predict_format, "text | json")
        ->check(CLI::IsMember({"text", "json"}));
    predict->add_option("--output", predict_output, "output path or - for stdout");
    predict->footer(help_footer());

    // sweep
    auto* sweep = app.add_subcommand(
        "sweep", "Tabulate a model response over an intensity or time grid");
    PhysicsFlags sf;
    sf.add_to(*sweep);
    std::string sweep_var, sweep_lo, sweep_hi, sweep_steps, sweep_output;
    std::string sweep_jobs, sweep_noise, sweep_seed;
    bool sweep_log = false;
    sweep->add_option("--var", sweep_var, "intensity | time");
    sweep->add_option("--lo", sweep_lo, "grid start [intensity or time]");
    sweep->add_option("--hi", sweep_hi, "grid end [intensity or time]");
    sweep->add_option("--steps", sweep_steps, "number of grid points (>= 2)");
    sweep->add_flag("--log", sweep_log, "logarithmic spacing");
    sweep->add_option("--jobs", sweep_jobs, "worker threads");
    sweep->add_option("--noise", sweep_noise, "log-normal noise sigma");
    sweep->add_option("--seed", sweep_seed, "noise seed (required with noise)");
    sweep->add_option("--output", sweep_output, "CSV path or - for stdout");
    sweep->footer(help_footer());

    // kinetics
    auto* kin = app.add_subcommand(
        "kinetics", "Ion and atom densities against intensity");
    std::string k_alpha = "0.5", k_beta = "0.5", k_gamma, k_decay = "0";
    std::string k_na0 = "1", k_grid = "0.1:10:50", k_mode = "closed";
    std::string k_output, k_init_na, k_init_ni = "0";
    bool k_log = false, k_allow_negative = false;
    kin->add_option("--alpha", k_alpha, "ionization coefficient")->capture_default_str();
    kin->add_option("--beta", k_beta, "restoration coefficient")->capture_default_str();
    kin->add_option("--gamma", k_gamma, "recombination coefficient (default beta)");
    kin->add_option("--decay", k_decay, "source term D")->capture_default_str();
    kin->add_option("--na0", k_na0, "initial atom density")->capture_default_str();
    kin->add_option("--i-grid", k_grid, "intensity grid lo:hi:steps")->capture_default_str();
    kin->add_flag("--log", k_log, "logarithmic intensity grid");
    kin->add_option("--mode", k_mode, "closed | ode | residual")->capture_default_str()
        ->check(CLI::IsMember({"closed", "ode", "residual"}));
    kin->add_option("--init-na", k_init_na, "N_a at t~ = 0 for ode (default na0)");
    kin->add_option("--init-ni", k_init_ni, "N_i at t~ = 0 for ode")->capture_default_str();
    kin->add_flag("--allow-negative", k_allow_negative,
                  "let the ode densities go below zero");
    kin->add_option("--output", k_output, "CSV path or - for stdout");
    kin->footer(help_footer());

    // fit
    auto* fit = app.add_subcommand(
        "fit", "Fit the ion-yield curve or a power law to a CSV series");
    std::string fit_input = "-", fit_output, fit_model = "ion-yield";
    std::string fit_photon_count;
    fit->add_option("input", fit_input, "CSV file (I_W_per_cm2,Ni or t_s,Ne)");
    fit->add_option("--model", fit_model, "ion-yield | power")->capture_default_str()
        ->check(CLI::IsMember({"ion-yield", "power"}));
    fit->add_option("--photon-count", fit_photon_count,
                    "separate A from A N^2 with this N");
    fit->add_option("--output", fit_output, "JSON path or - for stdout");
    fit->footer(help_footer());

    // analyze
    auto* analyze = app.add_subcommand(
        "analyze", "Log-log slope, knee and log-derivative of a CSV series");
    std::string an_input = "-", an_output, an_window;
    analyze->add_option("input", an_input, "CSV file (I_W_per_cm2,Ni or t_s,Ne)");
    analyze->add_option("--window", an_window, "x range lo:hi for the slope");
    analyze->add_option("--output", an_output, "JSON path or - for stdout");
    analyze->footer(help_footer());

    // deviations
    auto* dev = app.add_subcommand(
        "deviations", "Reference values next to recomputed ones");
    std::string dev_output, dev_format = "json";
    dev->add_option("--format", dev_format, "json | text")->capture_default_str()
        ->check(CLI::IsMember({"json", "text"}));
    dev->add_option("--output", dev_output, "output path or - for stdout");
    dev->footer(help_footer());

    try
    {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    }
    catch (CLI::CallForHelp const& e)
    {
        app.exit(e, out, err);
        return 0;
    }
    catch (CLI::CallForVersion const& e)
    {
        app.exit(e, out, err);
        return 0;
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e, out, err);
        return static_cast<int>(ErrorKind::validation);
    }

    try
    {
        if (predict->parsed())
        {
            auto cfg = pf.resolve();
            cfg.validate();
            TextBlock text;
            auto results = predict_results(cfg, text);
            auto target = resolve_output(predict_output, cfg.output_path,
                                         "predict." + predict_format);
            if (predict_format == "json")
            {
                Report rep;
                rep.command = "predict";
                rep.config = config_echo(cfg);
                rep.results = results;
                emit(target, dump(to_json(rep)), out);
            }
            else
            {
                emit(target, text.os.str(), out);
            }
            return 0;
        }
        if (sweep->parsed())
        {
            auto cfg = sf.resolve();
            if (!sweep_var.empty() || !sweep_lo.empty() || !sweep_hi.empty()
                || !sweep_steps.empty() || sweep_log)
            {
                SweepSpec sw = cfg.sweep.value_or(SweepSpec{});
                if (!sweep_var.empty())
                {
                    if (sweep_var == "intensity")
                        sw.variable = SweepVariable::intensity;
                    else if (sweep_var == "time")
                        sw.variable = SweepVariable::time;
                    else
                        throw ParseError("--var: expected intensity or time");
                }
                auto dim = sw.variable == SweepVariable::intensity
                               ? Dimension::intensity
                               : Dimension::time;
                if (!cfg.sweep && (sweep_lo.empty() || sweep_hi.empty()
                                   || sweep_steps.empty()))
                {
                    throw ParseError("sweep needs --lo, --hi and --steps");
                }
                if (!sweep_lo.empty())
                    sw.lo = flag_quantity("lo", sweep_lo, dim);
                if (!sweep_hi.empty())
                    sw.hi = flag_quantity("hi", sweep_hi, dim);
                if (!sweep_steps.empty())
                    sw.steps = flag_int("steps", sweep_steps);
                if (sweep_log)
                    sw.log = true;
                cfg.sweep = sw;
            }
            if (!sweep_jobs.empty())
                cfg.jobs = flag_int("jobs", sweep_jobs);
            if (!sweep_noise.empty())
                cfg.noise = flag_number("noise", sweep_noise);
            if (!sweep_seed.empty())
            {
                double s = flag_number("seed", sweep_seed);
                if (s < 0 || s != std::floor(s) || s > 9.007199254740992e15)
                    throw ParseError("--seed: expected a non-negative integer");
                cfg.seed = static_cast<std::uint64_t>(s);
            }
            cfg.validate();
            auto series = run_sweep(cfg);
            bool by_i = cfg.sweep->variable == SweepVariable::intensity;
            auto const& sch = by_i ? schema::ion_yield : schema::electron_growth;
            std::ostringstream csv;
            write_series(csv, series, sch.x_column, sch.y_column);
            emit(resolve_output(sweep_output, cfg.output_path, "sweep.csv"),
                 csv.str(),
                 out);
            return 0;
        }
        if (kin->parsed())
        {
            KineticParams kp;
            kp.alpha = flag_any("alpha", k_alpha);
            kp.beta = flag_any("beta", k_beta);
            if (!k_gamma.empty())
                kp.gamma = flag_any("gamma", k_gamma);
            kp.decay = flag_any("decay", k_decay);
            kp.na0 = flag_any("na0", k_na0);
            if (!(kp.na0 > 0))
                throw ParseError("--na0 must be positive");
            auto model = kp.model();
            auto parts = split_colon(k_grid);
            if (parts.size() != 3)
                throw ParseError("--i-grid: expected lo:hi:steps");
            SweepSpec g;
            g.lo = flag_any("i-grid", parts[0]);
            g.hi = flag_any("i-grid", parts[1]);
            g.steps = flag_int("i-grid", parts[2]);
            g.log = k_log;
            if (!(g.lo > 0) || !(g.lo < g.hi) || g.steps < 2)
                throw ParseError("--i-grid: need 0 < lo < hi and steps >= 2");
            auto grid = g.grid();

            std::ostringstream csv;
            auto fmt = photoion::detail::format_double;
            if (k_mode == "closed" || k_mode == "residual")
            {
                csv << (k_mode == "closed" ? "I,Na,Ni\n" : "I,Na,Ni,residual\n");
                for (double i : grid)
                {
                    double na = closed_form_atoms(kp.na0, kp.alpha, kp.beta, i);
                    double ni = closed_form_ions(kp.na0, kp.alpha, kp.beta, i);
                    csv << fmt(i) << ',' << fmt(na) << ',' << fmt(ni);
                    if (k_mode == "residual")
                    {
                        auto rep = closed_form_residual(model, kp.na0, {i});
                        csv << ',' << fmt(rep.max_normalized_residual);
                    }
                    csv << '\n';
                }
            }
            else
            {
                // Pseudo-time t~ = 1/I grows as I falls; integrate from t~ = 0.
                std::vector<double> times;
                for (auto it = grid.rbegin(); it != grid.rend(); ++it)
                    times.push_back(1 / *it);
                KineticState init{
                    k_init_na.empty() ? kp.na0 : flag_any("init-na", k_init_na),
                    flag_any("init-ni", k_init_ni),
                    0};
                IntegratorOptions opts;
                opts.allow_negative = k_allow_negative;
                auto states = integrate_kinetics(
                    model, kp.na0, 0, times.back(), init, opts, times);
                csv << "I,Na,Ni\n";
                for (std::size_t j = grid.size(); j-- > 0;)
                {
                    auto const& st = states[j + 1];
                    csv << fmt(1 / st.pseudo_time) << ',' << fmt(st.atoms_Na)
                        << ',' << fmt(st.ions_Ni) << '\n';
                }
            }
            emit(resolve_output(k_output, "", "kinetics.csv"), csv.str(), out);
            return 0;
        }
        if (fit->parsed())
        {
            auto text = read_text(fit_input, in);
            auto series = read_series_text(text, detect_schema(text));
            FitResult res;
            if (fit_model == "power")
            {
                res = fit_power_law(series);
            }
            else
            {
                IonYieldFitOptions opts;
                if (!fit_photon_count.empty())
                    opts.photon_count = flag_number("photon-count",
                                                    fit_photon_count);
                res = fit_ion_yield(series, opts);
            }
            emit(resolve_output(fit_output, "", "fit.json"),
                 dump(to_json(res)),
                 out);
            if (!res.converged)
            {
                err << "error[non_convergence]: fit did not converge\n";
                return static_cast<int>(ErrorKind::computation);
            }
            return 0;
        }
        if (analyze->parsed())
        {
            auto text = read_text(an_input, in);
            auto sch = detect_schema(text);
            auto series = read_series_text(text, sch);
            auto window = parse_window(an_window);
            Report rep;
            rep.command = "analyze";
            rep.config = {{"input", an_input},
                          {"x_column", sch.x_column},
                          {"y_column", sch.y_column}};
            if (window)
                rep.config["window"] = {window->lo, window->hi};
            rep.results["loglog"] = detail::to_json(loglog_slope(series, window));
            if (sch.x_column == schema::ion_yield.x_column)
            {
                if (series.size() >= 7)
                {
                    auto knee = inflection_point(series);
                    rep.results["inflection_W_per_m2"]
                        = knee ? ordered_json(*knee) : ordered_json(nullptr);
                }
            }
            else
            {
                auto d = log_derivative_time(series);
                ordered_json rows = ordered_json::array();
                for (auto const& p : d.points())
                    rows.push_back({p.x, p.y});
                rep.results["log_derivative"] = rows;
            }
            emit(resolve_output(an_output, "", "analyze.json"),
                 dump(to_json(rep)),
                 out);
            return 0;
        }
        if (dev->parsed())
        {
            auto devs = standing_deviations();
            std::string body;
            if (dev_format == "json")
            {
                Report rep;
                rep.command = "deviations";
                rep.deviations = devs;
                body = dump(to_json(rep));
            }
            else
            {
                std::ostringstream os;
                for (auto const& e : devs.entries)
                {
                    os << e.location << ": reference " << format_g(e.reference_value, 4)
                       << ' ' << e.unit << ", recomputed "
                       << format_g(e.recomputed_value, 4) << ' ' << e.unit
                       << ", ratio " << format_g(e.ratio, 3) << '\n';
                }
                body = os.str();
            }
            emit(resolve_output(dev_output, "", "deviations." + dev_format),
                 body,
                 out);
            return 0;
        }
    }
    catch (Error const& e)
    {
        err << "error[" << e.code() << "]: " << e.what() << '\n';
        return e.exit_code();
    }
    catch (nlohmann::json::exception const& e)
    {
        err << "error[parse]: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::validation);
    }
    catch (std::exception const& e)
    {
        err << "error[internal]: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::computation);
    }
    return static_cast<int>(ErrorKind::validation);
}

}  // namespace photoion::cli

// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/dataio.hpp
//! CSV series, JSON reports and run configuration.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "analysis.hpp"
#include "cloud.hpp"
#include "error.hpp"
#include "kinetics.hpp"
#include "models.hpp"
#include "units.hpp"

#ifndef PHOTOION_VERSION
#    define PHOTOION_VERSION "1.0.0"
#endif

namespace photoion
{
using ordered_json = nlohmann::ordered_json;

inline constexpr int report_schema_version = 1;
inline constexpr char const* artifact_version = PHOTOION_VERSION;

//---------------------------------------------------------------------------//
// CSV SERIES
//---------------------------------------------------------------------------//
/*!
 * A column header like "I_W_per_cm2" split into base name and unit.
 * Headers without a recognised unit suffix are dimensionless.
 */
struct ColumnName
{
    std::string base;
    Unit unit = Unit::none;

    static ColumnName parse(std::string const& header)
    {
        ColumnName best{header, Unit::none};
        std::size_t best_len = 0;
        for (auto const& row : detail::unit_table)
        {
            if (row.tag.empty())
                continue;
            std::string suffix = "_" + std::string(row.tag);
            if (header.size() > suffix.size()
                && header.compare(header.size() - suffix.size(),
                                  suffix.size(),
                                  suffix)
                       == 0
                && suffix.size() > best_len)
            {
                best = {header.substr(0, header.size() - suffix.size()),
                        row.unit};
                best_len = suffix.size();
            }
        }
        return best;
    }

    std::string str() const
    {
        return unit == Unit::none ? base
                                  : base + "_" + std::string(unit_tag(unit));
    }
};

//! Header names a series file must carry: x column then y column.
struct SeriesSchema
{
    std::string x_column;
    std::string y_column;
};

namespace schema
{
inline SeriesSchema const ion_yield{"I_W_per_cm2", "Ni"};
inline SeriesSchema const electron_growth{"t_s", "Ne"};
}  // namespace schema

namespace detail
{
inline std::string trim(std::string s)
{
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

inline std::vector<std::string> split_csv(std::string const& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        cells.emplace_back();
    return cells;
}

inline double parse_cell(std::string const& cell, long row)
{
    double v = 0;
    auto const* first = cell.data();
    auto const* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || cell.empty() || !std::isfinite(v))
    {
        throw ParseError("unparseable number '" + cell + "' on row "
                             + std::to_string(row),
                         row);
    }
    return v;
}

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

/*!
 * Read a two-column series from CSV text.
 *
 * Lines starting with '#' and blank lines are skipped; the first other line
 * is the header. Values are converted to SI using the unit suffix of each
 * column name and the rows are sorted by x. Row numbers in errors are
 * 1-based file lines.
 */
inline Series read_series_text(std::string const& text,
                               std::optional<SeriesSchema> expected = {})
{
    std::istringstream is(text);
    std::string line;
    long row = 0;
    std::optional<std::vector<std::string>> header;
    std::size_t xi = 0, yi = 1;
    struct Row
    {
        double x, y;
        long row;
    };
    std::vector<Row> rows;
    ColumnName xname, yname;
    while (std::getline(is, line))
    {
        ++row;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        auto t = detail::trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        auto cells = detail::split_csv(t);
        if (!header)
        {
            header = cells;
            if (expected)
            {
                auto find = [&](std::string const& name) {
                    auto it = std::find(cells.begin(), cells.end(), name);
                    if (it == cells.end())
                        throw ParseError("missing column '" + name + "'", row);
                    return static_cast<std::size_t>(it - cells.begin());
                };
                xi = find(expected->x_column);
                yi = find(expected->y_column);
            }
            else if (cells.size() < 2)
            {
                throw ParseError("series header needs two columns", row);
            }
            xname = ColumnName::parse((*header)[xi]);
            yname = ColumnName::parse((*header)[yi]);
            continue;
        }
        if (cells.size() != header->size())
        {
            throw ParseError("row " + std::to_string(row) + " has "
                                 + std::to_string(cells.size())
                                 + " cells, header has "
                                 + std::to_string(header->size()),
                             row);
        }
        rows.push_back({detail::parse_cell(cells[xi], row) * unit_scale(xname.unit),
                        detail::parse_cell(cells[yi], row) * unit_scale(yname.unit),
                        row});
    }
    if (!header)
        throw ParseError("no header line found");
    if (rows.size() < 2)
        throw ParseError("series needs at least two data rows");
    std::stable_sort(rows.begin(), rows.end(), [](Row const& a, Row const& b) {
        return a.x < b.x;
    });
    std::vector<Point> pts;
    pts.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        if (i > 0 && rows[i].x == rows[i - 1].x)
        {
            throw ParseError("duplicate x value on row "
                                 + std::to_string(rows[i].row),
                             rows[i].row);
        }
        pts.push_back({rows[i].x, rows[i].y});
    }
    auto si_unit = [](Unit u) {
        switch (unit_dimension(u))
        {
            case Dimension::length: return Unit::m;
            case Dimension::time: return Unit::s;
            case Dimension::energy: return Unit::J;
            case Dimension::intensity: return Unit::W_per_m2;
            case Dimension::number_density: return Unit::per_m3;
            default: return Unit::none;
        }
    };
    return {std::move(pts), si_unit(xname.unit), si_unit(yname.unit),
            yname.base};
}

inline Series read_series(std::string const& path,
                          std::optional<SeriesSchema> expected = {})
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_series_text(buf.str(), expected);
}

/*!
 * Write a series as CSV; values are converted from SI into the units named
 * by the column headers.
 */
inline void write_series(std::ostream& os,
                         Series const& s,
                         std::string const& x_column,
                         std::string const& y_column)
{
    auto xs = unit_scale(ColumnName::parse(x_column).unit);
    auto ys = unit_scale(ColumnName::parse(y_column).unit);
    os << x_column << ',' << y_column << '\n';
    for (auto const& p : s.points())
    {
        os << detail::format_double(p.x / xs) << ','
           << detail::format_double(p.y / ys) << '\n';
    }
}

inline void write_series(std::string const& path,
                         Series const& s,
                         std::string const& x_column,
                         std::string const& y_column)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    write_series(out, s, x_column, y_column);
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

//---------------------------------------------------------------------------//
// DEVIATION REPORT
//---------------------------------------------------------------------------//
/*!
 * A published figure next to the value the formulas give for the same
 * inputs. ratio = recomputed / reference.
 */
struct DeviationEntry
{
    std::string location;
    std::string description;
    double reference_value;
    double recomputed_value;
    std::string unit;
    double ratio;

    bool operator==(DeviationEntry const&) const = default;
};

struct DeviationReport
{
    std::vector<DeviationEntry> entries;

    void add(std::string location,
             std::string description,
             double reference,
             double recomputed,
             std::string unit)
    {
        double ratio = recomputed / reference;
        if (!std::isfinite(ratio))
            throw DomainError("deviation ratio must be finite");
        entries.push_back({std::move(location),
                           std::move(description),
                           reference,
                           recomputed,
                           std::move(unit),
                           ratio});
    }

    bool operator==(DeviationReport const&) const = default;
};

/*!
 * The standing comparison of reference order-of-magnitude numbers with
 * recomputation: electron at 2e6 m/s, 1.06 um light.
 */
inline DeviationReport standing_deviations()
{
    DeviationReport r;
    double const v0 = 2e6;
    auto k = derive_kinematics(v0);
    auto w = cross_section_bounds(k);
    auto ph = photon_from_wavelength(1.06e-6);

    r.add("cross_section_upper_bound",
          "Lambda^2/pi at v0 = 2e6 m/s against the reference 1.7e-12 cm^2",
          1.7e-12 * 1e-4,
          w.sigma_upper,
          "m^2");
    r.add("photon_density_at_1e12_W_per_cm2",
          "I/(h nu c) at 1.06 um against the reference 3e19 cm^-3",
          3e19 * 1e6,
          photon_density(1e16, ph.energy),
          "m^-3");
    r.add("photon_spacing_at_3e19_per_cm3",
          "n^(-1/3) at n = 3e19 cm^-3 against the reference 30 nm",
          30e-9,
          mean_photon_spacing(3e25),
          "m");
    r.add("photon_density_at_1e15_W_per_cm2",
          "I/(h nu c) at 1.06 um against the reference 3e22 cm^-3",
          3e22 * 1e6,
          photon_density(1e19, ph.energy),
          "m^-3");
    r.add("photon_spacing_at_3e22_per_cm3",
          "n^(-1/3) at n = 3e22 cm^-3 against the reference 3 nm",
          3e-9,
          mean_photon_spacing(3e28),
          "m");
    r.add("de_broglie_wavelength",
          "h/(m v0) at v0 = 2e6 m/s against the reference 0.36 nm",
          0.36e-9,
          k.de_broglie_lambda,
          "m");
    r.add("cloud_radius",
          "Lambda/pi at v0 = 2e6 m/s against the reference 17 nm",
          17e-9,
          k.cloud_radius,
          "m");
    r.add("cross_section_lower_bound",
          "lambda^2/(4 pi) at v0 = 2e6 m/s against the reference 1e-16 cm^2",
          1e-16 * 1e-4,
          w.sigma_lower,
          "m^2");
    r.add("coupling_energy_at_1e6_W_per_cm2",
          "(e p/m) A per photon, v = 2e6 m/s, 1.06 um, against the reference "
          "1.8e-22 J",
          1.8e-22,
          effective_coupling_energy(
              1e10, 1.0, codata.electron_mass_m * v0, ph.angular_frequency),
          "J");
    return r;
}

//---------------------------------------------------------------------------//
// REPORT
//---------------------------------------------------------------------------//
struct Report
{
    std::string command;
    ordered_json config = ordered_json::object();
    ordered_json results = ordered_json::object();
    DeviationReport deviations;

    bool operator==(Report const& o) const
    {
        return command == o.command && config == o.config
               && results == o.results && deviations == o.deviations;
    }
};

inline ordered_json to_json(DeviationEntry const& e)
{
    ordered_json j;
    j["location"] = e.location;
    j["description"] = e.description;
    j["reference_value"] = e.reference_value;
    j["recomputed_value"] = e.recomputed_value;
    j["unit"] = e.unit;
    j["ratio"] = e.ratio;
    return j;
}

inline ordered_json to_json(DeviationReport const& r)
{
    ordered_json arr = ordered_json::array();
    for (auto const& e : r.entries)
        arr.push_back(to_json(e));
    return arr;
}

inline ordered_json to_json(Report const& r)
{
    ordered_json j;
    j["schema_version"] = report_schema_version;
    j["artifact_version"] = artifact_version;
    j["command"] = r.command;
    j["config"] = r.config;
    j["results"] = r.results;
    j["deviations"] = to_json(r.deviations);
    return j;
}

inline ordered_json to_json(FitResult const& f)
{
    ordered_json j;
    ordered_json params = ordered_json::object();
    ordered_json errs = ordered_json::object();
    for (std::size_t i = 0; i < f.parameter_names.size(); ++i)
    {
        params[f.parameter_names[i]] = f.values[i];
        errs[f.parameter_names[i]] = f.standard_errors[i];
    }
    j["params"] = params;
    j["stderr"] = errs;
    j["residual_norm"] = f.residual_norm;
    j["converged"] = f.converged;
    j["iterations"] = f.iterations;
    return j;
}

inline Report report_from_json(ordered_json const& j)
{
    try
    {
        if (j.at("schema_version").get<int>() != report_schema_version)
            throw ParseError("unsupported report schema_version");
        Report r;
        r.command = j.at("command").get<std::string>();
        r.config = j.at("config");
        r.results = j.at("results");
        for (auto const& e : j.at("deviations"))
        {
            r.deviations.entries.push_back(
                {e.at("location").get<std::string>(),
                 e.at("description").get<std::string>(),
                 e.at("reference_value").get<double>(),
                 e.at("recomputed_value").get<double>(),
                 e.at("unit").get<std::string>(),
                 e.at("ratio").get<double>()});
        }
        return r;
    }
    catch (nlohmann::json::exception const& e)
    {
        throw ParseError(std::string("malformed report: ") + e.what());
    }
}

//! Serialize with two-space indentation and a trailing newline.
inline std::string dump(ordered_json const& j)
{
    return j.dump(2) + "\n";
}

inline void write_text_file(std::string const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << text;
    out.flush();
    if (!out)
        throw IoError("write failed for '" + path + "'");
}

inline void write_report(Report const& report, std::string const& path)
{
    write_text_file(path, dump(to_json(report)));
}

inline Report read_report(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open '" + path + "'");
    try
    {
        return report_from_json(ordered_json::parse(in));
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw ParseError(std::string("report is not JSON: ") + e.what());
    }
}

//---------------------------------------------------------------------------//
// RUN CONFIGURATION
//---------------------------------------------------------------------------//
enum class ModelKind
{
    multiphoton,
    effective,
    anomalous,
};

inline std::string_view model_name(ModelKind m)
{
    switch (m)
    {
        case ModelKind::multiphoton: return "multiphoton";
        case ModelKind::effective: return "effective";
        case ModelKind::anomalous: return "anomalous";
    }
    return "";
}

inline ModelKind parse_model(std::string const& s)
{
    if (s == "multiphoton")
        return ModelKind::multiphoton;
    if (s == "effective")
        return ModelKind::effective;
    if (s == "anomalous")
        return ModelKind::anomalous;
    throw ParseError("unknown model '" + s
                     + "' (expected multiphoton, effective or anomalous)");
}

enum class SweepVariable
{
    intensity,
    time,
};

struct SweepSpec
{
    SweepVariable variable = SweepVariable::intensity;
    double lo = 0;
    double hi = 0;
    int steps = 0;
    bool log = false;

    std::vector<double> grid() const
    {
        return log ? log_grid(lo, hi, static_cast<std::size_t>(steps))
                   : linear_grid(lo, hi, static_cast<std::size_t>(steps));
    }
};

//! Rate-equation inputs; gamma defaults to beta (first approximation).
struct KineticParams
{
    double alpha = 0.5;
    double beta = 0.5;
    std::optional<double> gamma;
    double decay = 0;
    double na0 = 1;
    double constant = 1;

    KineticModel model() const
    {
        if (!(alpha >= 0) || !(beta >= 0))
            throw DomainError("alpha and beta must be non-negative");
        return {alpha, beta, gamma.value_or(beta), decay};
    }
};

/*!
 * Everything a run needs. Quantities are SI. Optional fields left unset are
 * derived at run time (e.g. the multiphoton order from W / h nu).
 */
struct RunConfig
{
    ModelKind model = ModelKind::anomalous;

    // laser
    LaserPulse laser;
    std::optional<double> time;  //!< evaluation time on the ramp [s]

    // electron
    double v0 = 2e6;
    std::optional<double> v_free;
    std::optional<double> sigma;
    double theta = std::numbers::pi / 2;
    double phi = 0;
    double volume = 1e-18;
    double solid_angle = 1;

    GasTarget gas;
    MetalTarget metal;

    // multiphoton
    std::optional<int> order;
    int ati = 0;

    // effective photon
    double beta_nu = 0.9;
    double reference_intensity = 1e16;

    // kinetics
    KineticParams kinetics;

    std::optional<SweepSpec> sweep;
    std::string output_path;
    std::optional<std::uint64_t> seed;
    double noise = 0;
    int jobs = 1;

    void validate() const
    {
        laser.validate();
        gas.validate();
        metal.validate();
        if (!(v0 > 0 && v0 < codata.light_speed_c))
            throw ParseError("v0 must satisfy 0 < v0 < c");
        if (sweep)
        {
            if (!(sweep->lo < sweep->hi))
                throw ParseError("sweep: lo must be below hi");
            if (sweep->steps < 2)
                throw ParseError("sweep: steps must be >= 2");
            if (sweep->log && !(sweep->lo > 0))
                throw ParseError("sweep: log spacing needs lo > 0");
        }
        if (noise < 0)
            throw ParseError("noise must be non-negative");
        if (noise > 0 && !seed)
            throw ParseError("seed is required when noise > 0");
        if (jobs < 1)
            throw ParseError("jobs must be >= 1");
    }
};

namespace detail
{
//! Number (SI) or unit-suffixed string of the expected dimension.
inline double config_quantity(ordered_json const& v,
                              std::string const& key,
                              Dimension dim)
{
    if (v.is_number())
        return v.get<double>();
    if (v.is_string())
    {
        try
        {
            return parse_si(v.get<std::string>(), dim);
        }
        catch (ParseError const& e)
        {
            throw ParseError("config key '" + key + "': " + e.what());
        }
    }
    throw ParseError("config key '" + key + "' must be a number or string");
}

inline double config_number(ordered_json const& v, std::string const& key)
{
    if (!v.is_number())
        throw ParseError("config key '" + key + "' must be a number");
    return v.get<double>();
}

class KeyChecker
{
  public:
    KeyChecker(ordered_json const& obj, std::string prefix)
        : obj_(obj), prefix_(std::move(prefix))
    {
        if (!obj.is_object())
            throw ParseError("config section '" + prefix_
                             + "' must be an object");
    }

    template<class F>
    void on(std::string const& key, F&& f)
    {
        seen_.insert(key);
        if (auto it = obj_.find(key); it != obj_.end())
            f(*it, prefix_.empty() ? key : prefix_ + "." + key);
    }

    void finish() const
    {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
        {
            if (!seen_.count(it.key()))
            {
                std::string full = prefix_.empty() ? it.key()
                                                   : prefix_ + "." + it.key();
                throw ParseError("unknown config key '" + full + "'");
            }
        }
    }

  private:
    ordered_json const& obj_;
    std::string prefix_;
    std::set<std::string> seen_;
};
}  // namespace detail

/*!
 * Build a RunConfig from a JSON document. See docs in README for the
 * schema. Unknown keys and invariant violations are ParseError naming the
 * key.
 */
inline RunConfig parse_config_json(ordered_json const& doc)
{
    using detail::config_number;
    using detail::config_quantity;
    RunConfig cfg;
    detail::KeyChecker top(doc, "");
    top.on("schema_version", [&](auto const& v, auto const& k) {
        if (!v.is_number_integer() || v.template get<int>() != 1)
            throw ParseError("config key '" + k + "' must be 1");
    });
    bool have_model = false;
    top.on("model", [&](auto const& v, auto const&) {
        cfg.model = parse_model(v.template get<std::string>());
        have_model = true;
    });
    if (!have_model)
        throw ParseError("config key 'model' is required");

    top.on("laser", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("wavelength", [&](auto const& v, auto const& k) {
            cfg.laser.light_wavelength = config_quantity(v, k, Dimension::length);
        });
        c.on("intensity", [&](auto const& v, auto const& k) {
            cfg.laser.peak_intensity = config_quantity(v, k, Dimension::intensity);
        });
        c.on("duration", [&](auto const& v, auto const& k) {
            cfg.laser.duration_dt = config_quantity(v, k, Dimension::time);
        });
        c.on("shape", [&](auto const& v, auto const& k) {
            auto s = v.template get<std::string>();
            if (s == "triangular")
                cfg.laser.shape = PulseShape::triangular;
            else if (s == "rectangular")
                cfg.laser.shape = PulseShape::rectangular;
            else
                throw ParseError("config key '" + k + "': unknown shape");
        });
        c.on("time", [&](auto const& v, auto const& k) {
            cfg.time = config_quantity(v, k, Dimension::time);
        });
        c.finish();
    });

    top.on("electron", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("v0", [&](auto const& v, auto const& k) { cfg.v0 = config_number(v, k); });
        c.on("v_free", [&](auto const& v, auto const& k) { cfg.v_free = config_number(v, k); });
        c.on("sigma", [&](auto const& v, auto const& k) { cfg.sigma = config_number(v, k); });
        c.on("theta", [&](auto const& v, auto const& k) { cfg.theta = config_number(v, k); });
        c.on("phi", [&](auto const& v, auto const& k) { cfg.phi = config_number(v, k); });
        c.on("volume", [&](auto const& v, auto const& k) { cfg.volume = config_number(v, k); });
        c.on("solid_angle", [&](auto const& v, auto const& k) { cfg.solid_angle = config_number(v, k); });
        c.finish();
    });

    top.on("gas", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("work", [&](auto const& v, auto const& k) {
            cfg.gas.ionization_potential_W = config_quantity(v, k, Dimension::energy);
        });
        c.on("na0", [&](auto const& v, auto const& k) {
            cfg.gas.atom_density_Na0 = config_quantity(v, k, Dimension::number_density);
        });
        c.on("z", [&](auto const& v, auto const& k) {
            cfg.gas.nuclear_charge_Z = static_cast<int>(config_number(v, k));
        });
        c.on("atom_radius", [&](auto const& v, auto const& k) {
            cfg.gas.atom_radius_r = config_quantity(v, k, Dimension::length);
        });
        c.finish();
    });

    top.on("metal", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("work0", [&](auto const& v, auto const& k) {
            cfg.metal.work_function_W0 = config_quantity(v, k, Dimension::energy);
        });
        c.on("slope", [&](auto const& v, auto const& k) {
            cfg.metal.work_function_slope = config_number(v, k);
        });
        c.on("electron_density", [&](auto const& v, auto const& k) {
            cfg.metal.electron_density = config_quantity(v, k, Dimension::number_density);
        });
        c.on("gamma", [&](auto const& v, auto const& k) {
            cfg.metal.correlation_gamma = config_number(v, k);
        });
        c.finish();
    });

    top.on("multiphoton", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("order", [&](auto const& v, auto const& k) {
            cfg.order = static_cast<int>(config_number(v, k));
        });
        c.on("ati", [&](auto const& v, auto const& k) {
            cfg.ati = static_cast<int>(config_number(v, k));
        });
        c.finish();
    });

    top.on("effective", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("beta_nu", [&](auto const& v, auto const& k) { cfg.beta_nu = config_number(v, k); });
        c.on("reference_intensity", [&](auto const& v, auto const& k) {
            cfg.reference_intensity = config_quantity(v, k, Dimension::intensity);
        });
        c.finish();
    });

    top.on("kinetics", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        c.on("alpha", [&](auto const& v, auto const& k) { cfg.kinetics.alpha = config_number(v, k); });
        c.on("beta", [&](auto const& v, auto const& k) { cfg.kinetics.beta = config_number(v, k); });
        c.on("gamma", [&](auto const& v, auto const& k) { cfg.kinetics.gamma = config_number(v, k); });
        c.on("decay", [&](auto const& v, auto const& k) { cfg.kinetics.decay = config_number(v, k); });
        c.on("na0", [&](auto const& v, auto const& k) { cfg.kinetics.na0 = config_number(v, k); });
        c.on("constant", [&](auto const& v, auto const& k) { cfg.kinetics.constant = config_number(v, k); });
        c.finish();
    });

    top.on("sweep", [&](auto const& sec, auto const& p) {
        detail::KeyChecker c(sec, p);
        SweepSpec sw;
        bool have_var = false;
        c.on("var", [&](auto const& v, auto const& k) {
            auto s = v.template get<std::string>();
            if (s == "intensity")
                sw.variable = SweepVariable::intensity;
            else if (s == "time")
                sw.variable = SweepVariable::time;
            else
                throw ParseError("config key '" + k + "': unknown variable");
            have_var = true;
        });
        if (!have_var)
            throw ParseError("config key '" + p + ".var' is required");
        auto dim = sw.variable == SweepVariable::intensity ? Dimension::intensity
                                                           : Dimension::time;
        bool have_lo = false, have_hi = false, have_steps = false;
        c.on("lo", [&](auto const& v, auto const& k) {
            sw.lo = config_quantity(v, k, dim);
            have_lo = true;
        });
        c.on("hi", [&](auto const& v, auto const& k) {
            sw.hi = config_quantity(v, k, dim);
            have_hi = true;
        });
        c.on("steps", [&](auto const& v, auto const& k) {
            sw.steps = static_cast<int>(config_number(v, k));
            have_steps = true;
        });
        c.on("log", [&](auto const& v, auto const& k) {
            if (!v.is_boolean())
                throw ParseError("config key '" + k + "' must be boolean");
            sw.log = v.template get<bool>();
        });
        c.finish();
        if (!have_lo || !have_hi || !have_steps)
            throw ParseError("config section 'sweep' needs lo, hi and steps");
        cfg.sweep = sw;
    });

    top.on("output", [&](auto const& v, auto const& k) {
        if (!v.is_string())
            throw ParseError("config key '" + k + "' must be a string");
        cfg.output_path = v.template get<std::string>();
    });
    top.on("seed", [&](auto const& v, auto const& k) {
        if (!v.is_number_unsigned())
            throw ParseError("config key '" + k
                             + "' must be a non-negative integer");
        cfg.seed = v.template get<std::uint64_t>();
    });
    top.on("noise", [&](auto const& v, auto const& k) { cfg.noise = config_number(v, k); });
    top.on("jobs", [&](auto const& v, auto const& k) {
        cfg.jobs = static_cast<int>(config_number(v, k));
    });
    top.finish();

    cfg.validate();
    return cfg;
}

inline RunConfig parse_config_text(std::string const& text)
{
    try
    {
        return parse_config_json(ordered_json::parse(text));
    }
    catch (nlohmann::json::exception const& e)
    {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
}

inline RunConfig parse_config(std::string const& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

//! Echo of the resolved configuration for reports.
inline ordered_json config_echo(RunConfig const& c)
{
    ordered_json j;
    j["model"] = model_name(c.model);
    j["laser"] = {{"wavelength_m", c.laser.light_wavelength},
                  {"intensity_W_per_m2", c.laser.peak_intensity},
                  {"duration_s", c.laser.duration_dt},
                  {"shape",
                   c.laser.shape == PulseShape::triangular ? "triangular"
                                                           : "rectangular"}};
    if (c.time)
        j["laser"]["time_s"] = *c.time;
    j["electron"] = {{"v0", c.v0},
                     {"theta", c.theta},
                     {"phi", c.phi},
                     {"volume", c.volume},
                     {"solid_angle", c.solid_angle}};
    if (c.v_free)
        j["electron"]["v_free"] = *c.v_free;
    if (c.sigma)
        j["electron"]["sigma"] = *c.sigma;
    j["gas"] = {{"work_J", c.gas.ionization_potential_W},
                {"na0_per_m3", c.gas.atom_density_Na0},
                {"z", c.gas.nuclear_charge_Z},
                {"atom_radius_m", c.gas.atom_radius_r}};
    j["metal"] = {{"work0_J", c.metal.work_function_W0},
                  {"slope", c.metal.work_function_slope},
                  {"electron_density_per_m3", c.metal.electron_density},
                  {"gamma", c.metal.correlation_gamma}};
    j["multiphoton"] = {{"ati", c.ati}};
    if (c.order)
        j["multiphoton"]["order"] = *c.order;
    j["effective"] = {{"beta_nu", c.beta_nu},
                      {"reference_intensity_W_per_m2", c.reference_intensity}};
    j["kinetics"] = {{"alpha", c.kinetics.alpha},
                     {"beta", c.kinetics.beta},
                     {"decay", c.kinetics.decay},
                     {"na0", c.kinetics.na0},
                     {"constant", c.kinetics.constant}};
    if (c.kinetics.gamma)
        j["kinetics"]["gamma"] = *c.kinetics.gamma;
    if (c.sweep)
    {
        j["sweep"] = {{"var",
                       c.sweep->variable == SweepVariable::intensity ? "intensity"
                                                                     : "time"},
                      {"lo", c.sweep->lo},
                      {"hi", c.sweep->hi},
                      {"steps", c.sweep->steps},
                      {"log", c.sweep->log}};
    }
    if (c.seed)
        j["seed"] = *c.seed;
    j["noise"] = c.noise;
    return j;
}

}  // namespace photoion

// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/kinetics.hpp
//! Ionization/recombination rate equations written in the reciprocal
//! intensity t~ = 1/I, their closed forms, the ion-yield curve and the
//! breakdown threshold.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "units.hpp"

namespace photoion
{
//---------------------------------------------------------------------------//
/*!
 * Rates of the two-population system
 *
 *   dN_a/dt~ = alpha N_a - beta N_i + D
 *   dN_i/dt~ = gamma N_i - alpha N_a
 *
 * Signs are kept as written even though alpha is the ionization rate.
 */
struct KineticModel
{
    double ionization_alpha = 0;
    double restoration_beta = 0;
    double recombination_gamma = 0;
    double decay_D = 0;

    //! D = 0 and gamma = beta.
    static KineticModel first_approximation(double alpha, double beta)
    {
        if (!(alpha >= 0) || !(beta >= 0))
            throw DomainError("alpha and beta must be non-negative");
        return {alpha, beta, beta, 0};
    }

    bool is_first_approximation() const
    {
        return decay_D == 0 && recombination_gamma == restoration_beta;
    }

    //! I_m = alpha + beta.
    double balance_intensity() const
    {
        return ionization_alpha + restoration_beta;
    }
};

struct KineticState
{
    double atoms_Na;
    double ions_Ni;
    double pseudo_time;
};

//---------------------------------------------------------------------------//
// CLOSED FORMS
//---------------------------------------------------------------------------//
inline double
closed_form_atoms(double na0, double alpha, double beta, double intensity)
{
    if (!(intensity > 0))
        throw DomainError("intensity must be positive");
    return na0 * -std::expm1(-(alpha + beta) / intensity);
}

/*!
 * N_i = N_a0 (alpha/beta - alpha/(alpha + 2 beta) exp(-(alpha+beta)/I)).
 *
 * With alpha = 0 both ratios vanish for any beta, including beta = 0.
 */
inline double
closed_form_ions(double na0, double alpha, double beta, double intensity)
{
    if (!(intensity > 0))
        throw DomainError("intensity must be positive");
    if (alpha == 0)
        return 0;
    if (beta == 0)
        throw DomainError("closed-form ion density divides by beta = 0",
                          "division");
    double decay = std::exp(-(alpha + beta) / intensity);
    return na0 * (alpha / beta - alpha / (alpha + 2 * beta) * decay);
}

//---------------------------------------------------------------------------//
/*!
 * How far the closed forms are from satisfying the rate equations.
 */
struct ResidualReport
{
    double max_abs_residual = 0;  //!< over both equations and the grid
    double max_normalized_residual = 0;  //!< divided by N_a0
    double atoms_max_residual = 0;
    double ions_max_residual = 0;
    double worst_intensity = 0;
    std::size_t grid_points = 0;

    //! Whether the closed forms satisfy the equations to 1e-12 (normalized).
    bool satisfied() const { return max_normalized_residual < 1e-12; }
};

/*!
 * Substitute the closed forms into the first-approximation rate equations
 * at each intensity of the grid; derivatives are taken analytically in t~.
 */
inline ResidualReport closed_form_residual(KineticModel const& model,
                                           double na0,
                                           std::vector<double> const& grid)
{
    if (!model.is_first_approximation())
    {
        throw DomainError("residual check requires D = 0 and gamma = beta",
                          "mode");
    }
    if (!(na0 > 0))
        throw DomainError("initial atom density must be positive");
    double const a = model.ionization_alpha;
    double const b = model.restoration_beta;
    double const s = a + b;

    ResidualReport report;
    report.grid_points = grid.size();
    for (double intensity : grid)
    {
        double tt = 1 / intensity;
        double na = closed_form_atoms(na0, a, b, intensity);
        double ni = closed_form_ions(na0, a, b, intensity);
        double e = std::exp(-s * tt);
        double dna = na0 * s * e;
        double dni = a == 0 ? 0.0 : na0 * a * s / (a + 2 * b) * e;

        double ra = std::abs(dna - (a * na - b * ni + model.decay_D));
        double ri = std::abs(dni - (model.recombination_gamma * ni - a * na));
        report.atoms_max_residual = std::max(report.atoms_max_residual, ra);
        report.ions_max_residual = std::max(report.ions_max_residual, ri);
        double r = std::max(ra, ri);
        if (r > report.max_abs_residual)
        {
            report.max_abs_residual = r;
            report.worst_intensity = intensity;
        }
    }
    report.max_normalized_residual = report.max_abs_residual / na0;
    return report;
}

//---------------------------------------------------------------------------//
// NUMERICAL INTEGRATION
//---------------------------------------------------------------------------//
struct IntegratorOptions
{
    double relative_tolerance = 1e-10;
    //! Absolute tolerance as a fraction of N_a0.
    double absolute_tolerance = 1e-14;
    double initial_step = 0;  //!< 0 picks a step from the span
    long max_steps = 1000000;
    //! Permit densities below zero (the system as written can drive them
    //! negative); otherwise negatives beyond 1e-12 N_a0 are an error.
    bool allow_negative = false;
};

namespace detail
{
using Vec2 = std::array<double, 2>;

inline Vec2 kinetic_rhs(KineticModel const& m, Vec2 const& y)
{
    return {m.ionization_alpha * y[0] - m.restoration_beta * y[1] + m.decay_D,
            m.recombination_gamma * y[1] - m.ionization_alpha * y[0]};
}

inline Vec2 axpy(Vec2 y, double h, std::initializer_list<double> coeffs,
                 std::initializer_list<Vec2 const*> ks)
{
    auto c = coeffs.begin();
    for (auto const* k : ks)
    {
        y[0] += h * *c * (*k)[0];
        y[1] += h * *c * (*k)[1];
        ++c;
    }
    return y;
}
}  // namespace detail

/*!
 * Integrate the rate equations over [t0, t1] in t~ with an embedded
 * Dormand–Prince 5(4) pair.
 *
 * Returns the state at each requested output time (which must lie in the
 * span and be increasing); with no output times, every accepted step is
 * returned. The first entry is always the initial state.
 */
inline std::vector<KineticState>
integrate_kinetics(KineticModel const& model,
                   double na0,
                   double t0,
                   double t1,
                   KineticState const& init,
                   IntegratorOptions const& opts = {},
                   std::vector<double> const& output_times = {})
{
    using detail::Vec2;
    if (!std::isfinite(t0) || !std::isfinite(t1) || !(t1 >= t0))
        throw DomainError("pseudo-time span must be finite with t1 >= t0");
    if (!(na0 > 0))
        throw DomainError("initial atom density must be positive");
    if (!(init.atoms_Na >= 0) || !(init.ions_Ni >= 0))
        throw DomainError("initial densities must be non-negative");
    for (std::size_t i = 0; i < output_times.size(); ++i)
    {
        double t = output_times[i];
        if (t < t0 || t > t1 || (i > 0 && t <= output_times[i - 1]))
            throw DomainError("output times must be increasing within span");
    }

    // Dormand–Prince tableau
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                     a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                     e7 = -1.0 / 40;

    double const atol = opts.absolute_tolerance * na0;
    double const rtol = opts.relative_tolerance;
    double const negative_floor = -1e-12 * na0;

    std::vector<KineticState> out;
    out.push_back({init.atoms_Na, init.ions_Ni, t0});
    if (t1 == t0)
        return out;

    Vec2 y{init.atoms_Na, init.ions_Ni};
    double t = t0;
    double h = opts.initial_step > 0 ? opts.initial_step : (t1 - t0) * 1e-3;
    Vec2 k1 = detail::kinetic_rhs(model, y);
    std::size_t next_output = 0;
    while (next_output < output_times.size() && output_times[next_output] == t0)
        ++next_output;
    long steps = 0;

    while (t < t1)
    {
        if (++steps > opts.max_steps)
        {
            throw ComputationError("step_budget",
                                   "kinetic integration exceeded step budget");
        }
        // Land exactly on the next output time or the end of the span.
        double target = next_output < output_times.size()
                            ? output_times[next_output]
                            : t1;
        double hs = h;
        bool clipped = false;
        if (t + hs >= target)
        {
            hs = target - t;
            clipped = true;
        }
        double min_step = 1e-14 * std::max(std::abs(t), std::abs(t1 - t0));
        if (hs < min_step)
        {
            std::ostringstream os;
            os << "step size underflow at t~ = " << t << " (h = " << h
               << ", N_a = " << y[0] << ", N_i = " << y[1] << ")";
            throw ComputationError("stiffness", os.str());
        }

        Vec2 k2 = detail::kinetic_rhs(model, detail::axpy(y, hs, {a21}, {&k1}));
        Vec2 k3 = detail::kinetic_rhs(
            model, detail::axpy(y, hs, {a31, a32}, {&k1, &k2}));
        Vec2 k4 = detail::kinetic_rhs(
            model, detail::axpy(y, hs, {a41, a42, a43}, {&k1, &k2, &k3}));
        Vec2 k5 = detail::kinetic_rhs(
            model,
            detail::axpy(y, hs, {a51, a52, a53, a54}, {&k1, &k2, &k3, &k4}));
        Vec2 k6 = detail::kinetic_rhs(
            model,
            detail::axpy(
                y, hs, {a61, a62, a63, a64, a65}, {&k1, &k2, &k3, &k4, &k5}));
        Vec2 y5 = detail::axpy(
            y, hs, {b1, b3, b4, b5, b6}, {&k1, &k3, &k4, &k5, &k6});
        Vec2 k7 = detail::kinetic_rhs(model, y5);

        double err = 0;
        for (int i = 0; i < 2; ++i)
        {
            double ei = hs
                        * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i]
                           + e6 * k6[i] + e7 * k7[i]);
            double scale = atol
                           + rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(ei) / scale);
        }

        if (err <= 1)
        {
            t = clipped ? target : t + hs;
            y = y5;
            k1 = k7;
            for (auto& v : y)
            {
                if (v < 0 && !opts.allow_negative)
                {
                    if (v >= negative_floor)
                    {
                        v = 0;
                        continue;
                    }
                    std::ostringstream os;
                    os << "density went negative (" << v << ") at t~ = " << t;
                    throw ComputationError("integration_failure", os.str());
                }
            }
            if (output_times.empty())
            {
                out.push_back({y[0], y[1], t});
            }
            else if (clipped && next_output < output_times.size()
                     && t == output_times[next_output])
            {
                out.push_back({y[0], y[1], t});
                ++next_output;
            }
        }
        double factor = err == 0 ? 5.0
                                 : std::clamp(0.9 * std::pow(err, -0.2),
                                              0.2,
                                              5.0);
        if (clipped && err <= 1)
            h = std::max(h, hs * factor);
        else
            h = hs * factor;
    }
    if (!output_times.empty() && output_times.back() == t1
        && out.back().pseudo_time != t1)
    {
        out.push_back({y[0], y[1], t1});
    }
    return out;
}

//---------------------------------------------------------------------------//
// ION YIELD AND THRESHOLD
//---------------------------------------------------------------------------//
/*!
 * Photon count on the cloud as a function of intensity: either a constant
 * or the coupled law N(I) = sigma (I / (h nu c))^(2/3).
 */
class PhotonCountLaw
{
  public:
    static PhotonCountLaw constant(double n) { return {n, 0, 0}; }
    static PhotonCountLaw coupled(double sigma, double photon_energy)
    {
        if (!(sigma > 0) || !(photon_energy > 0))
            throw DomainError("coupled photon law needs sigma, h nu > 0");
        return {0, sigma, photon_energy};
    }

    bool is_coupled() const { return sigma_ > 0; }

    double operator()(double intensity) const
    {
        if (!is_coupled())
            return constant_;
        double n = photon_density(intensity, photon_energy_);
        double r = std::cbrt(n);
        return sigma_ * r * r;
    }

  private:
    PhotonCountLaw(double n, double sigma, double energy)
        : constant_(n), sigma_(sigma), photon_energy_(energy)
    {
    }
    double constant_;
    double sigma_;
    double photon_energy_;
};

//! N_i = C N_a0 N² I (1 - exp(-I_m / I)).
inline double ion_yield_curve(double na0,
                              PhotonCountLaw const& photons,
                              double balance_intensity,
                              double constant,
                              double intensity)
{
    if (!(intensity > 0) || !(balance_intensity > 0))
        throw DomainError("intensity and I_m must be positive");
    double n = photons(intensity);
    return constant * na0 * n * n * intensity
           * -std::expm1(-balance_intensity / intensity);
}

enum class ThresholdMode
{
    fixed_point,  //!< I on the right side is I_th itself
    external_intensity,  //!< I on the right side is a given operating point
};

struct ThresholdResult
{
    double intensity;
    int iterations;
};

/*!
 * Breakdown threshold I_th = (C / N_a0)(1 + exp(-I_m / I)).
 *
 * In fixed-point mode the equation is solved self-consistently with a
 * Newton-damped iteration (the map is a contraction with slope <= 1/e on
 * [C/N_a0, 2C/N_a0]).
 */
inline ThresholdResult threshold_intensity(
    double na0,
    double balance_intensity,
    double constant,
    ThresholdMode mode = ThresholdMode::fixed_point,
    double external_intensity = 0,
    double tolerance = 1e-10,
    int max_iterations = 50)
{
    if (!(na0 > 0) || !(balance_intensity > 0) || !(constant > 0))
        throw DomainError("threshold inputs must be positive");
    double const base = constant / na0;
    auto rhs = [&](double i) {
        return base * (1 + std::exp(-balance_intensity / i));
    };
    if (mode == ThresholdMode::external_intensity)
    {
        if (!(external_intensity > 0))
            throw DomainError("external intensity must be positive");
        return {rhs(external_intensity), 0};
    }

    double i = base * 1.5;
    for (int it = 1; it <= max_iterations; ++it)
    {
        double g = rhs(i);
        double slope = base * std::exp(-balance_intensity / i)
                       * balance_intensity / (i * i);
        double damping = slope < 1 ? 1 / (1 - slope) : 0.5;
        double next = i + damping * (g - i);
        if (!(next > 0))
            next = 0.5 * i;
        if (std::abs(next - i) <= tolerance * std::abs(next))
            return {next, it};
        i = next;
    }
    throw ComputationError("iteration_budget",
                           "threshold fixed point did not converge");
}

struct BreakdownThreshold
{
    double intensity;  //!< I_th = K t_b⁻²
    double field;  //!< E_th with I = eps0 c² E²
};

inline BreakdownThreshold breakdown_time_law(double constant, double t_b)
{
    if (!(t_b > 0))
        throw DomainError("breakdown time must be positive");
    if (!(constant >= 0))
        throw DomainError("breakdown constant must be non-negative");
    double i = constant / (t_b * t_b);
    double const c = codata.light_speed_c;
    return {i, std::sqrt(i / (codata.vacuum_permittivity_eps0 * c * c))};
}

}  // namespace photoion

// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/models.hpp
//! Photoionization rate models: multiphoton, effective photon, and the
//! anomalous (inerton cloud) model, plus photoemission from metals.
//---------------------------------------------------------------------------//
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include "cloud.hpp"
#include "error.hpp"
#include "units.hpp"

namespace photoion
{
//---------------------------------------------------------------------------//
// TARGETS AND BEAM
//---------------------------------------------------------------------------//
enum class PulseShape
{
    triangular,
    rectangular,
};

/*!
 * Laser pulse. A triangular pulse rises linearly from 0 to the peak over
 * [0, t_p] with t_p = duration / 2 and falls back to 0 at t = duration.
 */
struct LaserPulse
{
    double light_wavelength = 1.06e-6;
    double peak_intensity = 0;
    double duration_dt = 20e-9;
    PulseShape shape = PulseShape::triangular;

    double t_peak() const
    {
        return shape == PulseShape::triangular ? duration_dt / 2
                                               : duration_dt;
    }

    double intensity_at(double t) const
    {
        if (t < 0 || t > duration_dt)
            return 0;
        if (shape == PulseShape::rectangular)
            return peak_intensity;
        double tp = t_peak();
        return t <= tp ? peak_intensity * t / tp
                       : peak_intensity * (duration_dt - t) / tp;
    }

    void validate() const
    {
        if (!(light_wavelength > 0))
            throw DomainError("wavelength must be positive");
        if (!(peak_intensity >= 0))
            throw DomainError("peak intensity must be non-negative");
        if (!(duration_dt > 0))
            throw DomainError("pulse duration must be positive");
    }
};

struct GasTarget
{
    double atom_density_Na0 = 2.5e25;
    double ionization_potential_W = 15.76 * 1.602176634e-19;
    int nuclear_charge_Z = 1;
    double atom_radius_r = 1e-10;

    void validate() const
    {
        if (!(atom_density_Na0 > 0) || !(ionization_potential_W > 0)
            || !(atom_radius_r > 0))
        {
            throw DomainError("gas target parameters must be positive");
        }
        if (nuclear_charge_Z < 1)
            throw DomainError("nuclear charge must be >= 1");
    }
};

/*!
 * Metal with an intensity-dependent work function
 * W(I) = max(W0 - slope I, 0).
 */
struct MetalTarget
{
    double work_function_W0 = 6 * 1.602176634e-19;
    double work_function_slope = 0;
    double electron_density = 1e27;
    double correlation_gamma = 1;

    double work_function(double intensity) const
    {
        return std::max(work_function_W0 - work_function_slope * intensity,
                        0.0);
    }

    void validate() const
    {
        if (!(work_function_W0 > 0))
            throw DomainError("work function must be positive");
        if (!(work_function_slope >= 0))
            throw DomainError("work function slope must be non-negative");
        if (!(electron_density > 0) || !(correlation_gamma > 0))
            throw DomainError("electron density and gamma must be positive");
    }
};

//! An energy with a flag for results below the emission threshold.
struct EnergyBalance
{
    double energy;
    bool below_threshold;
};

//---------------------------------------------------------------------------//
// MULTIPHOTON
//---------------------------------------------------------------------------//
/*!
 * Generalized N-photon cross section s_N = 2 pi (8 pi alpha)^N r^(2N)
 * omega^(1-N) in m^(2N) s^(N-1), held as a natural log.
 */
struct GeneralizedCrossSection
{
    int order;
    double log_value;

    //! May underflow to zero for large orders.
    double value() const { return std::exp(log_value); }
};

inline GeneralizedCrossSection
generalized_cross_section(int order, double atom_radius, double omega)
{
    if (order < 1)
        throw DomainError("photon order must be >= 1");
    if (!(atom_radius > 0) || !(omega > 0))
        throw DomainError("atom radius and frequency must be positive");
    double const pi = std::numbers::pi;
    double n = order;
    double log_s = std::log(2 * pi)
                   + n * std::log(8 * pi * codata.fine_structure_alpha)
                   + 2 * n * std::log(atom_radius) + (1 - n) * std::log(omega);
    return {order, log_s};
}

//! A value that may be outside the double range; log is always valid.
struct LogScaled
{
    double log_value;
    double value;
    bool overflow;  //!< \c value is 0 or inf but \c log_value is exact
};

inline LogScaled from_log(double log_value)
{
    if (log_value == -std::numeric_limits<double>::infinity())
        return {log_value, 0.0, false};
    double v = std::exp(log_value);
    return {log_value, v, !std::isnormal(v)};
}

//! w_N = s_N Phi^N with the photon flux Phi in m⁻² s⁻¹.
inline LogScaled
multiphoton_rate(GeneralizedCrossSection const& s, double flux)
{
    if (!(flux >= 0) || !std::isfinite(flux))
        throw DomainError("photon flux must be finite and non-negative");
    if (flux == 0)
        return {-std::numeric_limits<double>::infinity(), 0.0, false};
    return from_log(s.log_value + s.order * std::log(flux));
}

//! E_c = (N + S) h nu - E_i, including S above-threshold photons.
inline EnergyBalance photoelectron_energy(int order,
                                          double photon_energy,
                                          double ionization_energy,
                                          int above_threshold = 0)
{
    if (order < 1 || above_threshold < 0)
        throw DomainError("photon counts must be N >= 1, S >= 0");
    if (!(photon_energy > 0) || !(ionization_energy > 0))
        throw DomainError("energies must be positive");
    double e = (order + above_threshold) * photon_energy - ionization_energy;
    return {e, e < 0};
}

//---------------------------------------------------------------------------//
// EFFECTIVE PHOTON
//---------------------------------------------------------------------------//
//! Default intensity map f(I) = I / (I + I_ref), bounded by 1.
struct SaturatingIntensityMap
{
    double reference_intensity = 1e16;

    double operator()(double intensity) const
    {
        return intensity / (intensity + reference_intensity);
    }
};

/*!
 * Photon energy renormalized by intensity, eps = h nu / (1 - beta f(I)).
 *
 * \c intensity_map must be monotone with f(0) = 0.
 */
struct EffectivePhotonModel
{
    double beta_nu = 0.9;
    std::function<double(double)> intensity_map = SaturatingIntensityMap{};
};

inline double effective_photon_energy(EffectivePhotonModel const& model,
                                      double photon_energy,
                                      double intensity)
{
    if (!(photon_energy > 0))
        throw DomainError("photon energy must be positive");
    if (!(intensity >= 0))
        throw DomainError("intensity must be non-negative");
    double x = model.beta_nu * model.intensity_map(intensity);
    if (!(x < 1))
    {
        std::ostringstream os;
        os << "effective photon pole: beta f(I) = " << x
           << " >= 1 at I = " << intensity << " W/m^2";
        throw DomainError(os.str(), "pole");
    }
    return photon_energy / (1 - x);
}

//---------------------------------------------------------------------------//
// ANOMALOUS PHOTOELECTRIC EFFECT
//---------------------------------------------------------------------------//
//! A_p² = I_p / (eps0 c² omega²).
inline double vector_potential_sq(double peak_intensity, double omega)
{
    if (!(omega > 0))
        throw DomainError("angular frequency must be positive");
    if (!(peak_intensity >= 0))
        throw DomainError("intensity must be non-negative");
    double const c = codata.light_speed_c;
    return peak_intensity
           / (codata.vacuum_permittivity_eps0 * c * c * omega * omega);
}

//! sin²θ cos²φ / (1 - v/c cos θ)⁴ for the ejected electron direction.
inline double angular_factor(double theta, double phi, double v)
{
    double const c = codata.light_speed_c;
    if (!(v >= 0 && v < c))
        throw DomainError("electron speed must satisfy 0 <= v < c",
                          "relativistic_domain");
    double s = std::sin(theta);
    double cp = std::cos(phi);
    double d = 1 - v / c * std::cos(theta);
    return s * s * cp * cp / (d * d * d * d);
}

struct MatrixElementInputs
{
    double free_momentum_p;
    double free_velocity_v;
    double theta = std::numbers::pi / 2;
    double phi = 0;
    double normalizing_volume_V = 1e-18;
    double angular_frequency_omega;
    int nuclear_charge_Z = 1;

    //! Inputs for an electron of speed v with p = m v.
    static MatrixElementInputs
    for_velocity(double v, double omega, double volume = 1e-18, int z = 1)
    {
        MatrixElementInputs inp;
        inp.free_momentum_p = codata.electron_mass_m * v;
        inp.free_velocity_v = v;
        inp.normalizing_volume_V = volume;
        inp.angular_frequency_omega = omega;
        inp.nuclear_charge_Z = z;
        return inp;
    }
};

/*!
 * Intensity-free bound-free kernel |𝓜|², defined so that |M|² = |𝓜|² I_p:
 *
 *   16 pi e² ħ² / (eps0 c² omega² m² V) (Z/a0)⁵ (ħ/p)⁶ × angular factor.
 */
inline double matrix_element_sq(MatrixElementInputs const& inp)
{
    double const c = codata.light_speed_c;
    double const m = codata.electron_mass_m;
    double const hbar = codata.hbar;
    double const e = codata.electron_charge_e;
    if (!(inp.free_momentum_p > 0))
    {
        throw DomainError("free-electron momentum must be positive: "
                          "(hbar/p)^6 diverges",
                          "singularity");
    }
    if (!(inp.free_velocity_v < c))
        throw DomainError("free electron speed must be below c",
                          "relativistic_domain");
    double rel = std::abs(inp.free_momentum_p - m * inp.free_velocity_v)
                 / inp.free_momentum_p;
    if (rel > 1e-9)
        throw DomainError("inconsistent free electron: |p| != m v");
    if (!(inp.normalizing_volume_V > 0) || !(inp.angular_frequency_omega > 0)
        || inp.nuclear_charge_Z < 1)
    {
        throw DomainError("volume, frequency and charge must be positive");
    }

    double const omega = inp.angular_frequency_omega;
    double prefactor = 16 * std::numbers::pi * e * e * hbar * hbar
                       / (codata.vacuum_permittivity_eps0 * c * c * omega
                          * omega * m * m * inp.normalizing_volume_V);
    double charge = std::pow(inp.nuclear_charge_Z / codata.bohr_radius, 5);
    double momentum = std::pow(hbar / inp.free_momentum_p, 6);
    return prefactor * charge * momentum
           * angular_factor(inp.theta, inp.phi, inp.free_velocity_v);
}

/*!
 * |∫₀ᵗ N(τ) exp(iΔτ) dτ|² for the linear photon ramp N(τ) = N_th τ / t_p.
 *
 * Evaluated as Re² + Im² of the closed-form integral using 1 - cos x =
 * 2 sin²(x/2), which avoids the cancellation of the expanded form. Below
 * |Δt| = 1e-3 the two-term series K² t⁴/4 (1 - (Δt)²/18) is used.
 */
inline double pulse_integral_exact(double n_threshold,
                                   double t_peak,
                                   double delta_omega,
                                   double t)
{
    if (!(n_threshold > 0) || !(t_peak > 0))
        throw DomainError("threshold photon number and t_p must be positive");
    if (!(t >= 0 && t <= t_peak))
        throw DomainError("time must lie in [0, t_p]", "ramp_domain");
    double const k = n_threshold / t_peak;
    double const x = delta_omega * t;
    if (std::abs(x) < 1e-3)
    {
        double t2 = t * t;
        return k * k * t2 * t2 / 4 * (1 - x * x / 18);
    }
    double half = std::sin(x / 2);
    double re = x * std::sin(x) - 2 * half * half;
    double im = std::sin(x) - x * std::cos(x);
    double d2 = delta_omega * delta_omega;
    return k * k * (re * re + im * im) / (d2 * d2);
}

/*!
 * Large-Δt limit of pulse_integral_exact: (N_th / (Δ t_p))² t².
 *
 * Refuses Δt < 10, where the exact closed form or its series must be used.
 */
inline double pulse_integral_asymptotic(double n_threshold,
                                        double t_peak,
                                        double delta_omega,
                                        double t)
{
    if (!(n_threshold > 0) || !(t_peak > 0))
        throw DomainError("threshold photon number and t_p must be positive");
    if (!(delta_omega * t >= 10))
    {
        throw DomainError("asymptotic pulse integral requires delta*t >= 10; "
                          "use pulse_integral_exact (closed form or "
                          "resonance series)",
                          "validity");
    }
    double r = n_threshold / (delta_omega * t_peak);
    return r * r * t * t;
}

/*!
 * Ionization probability on the rising edge of a triangular pulse,
 * P(t) = |𝓜|² (ħ N_th / (W t_p))² I_p t², with ω_fl replaced by W/ħ.
 *
 * Restricted to t <= t_p / 10. Throws PerturbationBreakdown if P > 1.
 */
inline double ionization_probability_ramp(double m2,
                                          double n_threshold,
                                          double work,
                                          double t_peak,
                                          double peak_intensity,
                                          double t)
{
    if (!(m2 >= 0) || !(n_threshold > 0) || !(work > 0) || !(t_peak > 0)
        || !(peak_intensity >= 0))
    {
        throw DomainError("ramp probability inputs must be positive");
    }
    if (!(t >= 0 && t <= t_peak / 10))
    {
        throw DomainError("ramp probability needs 0 <= t <= t_p/10",
                          "validity");
    }
    double r = codata.hbar * n_threshold / (work * t_peak);
    double p = m2 * r * r * peak_intensity * t * t;
    if (p > 1)
    {
        std::ostringstream os;
        os << "ramp probability " << p << " exceeds 1 at t = " << t << " s";
        throw PerturbationBreakdown(os.str());
    }
    return p;
}

/*!
 * Coupling energy of the strong-coupling operator,
 * W_eff = (e |p| / m) A N with A = sqrt(I / (eps0 c² ω²)).
 *
 * A is the classical field amplitude of the beam at intensity I; the
 * photon count enters linearly.
 */
inline double effective_coupling_energy(double intensity,
                                        double photon_count,
                                        double momentum,
                                        double omega)
{
    if (!(intensity >= 0) || !(photon_count >= 0) || !(momentum >= 0))
        throw DomainError("coupling inputs must be non-negative");
    double a = std::sqrt(vector_potential_sq(intensity, omega));
    return codata.electron_charge_e * momentum / codata.electron_mass_m * a
           * photon_count;
}

//! Requires W > margin × W_eff for the golden-rule probability.
struct PerturbationGuard
{
    double work;
    double omega;
    double margin = 10;
};

/*!
 * Golden-rule probability for a constant-intensity pulse,
 * P0 = (2π/ħ) |𝓜|² N² I V m |p| Δt dΩ.
 *
 * dΩ is the solid-angle element the caller integrates over.
 */
inline double
ionization_probability_flat(double m2,
                            double photon_count,
                            double intensity,
                            double volume,
                            double momentum,
                            double duration,
                            double solid_angle,
                            std::optional<PerturbationGuard> guard = {})
{
    if (!(m2 >= 0) || !(photon_count >= 0) || !(intensity >= 0)
        || !(volume > 0) || !(momentum > 0) || !(duration > 0)
        || !(solid_angle >= 0))
    {
        throw DomainError("flat-pulse probability inputs must be positive");
    }
    if (guard)
    {
        double w_eff = effective_coupling_energy(
            intensity, photon_count, momentum, guard->omega);
        if (!(guard->work > guard->margin * w_eff))
        {
            std::ostringstream os;
            os << "coupling energy " << w_eff << " J is not small against W = "
               << guard->work << " J";
            throw PerturbationBreakdown(os.str());
        }
    }
    double p = 2 * std::numbers::pi / codata.hbar * m2 * photon_count
               * photon_count * intensity * volume * codata.electron_mass_m
               * momentum * duration * solid_angle;
    if (p > 1)
    {
        std::ostringstream os;
        os << "flat-pulse probability " << p << " exceeds 1";
        throw PerturbationBreakdown(os.str());
    }
    return p;
}

/*!
 * Midpoint-rule integral of f(θ, φ) sin θ over the full sphere.
 */
template<class F>
double integrate_full_sphere(F&& f, int n_theta = 400, int n_phi = 400)
{
    double const pi = std::numbers::pi;
    double dt = pi / n_theta;
    double dp = 2 * pi / n_phi;
    double sum = 0;
    for (int i = 0; i < n_theta; ++i)
    {
        double theta = (i + 0.5) * dt;
        double st = std::sin(theta);
        for (int j = 0; j < n_phi; ++j)
        {
            sum += f(theta, (j + 0.5) * dp) * st;
        }
    }
    return sum * dt * dp;
}

inline double ion_concentration(double atom_density, double probability)
{
    if (!(probability >= 0 && probability <= 1))
        throw DomainError("probability must lie in [0, 1]");
    if (!(atom_density >= 0))
        throw DomainError("atom density must be non-negative");
    return atom_density * probability;
}

//---------------------------------------------------------------------------//
// METALS
//---------------------------------------------------------------------------//
/*!
 * Emission probability kernel P0 = const (sigma n^(2/3) F)² I.
 *
 * \c constant is a calibration parameter.
 */
inline double metal_emission_probability(double sigma,
                                         double density,
                                         double correlation,
                                         double intensity,
                                         double constant = 1)
{
    if (!(correlation >= 0))
        throw DomainError("correlation factor must be non-negative");
    if (!(intensity >= 0))
        throw DomainError("intensity must be non-negative");
    double n = photons_on_cloud(sigma, density) * correlation;
    return constant * n * n * intensity;
}

//! eps_max = N h nu - W(I).
inline EnergyBalance max_electron_energy(double photon_count,
                                         double photon_energy,
                                         MetalTarget const& metal,
                                         double intensity)
{
    if (!(photon_count >= 1))
        throw DomainError("photon count must be >= 1");
    if (!(photon_energy > 0))
        throw DomainError("photon energy must be positive");
    double e = photon_count * photon_energy - metal.work_function(intensity);
    return {e, e < 0};
}

}  // namespace photoion

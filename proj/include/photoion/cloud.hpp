// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/cloud.hpp
//! Geometry of the inerton cloud around a moving electron and the number of
//! photons it intercepts.
//---------------------------------------------------------------------------//
#pragma once

#include <cmath>
#include <numbers>
#include <optional>

#include "error.hpp"
#include "units.hpp"

namespace photoion
{
//---------------------------------------------------------------------------//
/*!
 * Matter-wave lengths of an electron moving at v0.
 *
 * The cloud amplitude is Lambda = lambda c / v0 and the cloud radius is
 * Lambda / pi.
 */
struct ParticleKinematics
{
    double velocity_v0;
    double mass;
    double de_broglie_lambda;
    double inerton_amplitude_Lambda;
    double cloud_radius;
};

inline ParticleKinematics
derive_kinematics(double v0, double mass = codata.electron_mass_m)
{
    double const c = codata.light_speed_c;
    if (!(v0 > 0))
    {
        throw DomainError("velocity must be positive: cloud amplitude "
                          "diverges as v0 -> 0",
                          "degenerate_velocity");
    }
    if (!(v0 < c))
        throw DomainError("velocity must be below c", "relativistic_domain");
    if (!(mass > 0))
        throw DomainError("mass must be positive");

    ParticleKinematics k;
    k.velocity_v0 = v0;
    k.mass = mass;
    k.de_broglie_lambda = codata.planck_h / (mass * v0);
    k.inerton_amplitude_Lambda = k.de_broglie_lambda * c / v0;
    k.cloud_radius = k.inerton_amplitude_Lambda / std::numbers::pi;
    return k;
}

//---------------------------------------------------------------------------//
/*!
 * Admissible capture cross sections, lambda²/(4 pi) < sigma < Lambda²/pi.
 *
 * The working value defaults to the geometric mean of the bounds.
 */
struct CrossSectionWindow
{
    double sigma_lower;
    double sigma_upper;
    double sigma_chosen;

    bool contains(double sigma) const
    {
        return sigma >= sigma_lower && sigma <= sigma_upper;
    }

    //! Copy with an explicit working cross section.
    CrossSectionWindow with_chosen(double sigma) const
    {
        if (!contains(sigma))
        {
            throw DomainError("cross section outside the admissible window",
                              "cross_section_window");
        }
        auto result = *this;
        result.sigma_chosen = sigma;
        return result;
    }
};

inline CrossSectionWindow cross_section_bounds(ParticleKinematics const& k)
{
    double const pi = std::numbers::pi;
    CrossSectionWindow w;
    w.sigma_lower = k.de_broglie_lambda * k.de_broglie_lambda / (4 * pi);
    w.sigma_upper = k.inerton_amplitude_Lambda * k.inerton_amplitude_Lambda
                    / pi;
    w.sigma_chosen = std::sqrt(w.sigma_lower * w.sigma_upper);
    return w;
}

//! N = sigma n^(2/3), the number of photons on the cloud (not rounded).
inline double photons_on_cloud(double sigma, double density)
{
    if (!(sigma > 0))
        throw DomainError("cross section must be positive");
    if (!(density >= 0))
        throw DomainError("photon density must be non-negative");
    double cube_root = std::cbrt(density);
    return sigma * cube_root * cube_root;
}

struct ThresholdPhotonNumber
{
    double value;  //!< W / h nu
    long ceiling;  //!< smallest integer >= value
};

inline ThresholdPhotonNumber
threshold_photon_number(double work, double photon_energy)
{
    if (!(work > 0) || !(photon_energy > 0))
        throw DomainError("work and photon energy must be positive");
    double n = work / photon_energy;
    return {n, static_cast<long>(std::ceil(n))};
}

/*!
 * Photons absorbed on the rising edge of a triangular pulse,
 * N(t) = N_th t / t_p, valid for 0 <= t <= t_p only.
 */
inline double ramp_photon_number(double n_threshold, double t, double t_peak)
{
    if (!(t_peak > 0))
        throw DomainError("pulse peak time must be positive");
    if (!(t >= 0 && t <= t_peak))
        throw DomainError("ramp is defined on [0, t_p] only", "ramp_domain");
    return n_threshold * t / t_peak;
}

//! Which length enters the correlation factor.
enum class CorrelationLength
{
    amplitude,  //!< Lambda
    radius,  //!< Lambda / pi
};

/*!
 * Metal-electron correlation factor F = (Lambda n_elec^(1/3))^gamma.
 *
 * \c length is the full amplitude Lambda unless \c which says the supplied
 * value should be divided by pi first.
 */
inline double correlation_factor(double length,
                                 double electron_density,
                                 double gamma,
                                 CorrelationLength which
                                 = CorrelationLength::amplitude)
{
    if (!(gamma > 0))
        throw DomainError("correlation exponent must be positive");
    if (!(length > 0) || !(electron_density > 0))
        throw DomainError("length and electron density must be positive");
    double l = which == CorrelationLength::radius ? length / std::numbers::pi
                                                  : length;
    return std::pow(l * std::cbrt(electron_density), gamma);
}

}  // namespace photoion

// SPDX-License-Identifier: Apache-2.0
//! \file samples/cloud_walkthrough.cpp
//! Cloud geometry and anomalous-model probabilities for a 1.06 um beam on
//! helium-like gas.
#include <cmath>
#include <cstdio>

#include <photoion/cloud.hpp>
#include <photoion/models.hpp>
#include <photoion/units.hpp>

using namespace photoion;

int main()
{
    auto light = photon_from_wavelength(1.06e-6);
    auto k = derive_kinematics(2e6);
    auto window = cross_section_bounds(k);
    double intensity = w_per_cm2_to_si(1e12);
    double n = photon_density(intensity, light.energy);
    double work = ev_to_joule(15.76);
    auto th = threshold_photon_number(work, light.energy);

    std::printf("lambda        %.4g nm\n", k.de_broglie_lambda * 1e9);
    std::printf("Lambda/pi     %.4g nm\n", k.cloud_radius * 1e9);
    std::printf("sigma window  [%.3g, %.3g] m^2\n",
                window.sigma_lower,
                window.sigma_upper);
    std::printf("N on cloud    %.4g\n", photons_on_cloud(window.sigma_chosen, n));
    std::printf("ceil N_th     %ld\n", th.ceiling);

    LaserPulse pulse;
    pulse.peak_intensity = intensity;
    double excess = th.ceiling * light.energy - work;
    double v_free = std::sqrt(2 * excess / codata.electron_mass_m);
    double m2 = matrix_element_sq(
        MatrixElementInputs::for_velocity(v_free, light.angular_frequency));
    for (double frac : {0.01, 0.05, 0.1})
    {
        double t = frac * pulse.t_peak();
        double p = ionization_probability_ramp(
            m2, th.value, work, pulse.t_peak(), intensity, t);
        std::printf("P(t = %.2g s) = %.4g\n", t, p);
    }
    return 0;
}

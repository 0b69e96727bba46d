// SPDX-License-Identifier: Apache-2.0
//! \file samples/ion_yield_fit.cpp
//! Generate a noisy ion-yield curve and recover A N^2 and I_m.
#include <cstdio>

#include <photoion/analysis.hpp>
#include <photoion/kinetics.hpp>

using namespace photoion;

int main()
{
    double const im = 3e15;
    auto law = PhotonCountLaw::constant(4);
    auto xs = log_grid(1e13, 1e18, 40);
    auto clean = Series::sample(
        [&](double i) { return ion_yield_curve(1e20, law, im, 1e-30, i); },
        xs);
    auto noisy = add_lognormal_noise(clean, 0.05, 20240611);

    IonYieldFitOptions opts;
    opts.photon_count = 4;
    auto fit = fit_ion_yield(noisy, opts);
    std::printf("converged %s after %d iterations\n",
                fit.converged ? "yes" : "no",
                fit.iterations);
    for (std::size_t i = 0; i < fit.values.size(); ++i)
    {
        std::printf("%-18s %.6g +- %.2g\n",
                    fit.parameter_names[i].c_str(),
                    fit.values[i],
                    fit.standard_errors[i]);
    }
    if (auto knee = inflection_point(clean))
        std::printf("knee at %.3g W/m^2 (I_m = %.3g)\n", *knee, im);
    return 0;
}

// SPDX-License-Identifier: Apache-2.0
//! \file tests/test_models.cpp
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <photoion/models.hpp>

using namespace photoion;

namespace
{
double rel(double a, double b)
{
    return std::abs(a - b) / std::abs(b);
}

double const hv = photon_energy(1.06e-6);
double const omega = photon_from_wavelength(1.06e-6).angular_frequency;

//! Composite Simpson for |int_0^t (K tau) exp(i D tau) dtau|^2.
double simpson_pulse(double k, double d, double t, long panels)
{
    if (panels % 2)
        ++panels;
    long double h = static_cast<long double>(t) / panels;
    long double re = 0, im = 0;
    for (long i = 0; i <= panels; ++i)
    {
        long double tau = h * i;
        long double w = (i == 0 || i == panels) ? 1 : (i % 2 ? 4 : 2);
        re += w * k * tau * std::cos(static_cast<long double>(d) * tau);
        im += w * k * tau * std::sin(static_cast<long double>(d) * tau);
    }
    re *= h / 3;
    im *= h / 3;
    return static_cast<double>(re * re + im * im);
}
}  // namespace

TEST(Pulse, TriangleShape)
{
    LaserPulse p;
    p.peak_intensity = 4;
    p.duration_dt = 2;
    EXPECT_DOUBLE_EQ(p.t_peak(), 1);
    EXPECT_DOUBLE_EQ(p.intensity_at(0.5), 2);
    EXPECT_DOUBLE_EQ(p.intensity_at(1.5), 2);
    EXPECT_DOUBLE_EQ(p.intensity_at(3), 0);
    p.shape = PulseShape::rectangular;
    EXPECT_DOUBLE_EQ(p.intensity_at(1.5), 4);
    p.duration_dt = 0;
    EXPECT_THROW(p.validate(), DomainError);
}

TEST(Multiphoton, CrossSectionMatchesDirectProduct)
{
    // s_N = 2 pi (8 pi alpha)^N r^(2N) omega^(1-N), evaluated naively for
    // small orders where no underflow occurs.
    double const r = 1e-10;
    for (int n = 1; n <= 6; ++n)
    {
        double direct = 2 * std::numbers::pi
                        * std::pow(8 * std::numbers::pi
                                       * codata.fine_structure_alpha,
                                   n)
                        * std::pow(r, 2 * n) * std::pow(omega, 1 - n);
        auto s = generalized_cross_section(n, r, omega);
        EXPECT_LT(rel(s.value(), direct), 1e-12) << n;
        EXPECT_EQ(s.order, n);
    }
    EXPECT_THROW(generalized_cross_section(0, r, omega), DomainError);
}

TEST(Multiphoton, RateSlopeIsOrder)
{
    for (int n : {1, 2, 5, 14, 22, 40})
    {
        auto s = generalized_cross_section(n, 1e-10, omega);
        double f1 = intensity_to_flux(1e14, hv);
        double f2 = intensity_to_flux(1e16, hv);
        auto w1 = multiphoton_rate(s, f1);
        auto w2 = multiphoton_rate(s, f2);
        double slope = (w2.log_value - w1.log_value) / std::log(100.0);
        EXPECT_NEAR(slope, n, 1e-12 * n);
    }
}

TEST(Multiphoton, LogSpaceSurvivesUnderflow)
{
    auto s = generalized_cross_section(14, 1e-10, omega);
    // s_14 itself is below the smallest double.
    EXPECT_EQ(s.value(), 0.0);
    EXPECT_TRUE(std::isfinite(s.log_value));
    auto tiny = multiphoton_rate(s, 1.0);
    EXPECT_TRUE(tiny.overflow);
    EXPECT_DOUBLE_EQ(tiny.log_value, s.log_value);
    auto w = multiphoton_rate(s, intensity_to_flux(1e16, hv));
    EXPECT_FALSE(w.overflow);
    EXPECT_GT(w.value, 0);
    auto zero = multiphoton_rate(s, 0);
    EXPECT_EQ(zero.value, 0);
    EXPECT_FALSE(zero.overflow);
}

TEST(Multiphoton, PhotoelectronEnergy)
{
    auto e = photoelectron_energy(14, hv, ev_to_joule(15.76));
    EXPECT_NEAR(joule_to_ev(e.energy), 14 * 1.16966224937 - 15.76, 1e-9);
    EXPECT_FALSE(e.below_threshold);
    auto below = photoelectron_energy(13, hv, ev_to_joule(15.76));
    EXPECT_TRUE(below.below_threshold);
    auto ati = photoelectron_energy(14, hv, ev_to_joule(15.76), 2);
    EXPECT_NEAR(ati.energy - e.energy, 2 * hv, 1e-30);
    EXPECT_THROW(photoelectron_energy(14, hv, ev_to_joule(15.76), -1),
                 DomainError);
}

TEST(EffectivePhoton, LimitsAndMonotonicity)
{
    EffectivePhotonModel m;
    EXPECT_DOUBLE_EQ(effective_photon_energy(m, hv, 0), hv);
    double prev = hv;
    for (double i = 1e10; i < 1e22; i *= 3)
    {
        double e = effective_photon_energy(m, hv, i);
        EXPECT_GT(e, prev);
        prev = e;
    }
    // f -> 1 gives eps -> h nu / (1 - beta).
    EXPECT_LT(rel(effective_photon_energy(m, hv, 1e40), hv / 0.1), 1e-9);
    m.beta_nu = 0;
    EXPECT_DOUBLE_EQ(effective_photon_energy(m, hv, 1e18), hv);
}

TEST(EffectivePhoton, Pole)
{
    EffectivePhotonModel m;
    m.beta_nu = 1;
    m.intensity_map = [](double i) { return i / 1e16; };
    EXPECT_NEAR(effective_photon_energy(m, hv, 5e15), 2 * hv, 1e-30);
    try
    {
        effective_photon_energy(m, hv, 1e16);
        FAIL();
    }
    catch (DomainError const& e)
    {
        EXPECT_EQ(e.code(), "pole");
        EXPECT_NE(std::string(e.what()).find("1e+16"), std::string::npos);
    }
}

TEST(Anomalous, VectorPotential)
{
    double a2 = vector_potential_sq(1e16, omega);
    double c = codata.light_speed_c;
    EXPECT_LT(rel(a2, 1e16 / (codata.vacuum_permittivity_eps0 * c * c
                              * omega * omega)),
              1e-15);
    EXPECT_LT(rel(vector_potential_sq(2e16, omega), 2 * a2), 1e-15);
}

TEST(Anomalous, AngularFactor)
{
    EXPECT_DOUBLE_EQ(angular_factor(std::numbers::pi / 2, 0, 1e6), 1);
    EXPECT_NEAR(angular_factor(std::numbers::pi / 2, std::numbers::pi / 2, 1e6),
                0, 1e-30);
    EXPECT_THROW(angular_factor(1, 0, codata.light_speed_c), DomainError);
}

TEST(Anomalous, MatrixElementRegression)
{
    // Frozen from 30-digit evaluation of the kernel formula.
    auto inp = MatrixElementInputs::for_velocity(5.93e5, 1.777e15, 1e-18, 1);
    EXPECT_LT(rel(matrix_element_sq(inp), 9.180982299350273e-70), 1e-12);
}

TEST(Anomalous, MatrixElementScaling)
{
    auto base = MatrixElementInputs::for_velocity(1e6, omega);
    double m0 = matrix_element_sq(base);
    auto z2 = base;
    z2.nuclear_charge_Z = 2;
    EXPECT_LT(rel(matrix_element_sq(z2), 32 * m0), 1e-14);
    auto v2 = MatrixElementInputs::for_velocity(2e6, omega);
    // (hbar/p)^6 gives 1/64; the angular factor at theta = pi/2 is 1.
    EXPECT_LT(rel(matrix_element_sq(v2), m0 / 64), 1e-14);
    auto vol = base;
    vol.normalizing_volume_V *= 10;
    EXPECT_LT(rel(matrix_element_sq(vol), m0 / 10), 1e-14);
}

TEST(Anomalous, MatrixElementErrors)
{
    auto inp = MatrixElementInputs::for_velocity(1e6, omega);
    inp.free_momentum_p = 0;
    inp.free_velocity_v = 0;
    try
    {
        matrix_element_sq(inp);
        FAIL();
    }
    catch (DomainError const& e)
    {
        EXPECT_EQ(e.code(), "singularity");
    }
    auto bad = MatrixElementInputs::for_velocity(1e6, omega);
    bad.free_momentum_p *= 1.01;
    EXPECT_THROW(matrix_element_sq(bad), DomainError);
}

TEST(PulseIntegral, KnownValue)
{
    EXPECT_NEAR(pulse_integral_exact(1, 1, 10, 1), 0.011455856527594, 1e-14);
}

TEST(PulseIntegral, ClosedFormMatchesSimpson)
{
    for (double d : {0.0, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0, 1e3})
    {
        for (double t : {1e-3, 1e-2, 0.1, 0.5, 1.0})
        {
            double x = d * t;
            long panels = 10000 * std::max(1L, static_cast<long>(std::ceil(x / 10)));
            double ref = simpson_pulse(14, d, t, panels);
            double got = pulse_integral_exact(14, 1, d, t);
            EXPECT_LT(rel(got, ref), 1e-8) << "d=" << d << " t=" << t;
        }
    }
}

TEST(PulseIntegral, SeriesAndClosedFormAgreeAtSwitch)
{
    // Either side of |x| = 1e-3 the two branches agree.
    double t = 1;
    double below = pulse_integral_exact(1, 1, 0.999999e-3, t);
    double above = pulse_integral_exact(1, 1, 1.000001e-3, t);
    EXPECT_LT(rel(below, above), 1e-9);
}

TEST(PulseIntegral, AsymptoticBound)
{
    for (double x = 100; x <= 1e6; x *= 1.37)
    {
        double exact = pulse_integral_exact(3, 1, x, 1);
        double asym = pulse_integral_asymptotic(3, 1, x, 1);
        EXPECT_LT(std::abs(asym - exact) / exact, 2.5 / x) << x;
    }
    try
    {
        pulse_integral_asymptotic(3, 1, 5, 1);
        FAIL();
    }
    catch (DomainError const& e)
    {
        EXPECT_EQ(e.code(), "validity");
    }
}

TEST(RampProbability, QuadraticInTimeLinearInIntensity)
{
    double m2 = 1e-69, w = ev_to_joule(15.76), tp = 1e-8;
    double p = ionization_probability_ramp(m2, 13.47, w, tp, 1e16, 1e-10);
    EXPECT_LT(rel(ionization_probability_ramp(m2, 13.47, w, tp, 1e16, 2e-10),
                  4 * p),
              1e-14);
    EXPECT_LT(rel(ionization_probability_ramp(m2, 13.47, w, tp, 3e16, 1e-10),
                  3 * p),
              1e-14);
    double r = codata.hbar * 13.47 / (w * tp);
    EXPECT_LT(rel(p, m2 * r * r * 1e16 * 1e-20), 1e-14);
}

TEST(RampProbability, Guards)
{
    double w = ev_to_joule(15.76);
    try
    {
        ionization_probability_ramp(1e-69, 13.47, w, 1e-8, 1e16, 2e-9);
        FAIL();
    }
    catch (DomainError const& e)
    {
        EXPECT_EQ(e.code(), "validity");
    }
    try
    {
        ionization_probability_ramp(1e30, 13.47, w, 1e-8, 1e16, 1e-9);
        FAIL();
    }
    catch (PerturbationBreakdown const& e)
    {
        EXPECT_EQ(e.code(), "perturbation_breakdown");
        EXPECT_EQ(e.exit_code(), 2);
    }
}

TEST(FlatProbability, GoldenRuleAndGuard)
{
    double m2 = 1e-69, p = codata.electron_mass_m * 1e6;
    double p0 = ionization_probability_flat(m2, 2, 1e16, 1e-18, p, 2e-8, 1);
    double expect = 2 * std::numbers::pi / codata.hbar * m2 * 4 * 1e16 * 1e-18
                    * codata.electron_mass_m * p * 2e-8;
    EXPECT_LT(rel(p0, expect), 1e-14);
    // N^2 scaling
    EXPECT_LT(rel(ionization_probability_flat(m2, 4, 1e16, 1e-18, p, 2e-8, 1),
                  4 * p0),
              1e-14);
    PerturbationGuard strict{1e-30, omega};
    EXPECT_THROW(ionization_probability_flat(m2, 2, 1e16, 1e-18, p, 2e-8, 1,
                                             strict),
                 PerturbationBreakdown);
    PerturbationGuard loose{ev_to_joule(15.76), omega};
    EXPECT_NO_THROW(ionization_probability_flat(m2, 2, 1e16, 1e-18, p, 2e-8,
                                                1, loose));
}

TEST(Coupling, EnergyScaling)
{
    double p = codata.electron_mass_m * 2e6;
    double w = effective_coupling_energy(1e10, 1, p, omega);
    EXPECT_LT(rel(w, 2.0214e-26), 1e-4);
    EXPECT_LT(rel(effective_coupling_energy(4e10, 1, p, omega), 2 * w), 1e-14);
    EXPECT_LT(rel(effective_coupling_energy(1e10, 3, p, omega), 3 * w), 1e-14);
}

TEST(Sphere, IntegratesAngularFactor)
{
    // int sin^2(theta) cos^2(phi) sin(theta) = (4/3) pi in the v -> 0 limit.
    double got = integrate_full_sphere(
        [](double th, double ph) { return angular_factor(th, ph, 0); });
    EXPECT_NEAR(got, 4.0 * std::numbers::pi / 3, 1e-4);
    double area = integrate_full_sphere([](double, double) { return 1.0; });
    EXPECT_NEAR(area, 4 * std::numbers::pi, 1e-4);
}

TEST(Ions, Concentration)
{
    EXPECT_DOUBLE_EQ(ion_concentration(2.5e25, 0.5), 1.25e25);
    EXPECT_THROW(ion_concentration(1, 1.5), DomainError);
}

TEST(Metal, EmissionAndEnergy)
{
    MetalTarget metal;
    auto e = max_electron_energy(6, ev_to_joule(1.1697), metal, 0);
    EXPECT_NEAR(joule_to_ev(e.energy), 1.0182, 1e-9);
    metal.work_function_slope = ev_to_joule(1) / 1e16;
    EXPECT_NEAR(metal.work_function(1e16), ev_to_joule(5), 1e-30);
    EXPECT_EQ(metal.work_function(1e30), 0);

    double s = 1e-18, n = 1e26;
    EXPECT_DOUBLE_EQ(metal_emission_probability(s, n, 1, 1e10),
                     std::pow(photons_on_cloud(s, n), 2) * 1e10);
    EXPECT_LT(rel(metal_emission_probability(s, n, 2, 1e10),
                  4 * metal_emission_probability(s, n, 1, 1e10)),
              1e-15);
}

// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file photoion/units.hpp
//! Physical constants, unit vocabulary, and light-beam transforms.
//!
//! Everything inside the library is SI. CGS-style inputs (W/cm², cm⁻³) are
//! converted when a Quantity is parsed or constructed at the boundary.
//---------------------------------------------------------------------------//
#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"

namespace photoion
{
//---------------------------------------------------------------------------//
/*!
 * CODATA 2018 values, exact where the SI defines them.
 */
struct PhysicalConstants
{
    double planck_h = 6.62607015e-34;  // J s (exact)
    double hbar = 6.62607015e-34 / (2 * std::numbers::pi);  // J s
    double light_speed_c = 299792458.0;  // m/s (exact)
    double electron_charge_e = 1.602176634e-19;  // C (exact)
    double electron_mass_m = 9.1093837015e-31;  // kg
    double vacuum_permittivity_eps0 = 8.8541878128e-12;  // F/m
    double bohr_radius = 5.29177210903e-11;  // m
    double fine_structure_alpha = 7.2973525693e-3;
};

inline constexpr PhysicalConstants codata{};

//---------------------------------------------------------------------------//
// UNITS
//---------------------------------------------------------------------------//
enum class Dimension
{
    dimensionless,
    length,
    time,
    energy,
    intensity,
    number_density,
    flux,
    frequency,
    angular_frequency,
};

//! Fixed unit vocabulary for configs, CSV headers and the command line.
enum class Unit
{
    m,
    nm,
    um,
    s,
    J,
    eV,
    W_per_m2,
    W_per_cm2,
    per_m3,
    per_cm3,
    none,
};

namespace detail
{
struct UnitInfo
{
    Unit unit;
    std::string_view tag;
    Dimension dim;
    double to_si;
};

inline constexpr std::array<UnitInfo, 11> unit_table{{
    {Unit::m, "m", Dimension::length, 1.0},
    {Unit::nm, "nm", Dimension::length, 1e-9},
    {Unit::um, "um", Dimension::length, 1e-6},
    {Unit::s, "s", Dimension::time, 1.0},
    {Unit::J, "J", Dimension::energy, 1.0},
    {Unit::eV, "eV", Dimension::energy, 1.602176634e-19},
    {Unit::W_per_m2, "W_per_m2", Dimension::intensity, 1.0},
    {Unit::W_per_cm2, "W_per_cm2", Dimension::intensity, 1e4},
    {Unit::per_m3, "per_m3", Dimension::number_density, 1.0},
    {Unit::per_cm3, "per_cm3", Dimension::number_density, 1e6},
    {Unit::none, "", Dimension::dimensionless, 1.0},
}};

inline constexpr UnitInfo const& info(Unit u)
{
    for (auto const& row : unit_table)
    {
        if (row.unit == u)
            return row;
    }
    return unit_table.back();
}
}  // namespace detail

inline constexpr std::string_view unit_tag(Unit u)
{
    return detail::info(u).tag;
}
inline constexpr Dimension unit_dimension(Unit u)
{
    return detail::info(u).dim;
}
//! Multiplier taking a value in \c u to SI.
inline constexpr double unit_scale(Unit u)
{
    return detail::info(u).to_si;
}

inline std::optional<Unit> parse_unit(std::string_view tag)
{
    for (auto const& row : detail::unit_table)
    {
        if (row.tag == tag)
            return row.unit;
    }
    return std::nullopt;
}

inline std::string_view dimension_name(Dimension d)
{
    switch (d)
    {
        case Dimension::dimensionless: return "dimensionless";
        case Dimension::length: return "length";
        case Dimension::time: return "time";
        case Dimension::energy: return "energy";
        case Dimension::intensity: return "intensity";
        case Dimension::number_density: return "number-density";
        case Dimension::flux: return "flux";
        case Dimension::frequency: return "frequency";
        case Dimension::angular_frequency: return "angular-frequency";
    }
    return "unknown";
}

//---------------------------------------------------------------------------//
/*!
 * A value tagged with a unit from the fixed vocabulary.
 */
class Quantity
{
  public:
    Quantity(double value, Unit unit) : value_(value), unit_(unit)
    {
        if (!std::isfinite(value))
            throw DomainError("quantity value must be finite");
    }

    double value() const noexcept { return value_; }
    Unit unit() const noexcept { return unit_; }
    Dimension dimension() const noexcept { return unit_dimension(unit_); }

    double si() const noexcept { return value_ * unit_scale(unit_); }

    //! Re-express in another unit of the same dimension.
    Quantity to(Unit other) const
    {
        if (unit_dimension(other) != dimension())
        {
            throw DomainError("cannot convert " + std::string(unit_tag(unit_))
                                  + " to " + std::string(unit_tag(other)),
                              "unit_mismatch");
        }
        return {this->si() / unit_scale(other), other};
    }

    //! Build from an SI value.
    static Quantity from_si(double value_si, Unit unit)
    {
        return {value_si / unit_scale(unit), unit};
    }

  private:
    double value_;
    Unit unit_;
};

/*!
 * Parse a number with a unit suffix, e.g. "1.06um", "1e12W_per_cm2".
 *
 * A bare number is accepted only when \c allow_bare is set and is returned
 * with Unit::none.
 */
inline Quantity parse_quantity(std::string_view text, bool allow_bare = false)
{
    double value = 0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first)
        throw ParseError("not a number: '" + std::string(text) + "'");
    std::string_view suffix(ptr, static_cast<std::size_t>(last - ptr));
    if (suffix.empty())
    {
        if (!allow_bare)
        {
            throw ParseError("missing unit suffix on '" + std::string(text)
                             + "'");
        }
        return {value, Unit::none};
    }
    auto unit = parse_unit(suffix);
    if (!unit || *unit == Unit::none)
    {
        throw ParseError("unknown unit '" + std::string(suffix) + "' in '"
                         + std::string(text) + "'");
    }
    return {value, *unit};
}

//! Parse and require a dimension; returns the SI value.
inline double parse_si(std::string_view text, Dimension expected)
{
    auto q = parse_quantity(text);
    if (q.dimension() != expected)
    {
        throw ParseError("expected " + std::string(dimension_name(expected))
                         + " but got '" + std::string(text) + "'");
    }
    return q.si();
}

inline double ev_to_joule(double ev)
{
    return ev * codata.electron_charge_e;
}
inline double joule_to_ev(double j)
{
    return j / codata.electron_charge_e;
}
inline double w_per_cm2_to_si(double i)
{
    return i * 1e4;
}
inline double si_to_w_per_cm2(double i)
{
    return i * 1e-4;
}

//---------------------------------------------------------------------------//
// LIGHT BEAM
//---------------------------------------------------------------------------//
struct Photon
{
    double energy;  //!< h nu [J]
    double frequency;  //!< nu [Hz]
    double angular_frequency;  //!< omega [rad/s]
};

inline Photon photon_from_wavelength(double wavelength)
{
    if (!(wavelength > 0) || !std::isfinite(wavelength))
        throw DomainError("wavelength must be positive");
    double nu = codata.light_speed_c / wavelength;
    return {codata.planck_h * nu, nu, 2 * std::numbers::pi * nu};
}

//! h c / lambda [J].
inline double photon_energy(double wavelength)
{
    return photon_from_wavelength(wavelength).energy;
}

//! Photon flux [m⁻² s⁻¹] carried by an intensity [W/m²].
inline double intensity_to_flux(double intensity, double photon_energy)
{
    if (!(photon_energy > 0))
        throw DomainError("photon energy must be positive");
    if (!(intensity >= 0) || !std::isfinite(intensity))
        throw DomainError("intensity must be finite and non-negative");
    return intensity / photon_energy;
}

//! Photon number density [m⁻³] in a beam of the given flux.
inline double flux_to_photon_density(double flux)
{
    if (!(flux >= 0) || !std::isfinite(flux))
        throw DomainError("photon flux must be finite and non-negative");
    return flux / codata.light_speed_c;
}

//! n^(-1/3).
inline double mean_photon_spacing(double density)
{
    if (!(density > 0) || !std::isfinite(density))
        throw DomainError("photon density must be positive");
    return std::cbrt(1.0 / density);
}

//! Photon density of a beam: I / (h nu c).
inline double photon_density(double intensity, double photon_energy)
{
    return flux_to_photon_density(intensity_to_flux(intensity, photon_energy));
}

}  // namespace photoion

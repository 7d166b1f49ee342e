#pragma once

#include <compare>
#include <numbers>

namespace rexsim {

/*!
 * CODATA 2018 values of the constants used throughout the library, SI units.
 */
namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double electron_mass = 9.1093837015e-31;       // kg
inline constexpr double elementary_charge = 1.602176634e-19;    // C
inline constexpr double speed_of_light = 299792458.0;           // m/s
inline constexpr double planck = 6.62607015e-34;                // J s
inline constexpr double hbar = planck / two_pi;                 // J s
inline constexpr double boltzmann = 1.380649e-23;               // J/K
inline constexpr double bohr_magneton = 9.2740100783e-24;       // J/T
inline constexpr double vacuum_permeability = 1.25663706212e-6; // T m/A
} // namespace constants

/// Record form of the constants, for reporting.
struct PhysicalConstants
{
    double vacuum_permittivity = constants::vacuum_permittivity;
    double electron_mass = constants::electron_mass;
    double elementary_charge = constants::elementary_charge;
    double speed_of_light = constants::speed_of_light;
    double hbar = constants::hbar;
    double planck = constants::planck;
    double boltzmann = constants::boltzmann;
    double bohr_magneton = constants::bohr_magneton;
    double vacuum_permeability = constants::vacuum_permeability;
};

/// Ordinary frequency in Hz. Used at I/O boundaries and for linewidths.
class OrdinaryFrequency
{
  public:
    constexpr OrdinaryFrequency() = default;
    constexpr explicit OrdinaryFrequency(double hz) : hz_(hz) {}

    constexpr double hz() const { return hz_; }

    constexpr auto operator<=>(OrdinaryFrequency const&) const = default;

  private:
    double hz_ = 0.0;
};

/// Angular rate in rad/s. Internal representation of every rate.
class AngularRate
{
  public:
    constexpr AngularRate() = default;
    constexpr explicit AngularRate(double rad_per_s) : value_(rad_per_s) {}

    constexpr double rad_per_s() const { return value_; }

    constexpr auto operator<=>(AngularRate const&) const = default;

  private:
    double value_ = 0.0;
};

constexpr AngularRate angular_from_ordinary(OrdinaryFrequency f)
{
    return AngularRate{constants::two_pi * f.hz()};
}

constexpr OrdinaryFrequency ordinary_from_angular(AngularRate w)
{
    return OrdinaryFrequency{w.rad_per_s() / constants::two_pi};
}

/// Shorthand for the ubiquitous "2 pi x f" notation.
constexpr AngularRate two_pi_times(double hz)
{
    return angular_from_ordinary(OrdinaryFrequency{hz});
}

/// Value with a one-sigma standard error.
template<class T>
struct Measured
{
    T value{};
    T std_error{};
};

/*!
 * exp(-h * splitting / (k T)): population of the upper level relative to the
 * lower one in thermal equilibrium. Throws DomainError for T <= 0.
 */
double boltzmann_population_ratio(OrdinaryFrequency splitting, double temperature_k);

/// Inverse of boltzmann_population_ratio. Ratio must lie in (0, 1).
double temperature_from_population_ratio(double ratio, OrdinaryFrequency splitting);

/// sech^2(g muB B / (2 k T)); lies in (0, 1]. Throws DomainError for T <= 0.
double sech_squared_thermal(double g_factor, double field_t, double temperature_k);

} // namespace rexsim

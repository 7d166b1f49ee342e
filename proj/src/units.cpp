#include "rexsim/units.hpp"

#include <cmath>

#include "rexsim/errors.hpp"

namespace rexsim {

double boltzmann_population_ratio(OrdinaryFrequency splitting, double temperature_k)
{
    if (!(temperature_k > 0.0))
        throw DomainError("boltzmann_population_ratio: temperature must be > 0 K");
    return std::exp(-constants::planck * splitting.hz() / (constants::boltzmann * temperature_k));
}

double temperature_from_population_ratio(double ratio, OrdinaryFrequency splitting)
{
    if (!(ratio > 0.0 && ratio < 1.0))
        throw DomainError("temperature_from_population_ratio: ratio must lie in (0, 1)");
    if (!(splitting.hz() > 0.0))
        throw DomainError("temperature_from_population_ratio: splitting must be > 0");
    return -constants::planck * splitting.hz() / (constants::boltzmann * std::log(ratio));
}

double sech_squared_thermal(double g_factor, double field_t, double temperature_k)
{
    if (!(temperature_k > 0.0))
        throw DomainError("sech_squared_thermal: temperature must be > 0 K");
    double const x = g_factor * constants::bohr_magneton * field_t
                     / (2.0 * constants::boltzmann * temperature_k);
    double const s = 1.0 / std::cosh(x);
    return s * s;
}

} // namespace rexsim

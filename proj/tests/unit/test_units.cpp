#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "rexsim/errors.hpp"
#include "rexsim/units.hpp"

using namespace rexsim;

// Oracle constants typed in from the CODATA 2018 tables, independent of units.hpp.
namespace {
constexpr double kH = 6.62607015e-34;
constexpr double kKb = 1.380649e-23;
constexpr double kMuB = 9.2740100783e-24;
} // namespace

TEST_SUITE("units")
{
    TEST_CASE("constants match CODATA to six digits")
    {
        PhysicalConstants const pc;
        CHECK(pc.vacuum_permittivity == doctest::Approx(8.8541878128e-12).epsilon(1e-6));
        CHECK(pc.electron_mass == doctest::Approx(9.1093837015e-31).epsilon(1e-6));
        CHECK(pc.elementary_charge == doctest::Approx(1.602176634e-19).epsilon(1e-6));
        CHECK(pc.speed_of_light == 299792458.0);
        CHECK(pc.planck == doctest::Approx(kH).epsilon(1e-9));
        CHECK(pc.hbar == doctest::Approx(1.054571817e-34).epsilon(1e-6));
        CHECK(pc.boltzmann == doctest::Approx(kKb).epsilon(1e-9));
        CHECK(pc.bohr_magneton == doctest::Approx(kMuB).epsilon(1e-9));
        CHECK(pc.vacuum_permeability == doctest::Approx(1.25663706212e-6).epsilon(1e-6));
        // muB/h = 13.996 GHz/T
        CHECK(pc.bohr_magneton / pc.planck / 1e9 == doctest::Approx(13.996).epsilon(5e-5));
    }

    TEST_CASE("angular and ordinary conversions")
    {
        CHECK(angular_from_ordinary(OrdinaryFrequency{0.0}).rad_per_s() == 0.0);
        CHECK(angular_from_ordinary(OrdinaryFrequency{90e9}).rad_per_s() == doctest::Approx(5.655e11).epsilon(1e-3));
        CHECK(two_pi_times(90e9) == angular_from_ordinary(OrdinaryFrequency{90e9}));

        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> exponent(-3.0, 15.0);
        for (int i = 0; i < 1000; ++i)
        {
            double const f = std::pow(10.0, exponent(gen));
            double const back = ordinary_from_angular(angular_from_ordinary(OrdinaryFrequency{f})).hz();
            // within one ulp
            CHECK(std::abs(back - f) <= std::nextafter(f, 2 * f) - f);
        }
    }

    TEST_CASE("strong types order by value")
    {
        CHECK(OrdinaryFrequency{1.0} < OrdinaryFrequency{2.0});
        CHECK(AngularRate{3.0} == AngularRate{3.0});
    }

    TEST_CASE("Boltzmann population ratio")
    {
        OrdinaryFrequency const split{12.88e9};
        double const oracle = std::exp(-kH * 12.88e9 / (kKb * 0.5));
        CHECK(boltzmann_population_ratio(split, 0.5) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(boltzmann_population_ratio(split, 0.5) == doctest::Approx(0.290).epsilon(0.005));
        CHECK(boltzmann_population_ratio(OrdinaryFrequency{0.0}, 0.5) == 1.0);
        CHECK(temperature_from_population_ratio(0.290, split) == doctest::Approx(0.5).epsilon(0.005));
        double const r = boltzmann_population_ratio(split, 0.37);
        CHECK(temperature_from_population_ratio(r, split) == doctest::Approx(0.37).epsilon(1e-12));

        // monotone: decreasing in splitting, increasing in T
        CHECK(boltzmann_population_ratio(OrdinaryFrequency{13e9}, 0.5) < boltzmann_population_ratio(split, 0.5));
        CHECK(boltzmann_population_ratio(split, 0.6) > boltzmann_population_ratio(split, 0.5));

        CHECK_THROWS_AS(boltzmann_population_ratio(split, 0.0), DomainError);
        CHECK_THROWS_AS(boltzmann_population_ratio(split, -1.0), DomainError);
        CHECK_THROWS_AS(temperature_from_population_ratio(1.5, split), DomainError);
    }

    TEST_CASE("sech^2 thermal factor")
    {
        double const x = 2.36 * kMuB * 0.39 / (2.0 * kKb * 0.5);
        double const oracle = 1.0 / (std::cosh(x) * std::cosh(x));
        CHECK(sech_squared_thermal(2.36, 0.39, 0.5) == doctest::Approx(oracle).epsilon(1e-12));
        CHECK(sech_squared_thermal(2.36, 0.39, 0.5) == doctest::Approx(0.698).epsilon(0.002));
        CHECK(sech_squared_thermal(0.0, 0.39, 0.5) == 1.0);
        CHECK(sech_squared_thermal(2.36, 0.39, 1e12) == doctest::Approx(1.0));
        for (double t : {0.01, 0.1, 1.0, 10.0})
        {
            double const s = sech_squared_thermal(2.0, 1.0, t);
            CHECK(s > 0.0);
            CHECK(s < 1.0);
        }
        CHECK_THROWS_AS(sech_squared_thermal(2.36, 0.39, 0.0), DomainError);
    }
}

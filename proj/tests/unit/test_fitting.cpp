#include <doctest.h>

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "rexsim/dynamics/experiments.hpp"
#include "rexsim/dynamics/fitting.hpp"
#include "rexsim/errors.hpp"
#include "rexsim/spinbath.hpp"

using namespace rexsim;
using namespace rexsim::dynamics;

namespace {

constexpr double kPi = 3.14159265358979323846;

TimeTrace ramsey_trace(double beat_hz, double t2s, std::size_t n = 2001, double window = 20e-6)
{
    RamseyModel m;
    m.beat = OrdinaryFrequency{beat_hz};
    m.t2_star_s = t2s;
    auto const t = linspace(0.0, window, n);
    return simulate_ramsey(m, t);
}

} // namespace

TEST_SUITE("fitting")
{
    TEST_CASE("linear regression")
    {
        std::vector<double> x{0, 1, 2, 3, 4};
        std::vector<double> y;
        for (double v : x)
            y.push_back(1.5 - 0.25 * v);
        auto const f = linear_regression(x, y);
        CHECK(f.slope == doctest::Approx(-0.25));
        CHECK(f.intercept == doctest::Approx(1.5));
        CHECK(f.rms_residual == doctest::Approx(0.0).scale(1.0));
        CHECK(f.points == 5);

        // textbook standard error on a small noisy set
        std::vector<double> yn{1.0, 2.2, 2.9, 4.1, 5.0};
        auto const g = linear_regression(x, yn);
        double sxx = 10.0, ssr = 0.0;
        for (std::size_t i = 0; i < 5; ++i)
        {
            double const r = yn[i] - (g.intercept + g.slope * x[i]);
            ssr += r * r;
        }
        CHECK(g.slope == doctest::Approx(0.99));
        CHECK(g.slope_std_error == doctest::Approx(std::sqrt(ssr / 3 / sxx)));

        std::vector<double> one{1.0};
        CHECK_THROWS_AS(linear_regression(one, one), InsufficientDataError);
    }

    TEST_CASE("T2* from noiseless fringes")
    {
        auto const f = extract_t2star(ramsey_trace(740e3, 4.0e-6));
        CHECK(f.used_envelope_peaks);
        CHECK(f.t2_star_s.value == doctest::Approx(4.0e-6).epsilon(0.01));

        auto const slow = extract_t2star(ramsey_trace(0.0, 4.0e-6));
        CHECK_FALSE(slow.used_envelope_peaks);
        CHECK(slow.t2_star_s.value == doctest::Approx(4.0e-6).epsilon(0.01));
    }

    TEST_CASE("T2* matches direct log-linear regression on a pure exponential")
    {
        auto const tr = ramsey_trace(0.0, 3.3e-6, 301, 10e-6);
        std::vector<double> lc;
        for (double s : tr.y.values)
            lc.push_back(std::log(2 * s - 1));
        auto const direct = linear_regression(tr.x.values, lc);
        CHECK(extract_t2star(tr).t2_star_s.value == doctest::Approx(-1 / direct.slope).epsilon(1e-9));
    }

    TEST_CASE("T2* with 5 % noise lies within 2 sigma")
    {
        auto tr = ramsey_trace(740e3, 4.0e-6);
        std::mt19937_64 gen(20181);
        std::normal_distribution<double> noise(0.0, 0.05);
        for (std::size_t i = 0; i < tr.size(); ++i)
        {
            double const contrast = 2 * tr.y.values[i] - 1;
            tr.y.values[i] = 0.5 * (1 + contrast * (1 + noise(gen)));
        }
        auto const f = extract_t2star(tr);
        CHECK(std::abs(f.t2_star_s.value - 4.0e-6) <= 2 * f.t2_star_s.std_error);
    }

    TEST_CASE("T2* rejects a growing envelope")
    {
        auto tr = ramsey_trace(0.0, 4.0e-6, 101, 10e-6);
        for (std::size_t i = 0; i < tr.size(); ++i)
            tr.y.values[i] = 0.5 * (1 + 0.1 * std::exp(tr.x.values[i] / 20e-6));
        CHECK_THROWS_AS(extract_t2star(tr), FitError);
    }

    TEST_CASE("T2 from echo tails")
    {
        auto const t = linspace(0.0, 40e-6, 401);
        auto const plain = simulate_echo_decay(25.4e-6, {}, t);
        auto const f = fit_t2_from_echo(plain, 4e-6);
        CHECK(f.t2_s.value == doctest::Approx(25.4e-6).epsilon(0.02));
        CHECK_FALSE(f.modulation_suspected);

        auto const v = spinbath::mims_envelope(OrdinaryFrequency{741.5e3}, OrdinaryFrequency{789.5e3}, 0.2);
        auto const mod = simulate_echo_decay(25.4e-6, v, t);
        CHECK(fit_t2_from_echo(mod, 4e-6).t2_s.value == doctest::Approx(25.4e-6).epsilon(0.05));

        auto const whole = fit_t2_from_echo(mod, 0.0);
        CHECK(whole.rms_log_residual > f.rms_log_residual);
        CHECK(whole.modulation_suspected);

        CHECK_THROWS_AS(fit_t2_from_echo(plain, 39.7e-6), InsufficientDataError);
    }

    TEST_CASE("pure dephasing")
    {
        double const gs = 9.7e3;
        std::vector<CoherencePoint> pts;
        for (double t1 : {1.5e-6, 2.1e-6, 5e-6, 20e-6, 90e-6})
        {
            double const t2 = 1 / (kPi * (1 / (2 * kPi * t1) + gs));
            pts.push_back({t1, t2});
        }
        auto const f = fit_pure_dephasing(pts);
        CHECK(f.value.hz() == doctest::Approx(9.7e3).epsilon(0.02));

        std::vector<CoherencePoint> radiative{{2e-6, 4e-6}, {90e-6, 180e-6}};
        CHECK(fit_pure_dephasing(radiative).value.hz() == doctest::Approx(0.0).scale(1.0));

        std::vector<CoherencePoint> one{{2e-6, 4e-6}};
        CHECK_THROWS_AS(fit_pure_dephasing(one), InsufficientDataError);
    }

    TEST_CASE("pure dephasing with noise lies within 2 sigma")
    {
        std::mt19937_64 gen(5);
        std::normal_distribution<double> noise(0.0, 0.6e3);
        int inside = 0;
        int const trials = 400;
        for (int k = 0; k < trials; ++k)
        {
            std::vector<CoherencePoint> pts;
            for (double t1 : {1.5e-6, 2.1e-6, 3e-6, 5e-6, 8e-6, 20e-6, 50e-6, 90e-6})
            {
                double const width = 1 / (2 * kPi * t1) + 9.7e3 + noise(gen);
                pts.push_back({t1, 1 / (kPi * width)});
            }
            auto const f = fit_pure_dephasing(pts);
            if (std::abs(f.value.hz() - 9.7e3) <= 2 * f.std_error.hz())
                ++inside;
        }
        // Student t with 7 dof puts ~91 % inside 2 sigma
        CHECK(inside >= 0.86 * trials);
    }

    TEST_CASE("power law")
    {
        std::vector<std::pair<double, double>> pts;
        for (double d = 5; d <= 40; d += 1)
            pts.push_back({d, 1.13e4 * std::pow(d, -2.9)});
        auto const f = fit_power_law(pts);
        CHECK(f.exponent == doctest::Approx(2.9).epsilon(1e-12));
        CHECK(f.amplitude == doctest::Approx(1.13e4).epsilon(1e-10));

        std::vector<std::pair<double, double>> flat{{1, 3}, {2, 3}, {4, 3}};
        CHECK(fit_power_law(flat).exponent == doctest::Approx(0.0).scale(1.0));

        std::vector<std::pair<double, double>> bad{{1, 3}, {2, 0}};
        CHECK_THROWS_AS(fit_power_law(bad), DomainError);
        std::vector<std::pair<double, double>> neg{{-1, 3}, {2, 1}};
        CHECK_THROWS_AS(fit_power_law(neg), DomainError);
    }

    TEST_CASE("power law on Poisson counts")
    {
        // density in ions per 2 MHz, summed over 125-bin groups of a 5..40 GHz scan
        std::mt19937_64 gen(20181);
        std::vector<std::pair<double, double>> pts;
        double const bin = 2e-3; // GHz
        std::size_t const group = 125;
        std::size_t const nbins = static_cast<std::size_t>((40.0 - 5.0) / bin);
        for (std::size_t g0 = 0; g0 + group <= nbins; g0 += group)
        {
            long total = 0;
            for (std::size_t i = g0; i < g0 + group; ++i)
            {
                double const d = 5.0 + (i + 0.5) * bin;
                std::poisson_distribution<long> p(1.13e4 * std::pow(d, -2.9));
                total += p(gen);
            }
            double const centre = 5.0 + (g0 + group / 2.0) * bin;
            if (total > 0)
                pts.push_back({centre, static_cast<double>(total) / group});
        }
        CHECK(fit_power_law(pts).exponent == doctest::Approx(2.9).epsilon(0.1 / 2.9));
    }

    TEST_CASE("single-ion threshold")
    {
        CHECK(single_ion_threshold(1.0, 2.9) == 1.0);
        CHECK(single_ion_threshold(1.13e4, 2.9) == doctest::Approx(25.0).epsilon(0.002));
        CHECK(single_ion_threshold(1.13e4, 1e6) == doctest::Approx(1.0).epsilon(1e-4));
        CHECK_THROWS_AS(single_ion_threshold(0.0, 2.9), DomainError);
        CHECK_THROWS_AS(single_ion_threshold(1.0, 0.0), DomainError);
    }
}

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "rexsim/dynamics/fitting.hpp"
#include "rexsim/errors.hpp"
#include "rexsim/photonstats.hpp"

using namespace rexsim;
using namespace rexsim::photonstats;

namespace {

constexpr double kPeriod = 40e-6;

EmitterLevelScheme reference_scheme()
{
    return {0.5, 0.048474, 0.09, 3850.0, 2.1e-6};
}

BackgroundModel reference_background()
{
    return {0.00091, 2.0, 5e-6};
}

// mean and standard error from batch means, robust to short-range correlation
std::pair<double, double> batch_mean(std::vector<std::uint32_t> const& c, std::size_t batches)
{
    std::size_t const len = c.size() / batches;
    std::vector<double> means;
    for (std::size_t b = 0; b < batches; ++b)
    {
        double s = 0;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i)
            s += c[i];
        means.push_back(s / len);
    }
    double const m = std::accumulate(means.begin(), means.end(), 0.0) / batches;
    double v = 0;
    for (double x : means)
        v += (x - m) * (x - m);
    return {m, std::sqrt(v / (batches - 1) / batches)};
}

} // namespace

TEST_SUITE("photonstats")
{
    TEST_CASE("deterministic emitter")
    {
        auto const rec = simulate_emitter_stream({1.0, 1.0, 0.0, 1.0, 2.1e-6}, {}, 10000, kPeriod, 1);
        for (auto c : rec.counts)
            CHECK(c == 1u);
        CHECK(rec.mean_counts() == 1.0);
    }

    TEST_CASE("binomial mean without shelving")
    {
        std::size_t const n = 400000;
        auto const rec = simulate_emitter_stream({0.5, 0.3, 0.0, 1.0, 2.1e-6}, {}, n, kPeriod, 7);
        double const p = 0.15;
        CHECK(std::abs(rec.mean_counts() - p) <= 3 * std::sqrt(p * (1 - p) / n));
    }

    TEST_CASE("stationary active fraction")
    {
        double const r = 1 - std::exp(-3850.0 * kPeriod);
        double const s = 0.5 * 0.09;
        double const pa = r / (r + s * (1 - r));
        CHECK(stationary_active_fraction(reference_scheme(), kPeriod) == doctest::Approx(pa));
        auto none = reference_scheme();
        none.shelving_probability = 0.0;
        CHECK(stationary_active_fraction(none, kPeriod) == 1.0);

        double const sig = 0.5 * 0.048474 * pa;
        double const bg = 0.00091 + 2.0 * 5e-6;
        CHECK(signal_fraction(reference_scheme(), reference_background(), kPeriod)
              == doctest::Approx(sig / (sig + bg)));
        CHECK(signal_fraction(reference_scheme(), reference_background(), kPeriod) == doctest::Approx(0.954).epsilon(1e-3));
        CHECK((sig + bg) * 25e3 == doctest::Approx(500).epsilon(1e-3));
        CHECK_THROWS_AS(signal_fraction({0.0, 0.5, 0.0, 1.0, 1e-6}, {}, kPeriod), DomainError);
    }

    TEST_CASE("reference settings give 500 counts per second")
    {
        auto const rec = simulate_emitter_stream(reference_scheme(), reference_background(), 4'000'000, kPeriod, 20181);
        auto const [m, se] = batch_mean(rec.counts, 100);
        CHECK(std::abs(m / kPeriod - 500.0) <= 3 * se / kPeriod);
        // the simulated active fraction matches the stationary value
        double const expected = 0.5 * 0.048474 * stationary_active_fraction(reference_scheme(), kPeriod)
                                + reference_background().mean_per_pulse();
        CHECK(std::abs(m - expected) <= 3 * se);
    }

    TEST_CASE("record is independent of worker count")
    {
        auto const a = simulate_emitter_stream(reference_scheme(), reference_background(), 200000, kPeriod, 9, 1);
        auto const b = simulate_emitter_stream(reference_scheme(), reference_background(), 200000, kPeriod, 9, 4);
        CHECK(a.counts == b.counts);
        auto const c = simulate_emitter_stream(reference_scheme(), reference_background(), 200000, kPeriod, 10, 1);
        CHECK(a.counts != c.counts);
    }

    TEST_CASE("count record round trip")
    {
        auto const rec = simulate_emitter_stream(reference_scheme(), reference_background(), 5000, kPeriod, 3);
        std::stringstream ss;
        write_count_record(ss, rec);
        auto const back = read_count_record(ss);
        CHECK(back.counts == rec.counts);
        CHECK(back.period_s == doctest::Approx(kPeriod));
        CHECK(back.seed == 3u);
    }

    TEST_CASE("g2 of a Poissonian stream is flat")
    {
        // 100 independent runs; each lag is compared with 1 using the error of the mean
        int const runs = 100;
        G2Options opt;
        std::vector<double> sum(opt.max_lag + 1, 0.0), var(opt.max_lag + 1, 0.0);
        for (int r = 0; r < runs; ++r)
        {
            auto const rec = simulate_emitter_stream({0.0, 1.0, 0.0, 1.0, 1e-6}, {0.05, 0.0, 5e-6}, 200000, kPeriod,
                                                     1000 + r);
            auto const g = g2_estimator(rec, opt);
            for (std::size_t m = 0; m <= opt.max_lag; ++m)
            {
                sum[m] += g.g2(m);
                var[m] += g.std_error(m) * g.std_error(m);
            }
        }
        int within3 = 0;
        double worst = 0.0;
        for (std::size_t m = 0; m <= opt.max_lag; ++m)
        {
            double const mean = sum[m] / runs;
            double const se = std::sqrt(var[m]) / runs;
            double const z = std::abs(mean - 1.0) / se;
            worst = std::max(worst, z);
            if (z < 3.0)
                ++within3;
        }
        // 101 lags: 3 sigma per lag, 4 sigma for the family (Bonferroni at 0.3 %)
        CHECK(within3 >= 99);
        CHECK(worst < 4.0);
    }

    TEST_CASE("g2 error cases")
    {
        CountRecord empty;
        empty.period_s = kPeriod;
        CHECK_THROWS_AS(g2_estimator(empty), InsufficientDataError);
        auto const few = simulate_emitter_stream({0.0, 1.0, 0.0, 1.0, 1e-6}, {0.01, 0.0, 5e-6}, 1000, kPeriod, 1);
        CHECK_THROWS_AS(g2_estimator(few), InsufficientDataError);
    }

    TEST_CASE("antibunching")
    {
        CHECK(g2_zero_analytic(1.0) == 0.0);
        CHECK(g2_zero_analytic(0.0) == 1.0);
        CHECK(g2_zero_analytic(0.954) == doctest::Approx(0.0899).epsilon(1e-3));
        CHECK_THROWS_AS(g2_zero_analytic(1.2), DomainError);

        auto const ideal = simulate_emitter_stream({0.5, 0.5, 0.0, 1.0, 2.1e-6}, {}, 200000, kPeriod, 5);
        auto const g = g2_estimator(ideal);
        CHECK(g.g2(0) == 0.0);

        // Monte Carlo vs 1 - rho^2 at three signal fractions
        for (double rho : {0.5, 0.9, 0.954})
        {
            EmitterLevelScheme s{0.5, 0.2, 0.0, 1.0, 2.1e-6};
            double const sig = 0.1;
            BackgroundModel b{sig * (1 - rho) / rho, 0.0, 5e-6};
            CHECK(signal_fraction(s, b, kPeriod) == doctest::Approx(rho));
            auto const rec = simulate_emitter_stream(s, b, 1'000'000, kPeriod, 42);
            auto const r = g2_estimator(rec);
            CHECK(std::abs(r.g2(0) - g2_zero_analytic(rho)) <= 3 * r.std_error(0));
        }
    }

    TEST_CASE("reference stream: antibunched dip and bunching shoulder")
    {
        auto const b = bunching_curve(reference_scheme(), reference_background(), 10'000'000, kPeriod, 20181);
        CHECK(std::abs(b.g2.g2(0) - 0.09) <= 0.013);
        CHECK(b.bunching_present);
        CHECK(b.amplitude > 0.0);
        // exact geometric decay constant of the Markov chain
        double const r = 1 - std::exp(-3850.0 * kPeriod);
        double const lambda = (1 - r) * (1 - 0.5 * 0.09);
        double const tau = -kPeriod / std::log(lambda);
        CHECK(tau == doctest::Approx(200e-6).epsilon(0.01));
        CHECK(b.lag_constant_s == doctest::Approx(tau).epsilon(0.3));
        CHECK(b.shoulder_edge_s == doctest::Approx(3 * b.lag_constant_s));
        CHECK(b.shoulder_edge_s == doctest::Approx(600e-6).epsilon(0.3));
    }

    TEST_CASE("two-level emitter never bunches")
    {
        auto s = reference_scheme();
        s.shelving_probability = 0.0;
        auto const b = bunching_curve(s, reference_background(), 4'000'000, kPeriod, 20181);
        CHECK_FALSE(b.bunching_present);
        CHECK(b.lag_constant_s == 0.0);
    }

    TEST_CASE("bunching lag scales as 1 / R_s")
    {
        // bright, rarely shelving emitter: the lag is set by the shelf recovery
        double const ps = 0.005;
        EmitterLevelScheme s{1.0, 1.0, ps, 1000.0, 2.1e-6};
        auto oracle = [&](double rs) { return kPeriod / (rs * kPeriod - std::log(1 - ps)); };
        std::vector<double> lags;
        for (double rs : {1000.0, 2000.0, 10000.0})
        {
            s.shelf_recovery_rate_hz = rs;
            G2Options const opt{200, 150, 200, 1e4};
            auto const b = bunching_curve(s, {}, 2'000'000, kPeriod, 77, opt);
            REQUIRE(b.bunching_present);
            CHECK(b.lag_constant_s == doctest::Approx(oracle(rs)).epsilon(0.2));
            lags.push_back(b.lag_constant_s);
        }
        CHECK(lags[1] / lags[0] == doctest::Approx(0.5).epsilon(0.2));
        CHECK(lags[2] / lags[0] == doctest::Approx(0.1).epsilon(0.2));
    }

    TEST_CASE("statistical fine structure")
    {
        SfsModel m{1.13e4, 2.9, 1e9, 2e6};
        CHECK(m.expected_count(25e9, 2e6) == doctest::Approx(1.13e4 * std::pow(25.0, -2.9)));
        auto const tr = sfs_generate(m, 5e9, 40e9, 2e6, 20181);
        auto const* mean = tr.find_extra("expected_mean");
        auto const* noise = tr.find_extra("shot_noise");
        REQUIRE(mean != nullptr);
        REQUIRE(noise != nullptr);
        for (std::size_t i = 0; i < tr.size(); i += 97)
            CHECK(noise->values[i] == doctest::Approx(std::sqrt(mean->values[i])));

        // windowed spread against the windowed mean where the mean is >= 5
        std::size_t const w = 500;
        int windows = 0;
        for (std::size_t a = 0; a + w <= tr.size(); a += w)
        {
            double mu = 0, var = 0;
            for (std::size_t i = a; i < a + w; ++i)
                mu += mean->values[i];
            mu /= w;
            if (mu < 5)
                continue;
            for (std::size_t i = a; i < a + w; ++i)
            {
                double const d = tr.y.values[i] - mean->values[i];
                var += d * d;
            }
            var /= w;
            ++windows;
            CHECK(std::sqrt(var) == doctest::Approx(std::sqrt(mu)).epsilon(0.15));
        }
        CHECK(windows >= 5);

        auto const disp = poisson_dispersion_test(tr);
        CHECK(disp.consistent(0.05));
        CHECK(disp.variance_to_mean == doctest::Approx(1.0).epsilon(0.05));

        auto const fit = dynamics::fit_power_law(sfs_binned_density(tr, m, 125));
        CHECK(fit.exponent == doctest::Approx(2.9).epsilon(0.1 / 2.9));
        CHECK(dynamics::single_ion_threshold(fit.amplitude, fit.exponent) == doctest::Approx(25.0).epsilon(0.1));

        SfsModel zero{0.0, 2.9, 1e9, 2e6};
        auto const z = sfs_generate(zero, 5e9, 40e9, 2e6, 1);
        for (double v : z.y.values)
            CHECK(v == 0.0);

        CHECK_THROWS(sfs_generate(m, 40e9, 5e9, 2e6, 1));
    }

    TEST_CASE("dispersion test flags over-dispersed data")
    {
        SfsModel m{1.13e4, 2.9, 1e9, 2e6};
        auto tr = sfs_generate(m, 5e9, 40e9, 2e6, 4);
        for (std::size_t i = 0; i < tr.size(); ++i)
            tr.y.values[i] = std::round(tr.y.values[i] * (i % 2 == 0 ? 1.5 : 0.5));
        CHECK_FALSE(poisson_dispersion_test(tr).consistent(0.05));
    }

    TEST_CASE("coupling histogram")
    {
        ModeModel pinned;
        pinned.longitudinal_span_m = 0.0;
        pinned.transverse_radius_m = 0.0;
        auto const d = coupling_histogram(pinned, 2000, 20, 1);
        CHECK(d.counts.back() == 2000u);
        CHECK(d.fractions.back() == 1.0);

        ModeModel const mode;
        CHECK(relative_purcell_rate(mode, 0, 0, 0) == 1.0);
        CHECK(relative_purcell_rate(mode, mode.wavelength_eff_m / 4, 0, 0) == doctest::Approx(0.0).scale(1.0));
        CHECK(relative_purcell_rate(mode, 0, mode.waist_m, 0) == doctest::Approx(std::exp(-2.0)));

        auto const h = coupling_histogram(mode, 100000, 20, 20181);
        CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}) == 100000u);
        // three-bin moving average
        std::vector<double> smooth;
        for (std::size_t k = 0; k < h.fractions.size(); ++k)
        {
            std::size_t const lo = k == 0 ? 0 : k - 1;
            std::size_t const hi = std::min(k + 1, h.fractions.size() - 1);
            double s = 0;
            for (std::size_t j = lo; j <= hi; ++j)
                s += h.fractions[j];
            smooth.push_back(s / (hi - lo + 1));
        }
        for (std::size_t k = 1; k < smooth.size(); ++k)
            CHECK(smooth[k] <= smooth[k - 1]);
        CHECK(h.fractions.front() > 5 * h.fractions.back());

        auto const two = coupling_histogram(mode, 200000, 20, 20182);
        for (std::size_t k = 0; k < h.fractions.size(); ++k)
            CHECK(std::abs(two.fractions[k] - h.fractions[k]) < 0.02);

        auto const par = coupling_histogram(mode, 100000, 20, 20181, 4);
        CHECK(par.counts == h.counts);
        CHECK_THROWS_AS(coupling_histogram(mode, 999, 20, 1), ValidationError);
    }
}

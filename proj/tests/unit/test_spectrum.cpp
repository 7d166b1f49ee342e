#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "rexsim/errors.hpp"
#include "rexsim/spectrum.hpp"
#include "rexsim/time_trace.hpp"

using namespace rexsim;

namespace {

constexpr double kPi = 3.14159265358979323846;

// O(N^2) reference: mean removal, optional Hann, zero padding, 2|X_k|/sum(w).
std::vector<double> direct_dft(std::vector<double> const& x, bool hann, std::size_t len)
{
    std::size_t const n = x.size();
    double const mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    std::vector<double> in(len, 0.0);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const w = hann ? 0.5 - 0.5 * std::cos(2 * kPi * i / (n - 1.0)) : 1.0;
        wsum += w;
        in[i] = (x[i] - mean) * w;
    }
    std::vector<double> amp(len / 2 + 1);
    for (std::size_t k = 0; k < amp.size(); ++k)
    {
        std::complex<double> acc{0, 0};
        for (std::size_t i = 0; i < len; ++i)
            acc += in[i] * std::polar(1.0, -2 * kPi * double(k) * double(i) / double(len));
        amp[k] = 2 * std::abs(acc) / wsum;
    }
    return amp;
}

} // namespace

TEST_SUITE("spectrum")
{
    TEST_CASE("matches a direct DFT")
    {
        std::mt19937_64 gen(3);
        std::normal_distribution<double> noise;
        for (std::size_t n : {16u, 63u, 200u})
        {
            std::vector<double> x(n);
            for (auto& v : x)
                v = noise(gen) + 3.0;
            for (bool hann : {false, true})
            {
                for (std::size_t pad : {std::size_t{0}, 2 * n + 1})
                {
                    auto const s = amplitude_spectrum(x, 1e-6, hann ? Window::hann : Window::rectangular, pad);
                    auto const ref = direct_dft(x, hann, std::max(n, pad));
                    REQUIRE(s.amplitude.size() == ref.size());
                    for (std::size_t k = 0; k < ref.size(); ++k)
                        CHECK(s.amplitude[k] == doctest::Approx(ref[k]).epsilon(1e-9).scale(1.0));
                    CHECK(s.resolution_hz == doctest::Approx(1.0 / (std::max(n, pad) * 1e-6)));
                }
            }
        }
    }

    TEST_CASE("sinusoid on a bin centre reads its amplitude")
    {
        std::size_t const n = 256;
        double const dt = 1e-3;
        double const f = 20.0 / (n * dt);
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = 0.7 * std::cos(2 * kPi * f * i * dt);
        auto const s = amplitude_spectrum(x, dt, Window::rectangular);
        CHECK(s.amplitude[20] == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(dominant_frequency(s) == doctest::Approx(f));
        auto const peaks = spectral_peaks(s, 0.5);
        REQUIRE(peaks.size() == 1);
        CHECK(peaks[0] == doctest::Approx(f));
    }

    TEST_CASE("two tones")
    {
        auto const t = linspace(0.0, 1.0, 4001);
        std::vector<double> x;
        for (double v : t)
            x.push_back(std::cos(2 * kPi * 100 * v) + 0.5 * std::cos(2 * kPi * 340 * v));
        auto const s = amplitude_spectrum(x, t[1] - t[0]);
        auto const peaks = spectral_peaks(s, 0.2);
        REQUIRE(peaks.size() == 2);
        CHECK(std::abs(peaks[0] - 100) <= s.resolution_hz);
        CHECK(std::abs(peaks[1] - 340) <= s.resolution_hz);
        CHECK(dominant_frequency(s, 200) == doctest::Approx(340).epsilon(s.resolution_hz / 340));
    }

    TEST_CASE("errors")
    {
        std::vector<double> tiny{1, 2, 3};
        CHECK_THROWS_AS(amplitude_spectrum(tiny, 1.0), InsufficientDataError);
        std::vector<double> ok{1, 2, 3, 4};
        CHECK_THROWS_AS(amplitude_spectrum(ok, 0.0), DomainError);
    }

    TEST_CASE("linspace and trace validation")
    {
        auto const g = linspace(1.0, 2.0, 5);
        REQUIRE(g.size() == 5);
        CHECK(g.front() == 1.0);
        CHECK(g.back() == 2.0);
        CHECK(g[2] == doctest::Approx(1.5));

        TimeTrace tr;
        tr.x = {"t", "s", {0.0, 1.0, 2.0}};
        tr.y = {"y", "1", {1.0, 2.0, 3.0}};
        CHECK_NOTHROW(tr.validate());
        tr.x.values[2] = 1.0;
        CHECK_THROWS(tr.validate());
        tr.x.values[2] = 2.0;
        tr.y.values[1] = std::nan("");
        CHECK_THROWS(tr.validate());
        tr.y.values = {1.0, 2.0};
        CHECK_THROWS(tr.validate());

        TimeTrace m;
        m.add_meta("g0", 28.5e6);
        m.add_meta("name", "x");
        REQUIRE(m.metadata.size() == 2);
        CHECK(m.metadata[1].second == "x");
        CHECK(m.find_extra("none") == nullptr);
    }
}

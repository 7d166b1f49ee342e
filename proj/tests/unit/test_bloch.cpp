#include <doctest.h>

#include <cmath>
#include <random>

#include "rexsim/dynamics/bloch.hpp"
#include "rexsim/errors.hpp"

using namespace rexsim;
using namespace rexsim::dynamics;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Steady state of the optical Bloch equations with the sign conventions of
// the integrator (phase 0): solve the 3x3 linear system by Cramer's rule.
BlochState steady_state(double om, double d, double t1, double t2)
{
    double const g = 1 / t2;
    double const g1 = 1 / t1;
    // rows: [-g, d, 0 | 0], [-d, -g, om | 0], [0, -om, -g1 | g1]
    double const a[3][3] = {{-g, d, 0}, {-d, -g, om}, {0, -om, -g1}};
    double const b[3] = {0, 0, g1};
    auto det = [](double const m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
               + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    double const dd = det(a);
    double x[3];
    for (int c = 0; c < 3; ++c)
    {
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int k = 0; k < 3; ++k)
                m[r][k] = k == c ? b[r] : a[r][k];
        x[c] = det(m) / dd;
    }
    return {x[0], x[1], x[2]};
}

} // namespace

TEST_SUITE("bloch")
{
    TEST_CASE("free decay from the excited state")
    {
        TwoLevelParams p{AngularRate{0.0}, AngularRate{0.0}, 2.1e-6, 4.0e-6};
        for (double t : {0.1e-6, 1e-6, 2.1e-6, 10e-6})
        {
            auto const s = bloch_evolve(BlochState::excited(), p, t);
            double const exact = -1 + 2 * std::exp(-t / 2.1e-6);
            CHECK(s.w == doctest::Approx(exact).epsilon(1e-6).scale(1.0));
        }
    }

    TEST_CASE("free coherence decay and precession")
    {
        double const d = 2 * kPi * 1e6;
        TwoLevelParams p{AngularRate{0.0}, AngularRate{d}, 1.0, 2.0e-6};
        double const t = 0.73e-6;
        auto const s = bloch_evolve({1.0, 0.0, 0.0}, p, t);
        double const e = std::exp(-t / 2.0e-6);
        // du/dt = D v, dv/dt = -D u
        CHECK(s.u == doctest::Approx(e * std::cos(d * t)).epsilon(1e-6).scale(1.0));
        CHECK(s.v == doctest::Approx(-e * std::sin(d * t)).epsilon(1e-6).scale(1.0));
    }

    TEST_CASE("undamped resonant flopping")
    {
        double const om = 2 * kPi * 5e6;
        TwoLevelParams p{AngularRate{om}, AngularRate{0.0}, 1e6, 2e6};
        for (double t : {0.03e-6, 0.1e-6, 0.31e-6, 1.0e-6})
        {
            auto const s = bloch_evolve(BlochState::ground(), p, t);
            CHECK(s.w == doctest::Approx(-std::cos(om * t)).epsilon(1e-6).scale(1.0));
            CHECK(s.v == doctest::Approx(-std::sin(om * t)).epsilon(1e-6).scale(1.0));
        }
    }

    TEST_CASE("short pi pulse inverts")
    {
        double const om = 2 * kPi * 100e6;
        TwoLevelParams p{AngularRate{om}, AngularRate{0.0}, 2.1e-6, 4.0e-6};
        auto const s = bloch_evolve(BlochState::ground(), p, kPi / om);
        CHECK(s.w == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(s.excited_population() == doctest::Approx(1.0).epsilon(1e-3));
    }

    TEST_CASE("driven steady state")
    {
        struct Case
        {
            double om, d, t1, t2;
        };
        for (auto const& c : {Case{2 * kPi * 0.3e6, 0.0, 2.1e-6, 4.0e-6}, Case{2 * kPi * 1e6, 2 * kPi * 0.5e6, 2.1e-6, 2.5e-6},
                              Case{2 * kPi * 0.1e6, -2 * kPi * 0.2e6, 1e-6, 2e-6}})
        {
            TwoLevelParams p{AngularRate{c.om}, AngularRate{c.d}, c.t1, c.t2};
            auto const s = bloch_evolve(BlochState::ground(), p, 80 * c.t1);
            auto const ref = steady_state(c.om, c.d, c.t1, c.t2);
            CHECK(s.u == doctest::Approx(ref.u).epsilon(1e-6).scale(1.0));
            CHECK(s.v == doctest::Approx(ref.v).epsilon(1e-6).scale(1.0));
            CHECK(s.w == doctest::Approx(ref.w).epsilon(1e-6).scale(1.0));
        }
        // resonant closed form: w_ss = -1 / (1 + Om^2 T1 T2)
        double const om = 2 * kPi * 0.3e6;
        auto const ref = steady_state(om, 0.0, 2.1e-6, 4.0e-6);
        CHECK(ref.w == doctest::Approx(-1 / (1 + om * om * 2.1e-6 * 4.0e-6)));
    }

    TEST_CASE("pulse phase rotates the drive axis")
    {
        double const om = 2 * kPi * 10e6;
        PulseSequence seq{{{kPi / (2 * om), AngularRate{om}, 0.0, AngularRate{0.0}},
                           {kPi / (2 * om), AngularRate{om}, kPi, AngularRate{0.0}}}};
        auto const s = evolve_sequence(BlochState::ground(), seq, 1e3, 2e3);
        // second pulse undoes the first
        CHECK(s.w == doctest::Approx(-1.0).epsilon(1e-7));
        CHECK(seq.total_duration() == doctest::Approx(kPi / om));

        PulseSequence bad{{{-1.0, AngularRate{om}, 0.0, AngularRate{0.0}}}};
        CHECK_THROWS_AS(bad.validate(), ValidationError);
        CHECK_THROWS_AS(PulseSequence{}.validate(), ValidationError);
    }

    TEST_CASE("T2 clamp")
    {
        TwoLevelParams p{AngularRate{0.0}, AngularRate{0.0}, 2.0e-6, 4.1e-6};
        CHECK(p.normalized().t2_s == doctest::Approx(4.0e-6));
        p.t2_s = 4.5e-6;
        CHECK_THROWS_AS(p.normalized(), ValidationError);
        p.t2_s = 1e-6;
        p.t1_s = -1.0;
        CHECK_THROWS_AS(p.normalized(), ValidationError);
    }

    TEST_CASE("norm stays bounded over random sequences")
    {
        std::mt19937_64 gen(11);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        IntegratorOptions fast;
        fast.relative_tolerance = 1e-6;
        fast.absolute_tolerance = 1e-9;
        int const sequences = 10000;
        double worst = 0.0;
        for (int k = 0; k < sequences; ++k)
        {
            PulseSequence seq;
            int const segments = 1 + static_cast<int>(unit(gen) * 4);
            for (int i = 0; i < segments; ++i)
            {
                bool const free = unit(gen) < 0.3;
                seq.segments.push_back({unit(gen) * 0.2e-6, AngularRate{free ? 0.0 : 2 * kPi * 20e6 * unit(gen)},
                                        2 * kPi * unit(gen), AngularRate{2 * kPi * 4e6 * (unit(gen) - 0.5)}});
            }
            double const t1 = 0.5e-6 + 5e-6 * unit(gen);
            double const t2 = 2 * t1 * (0.05 + 0.95 * unit(gen));
            BlochState const start{0.0, 0.0, 2 * unit(gen) - 1};
            auto const s = evolve_sequence(start, seq, t1, t2, fast);
            worst = std::max(worst, s.norm());
            CHECK(s.excited_population() >= -1e-9);
            CHECK(s.excited_population() <= 1 + 1e-9);
        }
        CHECK(worst <= 1 + 1e-9);
    }
}

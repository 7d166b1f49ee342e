#include "rexsim/dynamics/bloch.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "rexsim/errors.hpp"

namespace rexsim::dynamics {

namespace odeint = boost::numeric::odeint;

double BlochState::norm() const
{
    return std::sqrt(u * u + v * v + w * w);
}

TwoLevelParams TwoLevelParams::normalized() const
{
    if (!(t1_s > 0.0) || !(t2_s > 0.0))
        throw ValidationError("two-level parameters: T1 and T2 must be > 0");
    if (t2_s > 2.0 * t1_s * 1.05)
        throw ValidationError("two-level parameters: T2 exceeds 2 T1 beyond the 5 % tolerance");
    TwoLevelParams out = *this;
    out.t2_s = std::min(t2_s, 2.0 * t1_s);
    return out;
}

void PulseSequence::validate() const
{
    if (segments.empty())
        throw ValidationError("pulse sequence is empty");
    for (auto const& s : segments)
    {
        if (!(s.duration_s >= 0.0) || !std::isfinite(s.duration_s))
            throw ValidationError("pulse segment duration must be >= 0");
    }
}

double PulseSequence::total_duration() const
{
    double t = 0.0;
    for (auto const& s : segments)
        t += s.duration_s;
    return t;
}

namespace {

using State = std::array<double, 3>;

struct BlochRhs
{
    double rabi_cos;
    double rabi_sin;
    double detuning;
    double gamma1;
    double gamma2;

    void operator()(State const& x, State& dxdt, double /*t*/) const
    {
        double const u = x[0], v = x[1], w = x[2];
        dxdt[0] = -gamma2 * u + detuning * v - rabi_sin * w;
        dxdt[1] = -gamma2 * v - detuning * u + rabi_cos * w;
        dxdt[2] = -rabi_cos * v + rabi_sin * u - gamma1 * (w + 1.0);
    }
};

} // namespace

BlochState evolve_segment(BlochState state, PulseSegment const& seg, double t1, double t2,
                          IntegratorOptions const& options)
{
    if (!(t1 > 0.0) || !(t2 > 0.0))
        throw ValidationError("evolve_segment: T1 and T2 must be > 0");
    double const t_end = seg.duration_s;
    if (!(t_end >= 0.0))
        throw ValidationError("evolve_segment: duration must be >= 0");
    if (t_end == 0.0)
        return state;

    double const omega = seg.rabi.rad_per_s();
    BlochRhs const rhs{omega * std::cos(seg.phase_rad), omega * std::sin(seg.phase_rad),
                       seg.detuning.rad_per_s(), 1.0 / t1, 1.0 / t2};

    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(
        options.absolute_tolerance, options.relative_tolerance);

    State x{state.u, state.v, state.w};
    double const fastest = std::abs(omega) + std::abs(seg.detuning.rad_per_s()) + rhs.gamma1 + rhs.gamma2;
    double dt = std::min(t_end, 0.05 / fastest);
    double t = 0.0;
    std::size_t attempts = 0;
    std::size_t rejected = 0;
    while (t < t_end)
    {
        dt = std::min(dt, t_end - t);
        if (stepper.try_step(rhs, x, t, dt) == odeint::fail)
            ++rejected;
        if (++attempts > options.max_steps || !std::isfinite(x[0] + x[1] + x[2]))
        {
            std::ostringstream msg;
            msg << "Bloch integration did not converge: t = " << t << " of " << t_end
                << " s after " << attempts << " attempts (" << rejected
                << " rejected), last dt = " << dt << " s, Omega = " << omega
                << " rad/s, Delta = " << seg.detuning.rad_per_s() << " rad/s";
            throw NumericError(msg.str());
        }
    }
    return {x[0], x[1], x[2]};
}

BlochState bloch_evolve(BlochState state, TwoLevelParams const& params, double t_s,
                        IntegratorOptions const& options)
{
    auto const p = params.normalized();
    return evolve_segment(state, PulseSegment{t_s, p.rabi, 0.0, p.detuning}, p.t1_s, p.t2_s, options);
}

BlochState evolve_sequence(BlochState state, PulseSequence const& sequence, double t1, double t2,
                           IntegratorOptions const& options)
{
    sequence.validate();
    for (auto const& seg : sequence.segments)
        state = evolve_segment(state, seg, t1, t2, options);
    return state;
}

} // namespace rexsim::dynamics

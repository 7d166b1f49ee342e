#pragma once

#include <vector>

#include "rexsim/units.hpp"

namespace rexsim::dynamics {

/// Bloch vector; w = -1 is the ground state.
struct BlochState
{
    double u = 0.0;
    double v = 0.0;
    double w = -1.0;

    double norm() const;
    double excited_population() const { return 0.5 * (w + 1.0); }

    static BlochState ground() { return {0.0, 0.0, -1.0}; }
    static BlochState excited() { return {0.0, 0.0, 1.0}; }
};

/*!
 * Drive and relaxation of the two-level ion. T2 up to 5 % above 2 T1 is
 * clamped to 2 T1 (measurement tolerance); beyond that is a ValidationError.
 */
struct TwoLevelParams
{
    AngularRate rabi;
    AngularRate detuning;
    double t1_s = 1.0;
    double t2_s = 2.0;

    /// Validated copy with T2 clamped into [0, 2 T1].
    TwoLevelParams normalized() const;
};

struct PulseSegment
{
    double duration_s = 0.0;
    AngularRate rabi;     // zero for free evolution
    double phase_rad = 0.0;
    AngularRate detuning;
};

struct PulseSequence
{
    std::vector<PulseSegment> segments;

    void validate() const;
    double total_duration() const;
};

/// Integrator settings; the defaults are the project-wide tolerances.
struct IntegratorOptions
{
    double relative_tolerance = 1e-8;
    double absolute_tolerance = 1e-10;
    std::size_t max_steps = 50'000'000;
};

/*!
 * Integrates
 *   du/dt = -u/T2 + D v - O sin(phi) w
 *   dv/dt = -v/T2 - D u + O cos(phi) w
 *   dw/dt = -O cos(phi) v + O sin(phi) u - (w + 1)/T1
 * for one constant segment with an adaptive Dormand-Prince 5(4) stepper.
 * Throws NumericError when the step budget is exhausted.
 */
BlochState evolve_segment(BlochState state, PulseSegment const& segment, double t1_s, double t2_s,
                          IntegratorOptions const& options = {});

/// Constant drive (phase 0) for time `t_s`.
BlochState bloch_evolve(BlochState state, TwoLevelParams const& params, double t_s,
                        IntegratorOptions const& options = {});

/// Piecewise-constant sequence, integrated segment by segment.
BlochState evolve_sequence(BlochState state, PulseSequence const& sequence, double t1_s, double t2_s,
                           IntegratorOptions const& options = {});

} // namespace rexsim::dynamics

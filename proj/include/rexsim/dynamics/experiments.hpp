#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rexsim/cavity.hpp"
#include "rexsim/dynamics/bloch.hpp"
#include "rexsim/spectrum.hpp"
#include "rexsim/time_trace.hpp"

namespace rexsim::dynamics {

/*!
 * Optical nutation: for each mean photon number the ion starts in the ground
 * state and is driven by a square resonant pulse with Omega = 2 g0 sqrt(nbar).
 * The ordinate is the excited population at the end of the pulse, which is
 * proportional to the emitted PL. Grid points are evaluated in parallel;
 * the result does not depend on `workers`.
 */
TimeTrace rabi_nutation_scan(AngularRate g0, std::span<double const> mean_photon_numbers,
                             double pulse_s, TwoLevelParams const& relaxation, unsigned workers = 1);

/*!
 * Rabi frequencies read off a nutation scan: the k-th PL maximum is a pulse
 * area of (2k-1) pi, the k-th minimum 2k pi. Extremum positions are refined
 * by a parabola in sqrt(nbar).
 */
std::vector<cavity::RabiPoint> extract_rabi_points(TimeTrace const& scan, double pulse_s);

enum class EnvelopeShape
{
    exponential,
    gaussian,
};

struct RamseyModel
{
    OrdinaryFrequency beat;            // superhyperfine doublet splitting
    double t2_star_s = 4e-6;
    OrdinaryFrequency laser_detuning;  // delta
    EnvelopeShape shape = EnvelopeShape::exponential;
    double t1_background_s = 0.0;      // 0: fringes already normalized
};

/*!
 * Normalized fringes of two pi/2 pulses separated by t:
 *   S(t) = 1/2 [1 + cos(2 pi delta t) cos(pi Dbeat t) E(t)],
 * with E = exp(-t/T2*) or exp(-(t/T2*)^2). When `t1_background_s` is set the
 * trace is additionally multiplied by exp(-t/T1).
 */
TimeTrace simulate_ramsey(RamseyModel const& model, std::span<double const> delays_s);

/// Divides out an exp(-t/T1) population-decay background.
TimeTrace remove_t1_background(TimeTrace trace, double t1_s);

struct RamseyBeat
{
    double beat_hz = 0.0;
    Spectrum spectrum;
};

/*!
 * Beat frequency from the spectrum of the squared, envelope-corrected fringe
 * contrast (2S - 1)^2 / E(t)^2. Nodes of the envelope are spaced by
 * 1/beat. Requires a uniformly sampled trace.
 */
RamseyBeat ramsey_beat_spectrum(TimeTrace const& fringes, double t2_star_s,
                                EnvelopeShape shape = EnvelopeShape::exponential);

/// I(t12) = I0 exp(-4 t12 / T2) V(t12)^2; pass nullptr-equivalent `{}` for V = 1.
TimeTrace simulate_echo_decay(double t2_s, std::function<double(double)> const& envelope,
                              std::span<double const> t12_s, double intensity0 = 1.0);

} // namespace rexsim::dynamics

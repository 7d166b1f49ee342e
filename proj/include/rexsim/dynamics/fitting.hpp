#pragma once

#include <span>
#include <utility>

#include "rexsim/time_trace.hpp"
#include "rexsim/units.hpp"

namespace rexsim::dynamics {

/// Ordinary least squares y = intercept + slope x.
struct LinearFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double slope_std_error = 0.0;
    double intercept_std_error = 0.0;
    double rms_residual = 0.0;
    std::size_t points = 0;
};

LinearFit linear_regression(std::span<double const> x, std::span<double const> y);

struct T2StarFit
{
    Measured<double> t2_star_s;
    double amplitude = 0.0;
    std::size_t points_used = 0;
    bool used_envelope_peaks = false;
};

/*!
 * T2* from normalized Ramsey fringes (baseline 1/2). The contrast |2S - 1| is
 * reduced to its local maxima (window of +-3 samples, refined by a parabola,
 * maxima below 5 % of the largest discarded), and ln(maxima) is regressed on
 * time. With fewer than three maxima the envelope is taken to be monotone and
 * every positive sample is used. Throws FitError when the fitted envelope
 * does not decay.
 */
T2StarFit extract_t2star(TimeTrace const& fringes);

struct EchoFit
{
    Measured<double> t2_s;
    double rms_log_residual = 0.0;
    std::size_t points_used = 0;
    /// Set when the log-residuals exceed 0.02: the window still contains envelope modulation.
    bool modulation_suspected = false;
};

/// Log-linear fit of the echo intensity for t12 >= t_min; T2 = -4 / slope.
EchoFit fit_t2_from_echo(TimeTrace const& echo, double t_min_s);

struct CoherencePoint
{
    double t1_s = 0.0;
    double t2_s = 0.0;
};

/*!
 * Pure dephasing from 1/(pi T2) = 1/(2 pi T1) + gamma*, slope fixed to one:
 * gamma* is the mean of the differences, with its standard error.
 */
Measured<OrdinaryFrequency> fit_pure_dephasing(std::span<CoherencePoint const> points);

struct PowerLawFit
{
    double exponent = 0.0;  // p in N = A x^-p
    double amplitude = 0.0; // A
    double exponent_std_error = 0.0;
};

/// Log-log regression of N(x) = A x^-p. All x and N must be > 0.
PowerLawFit fit_power_law(std::span<std::pair<double, double> const> points);

/// Detuning at which A x^-p falls to one ion: A^(1/p), in the units of the fit.
double single_ion_threshold(double amplitude, double exponent);

} // namespace rexsim::dynamics

#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "rexsim/time_trace.hpp"

namespace rexsim::photonstats {

/*!
 * Pulsed multilevel emitter. Per pulse an active emitter is excited with
 * p_exc; each emission is detected with eta and sends the emitter to a
 * single shelf state with p_s. A shelved emitter returns with probability
 * 1 - exp(-R_s * period) before each following pulse.
 */
struct EmitterLevelScheme
{
    double excitation_probability = 1.0;
    double detection_probability = 1.0;
    double shelving_probability = 0.0;
    double shelf_recovery_rate_hz = 1.0;
    double cavity_lifetime_s = 2.1e-6;

    void validate() const;
};

/// Pulse-synchronous Poissonian background.
struct BackgroundModel
{
    double counts_per_pulse = 0.0;
    double dark_count_rate_hz = 0.0;
    double gate_window_s = 5e-6; // dark counts accumulate over the gate

    double mean_per_pulse() const { return counts_per_pulse + dark_count_rate_hz * gate_window_s; }
    void validate() const;
};

struct CountRecord
{
    std::vector<std::uint32_t> counts;
    double period_s = 0.0;
    std::uint64_t seed = 0;

    std::size_t pulses() const { return counts.size(); }
    double mean_counts() const;
};

/*!
 * Monte Carlo photon counts. The random numbers of pulse i come from
 * CounterRng(seed, i), so the record is bit-identical for any `workers`.
 */
CountRecord simulate_emitter_stream(EmitterLevelScheme const& scheme, BackgroundModel const& background,
                                    std::size_t pulses, double period_s, std::uint64_t seed,
                                    unsigned workers = 1);

/// Plain-text "pulse_index,count" columns with `#` metadata lines.
void write_count_record(std::ostream& os, CountRecord const& record);
CountRecord read_count_record(std::istream& is);

struct G2Options
{
    std::size_t max_lag = 100;       // pulses
    std::size_t far_lag_min = 50;    // normalization window, inclusive
    std::size_t far_lag_max = 100;
    double min_far_coincidences = 1e4;
};

struct G2Result
{
    TimeTrace trace;                 // lag (s) -> g2, extra: lag_pulses, std_error, coincidences
    double normalization = 0.0;      // mean <n_i n_{i+m}> over the far window
    double far_coincidences = 0.0;

    double g2(std::size_t lag) const { return trace.y.values.at(lag); }
    double std_error(std::size_t lag) const;
};

/*!
 * g2(m) = <n_i n_{i+m}> / norm for m > 0 and <n_i (n_i - 1)> / norm at
 * m = 0, where norm is the mean correlation over the far-lag window.
 * Errors are Poisson on the coincidence counts.
 */
G2Result g2_estimator(CountRecord const& record, G2Options const& options = {});

/// Stationary probability that the emitter is not shelved when a pulse arrives.
double stationary_active_fraction(EmitterLevelScheme const& scheme, double period_s);

/// rho = S / (S + B) of the stationary stream, with S = p_exc eta times the active fraction.
double signal_fraction(EmitterLevelScheme const& scheme, BackgroundModel const& background, double period_s);

/// 1 - rho^2 for signal fraction rho = S / (S + B).
double g2_zero_analytic(double signal_fraction);

struct BunchingAnalysis
{
    G2Result g2;
    double amplitude = 0.0;          // A in g2(m) - 1 = A lambda^m
    double lag_constant_s = 0.0;     // -period / ln(lambda)
    double shoulder_edge_s = 0.0;    // 3 lag constants: the excess has fallen by e^-3
    bool bunching_present = false;   // g2(1) > 1 + 3 sigma
};

/*!
 * Weighted least-squares fit of the excess g2(m) - 1 = A lambda^m over lags
 * 1..max_fit_lag (weights 1/sigma^2). For fixed lambda the amplitude is
 * linear; lambda is found by a bracketed 1-D minimization. The fit is skipped
 * (zero lag constant) when no bunching is present.
 */
BunchingAnalysis analyse_bunching(G2Result g2, double period_s, std::size_t max_fit_lag);

/// simulate_emitter_stream + g2_estimator + analyse_bunching up to the far window.
BunchingAnalysis bunching_curve(EmitterLevelScheme const& scheme, BackgroundModel const& background,
                                std::size_t pulses, double period_s, std::uint64_t seed,
                                G2Options const& options = {}, unsigned workers = 1);

/// Spectral density N(x) = A x^-p with x = detuning / unit.
struct SfsModel
{
    double amplitude = 0.0;
    double exponent = 2.9;
    double detuning_unit_hz = 1e9;
    double reference_bandwidth_hz = 2e6; // bandwidth the density refers to

    double expected_count(double detuning_hz, double bin_hz) const;
};

/*!
 * Poisson-scattered ion counts per detuning bin. Columns: detuning (bin
 * centre), count; extras expected_mean and shot_noise = sqrt(mean).
 */
TimeTrace sfs_generate(SfsModel const& model, double detuning_min_hz, double detuning_max_hz,
                       double bin_hz, std::uint64_t seed);

/// Poisson dispersion check of an sfs_generate trace against its expected means.
struct DispersionTest
{
    double variance_to_mean = 0.0; // chi2 / dof
    double chi_square = 0.0;       // sum (N - mu)^2 / mu over bins with mu > 0
    std::size_t dof = 0;
    double p_value = 1.0;          // two-sided
    bool consistent(double alpha = 0.05) const { return p_value >= alpha; }
};

DispersionTest poisson_dispersion_test(TimeTrace const& sfs);

/*!
 * Sums `group` adjacent bins and returns (group centre / detuning unit,
 * counts per reference bandwidth) for a power-law fit. Groups with zero
 * counts are dropped.
 */
std::vector<std::pair<double, double>> sfs_binned_density(TimeTrace const& sfs, SfsModel const& model,
                                                          std::size_t group);

/*!
 * Analytic surrogate of the cavity mode: standing wave along x, Gaussian
 * transverse profile. Ions are uniform over x in [0, longitudinal_span) and
 * over a disc of radius transverse_radius.
 */
struct ModeModel
{
    double wavelength_eff_m = 880e-9 / 2.1785;
    double waist_m = 250e-9;
    double transverse_radius_m = 375e-9;
    double longitudinal_span_m = 880e-9 / 2.1785 / 2.0;
};

/// Relative emission rate (g/gmax)^2 of an ion at (x, y, z).
double relative_purcell_rate(ModeModel const& mode, double x, double y, double z);

struct Histogram
{
    std::vector<double> edges;     // bins + 1 edges over [0, 1]
    std::vector<std::uint64_t> counts;
    std::vector<double> fractions;
};

Histogram coupling_histogram(ModeModel const& mode, std::size_t samples, std::size_t bins,
                             std::uint64_t seed, unsigned workers = 1);

} // namespace rexsim::photonstats

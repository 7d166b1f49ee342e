#include "rexsim/photonstats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "rexsim/errors.hpp"
#include "rexsim/numeric_format.hpp"
#include "rexsim/parallel.hpp"
#include "rexsim/rng.hpp"
#include "rexsim/units.hpp"

namespace rexsim {

unsigned poisson_draw(CounterRng& rng, double mean)
{
    if (!(mean > 0.0))
        return 0;
    std::poisson_distribution<unsigned> dist(mean);
    return dist(rng);
}

} // namespace rexsim

namespace rexsim::photonstats {

namespace {

bool is_probability(double p)
{
    return p >= 0.0 && p <= 1.0;
}

// Outcome bits drawn for every pulse regardless of the emitter state.
enum : std::uint8_t
{
    kRecover = 1,
    kExcite = 2,
    kDetect = 4,
    kShelve = 8,
};

} // namespace

void EmitterLevelScheme::validate() const
{
    if (!is_probability(excitation_probability) || !is_probability(detection_probability)
        || !is_probability(shelving_probability))
        throw ValidationError("emitter scheme: probabilities must lie in [0, 1]");
    if (!(shelf_recovery_rate_hz > 0.0))
        throw ValidationError("emitter scheme: shelf recovery rate must be > 0");
    if (!(cavity_lifetime_s > 0.0))
        throw ValidationError("emitter scheme: cavity lifetime must be > 0");
}

void BackgroundModel::validate() const
{
    if (!(counts_per_pulse >= 0.0) || !(dark_count_rate_hz >= 0.0) || !(gate_window_s >= 0.0))
        throw ValidationError("background model: rates must be >= 0");
}

double CountRecord::mean_counts() const
{
    if (counts.empty())
        return 0.0;
    double sum = 0.0;
    for (auto c : counts)
        sum += c;
    return sum / static_cast<double>(counts.size());
}

CountRecord simulate_emitter_stream(EmitterLevelScheme const& scheme, BackgroundModel const& background,
                                    std::size_t pulses, double period_s, std::uint64_t seed,
                                    unsigned workers)
{
    scheme.validate();
    background.validate();
    if (pulses < 1)
        throw ValidationError("simulate_emitter_stream: need at least one pulse");
    if (!(period_s > 0.0))
        throw ValidationError("simulate_emitter_stream: pulse period must be > 0");

    double const recover = -std::expm1(-scheme.shelf_recovery_rate_hz * period_s);
    double const bg_mean = background.mean_per_pulse();

    CountRecord rec;
    rec.period_s = period_s;
    rec.seed = seed;
    rec.counts.assign(pulses, 0);
    std::vector<std::uint8_t> outcome(pulses, 0);

    parallel_for_chunks(pulses, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            CounterRng rng(seed, i);
            std::uint8_t bits = 0;
            if (rng.uniform() < recover)
                bits |= kRecover;
            if (rng.uniform() < scheme.excitation_probability)
                bits |= kExcite;
            if (rng.uniform() < scheme.detection_probability)
                bits |= kDetect;
            if (rng.uniform() < scheme.shelving_probability)
                bits |= kShelve;
            outcome[i] = bits;
            rec.counts[i] = poisson_draw(rng, bg_mean);
        }
    });

    // The shelf couples consecutive pulses, so the state walk is sequential.
    bool shelved = false;
    for (std::size_t i = 0; i < pulses; ++i)
    {
        std::uint8_t const bits = outcome[i];
        if (shelved && (bits & kRecover))
            shelved = false;
        if (shelved || !(bits & kExcite))
            continue;
        if (bits & kDetect)
            ++rec.counts[i];
        if (bits & kShelve)
            shelved = true;
    }
    return rec;
}

double stationary_active_fraction(EmitterLevelScheme const& scheme, double period_s)
{
    scheme.validate();
    double const r = -std::expm1(-scheme.shelf_recovery_rate_hz * period_s);
    double const s = scheme.excitation_probability * scheme.shelving_probability;
    return r / (r + s * (1.0 - r));
}

double signal_fraction(EmitterLevelScheme const& scheme, BackgroundModel const& background, double period_s)
{
    background.validate();
    double const signal = scheme.excitation_probability * scheme.detection_probability
                          * stationary_active_fraction(scheme, period_s);
    double const total = signal + background.mean_per_pulse();
    if (!(total > 0.0))
        throw DomainError("signal_fraction: no counts expected");
    return signal / total;
}

void write_count_record(std::ostream& os, CountRecord const& rec)
{
    os << "# format: count_record\n";
    os << "# period_s: " << format_double(rec.period_s) << '\n';
    os << "# pulses: " << rec.pulses() << '\n';
    os << "# seed: " << rec.seed << '\n';
    os << "pulse_index,count\n";
    for (std::size_t i = 0; i < rec.counts.size(); ++i)
        os << i << ',' << rec.counts[i] << '\n';
}

CountRecord read_count_record(std::istream& is)
{
    CountRecord rec;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(is, line))
    {
        ++line_no;
        if (line.empty())
            continue;
        if (line[0] == '#')
        {
            auto const colon = line.find(':');
            if (colon == std::string::npos)
                continue;
            std::string key = line.substr(1, colon - 1);
            std::string value = line.substr(colon + 1);
            auto trim = [](std::string& s) {
                s.erase(0, s.find_first_not_of(' '));
                s.erase(s.find_last_not_of(" \r") + 1);
            };
            trim(key);
            trim(value);
            if (key == "period_s")
                rec.period_s = parse_double(value).value_or(0.0);
            else if (key == "seed")
                rec.seed = std::stoull(value);
            continue;
        }
        if (!header_seen)
        {
            header_seen = true;
            continue;
        }
        auto const comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("count record line " + std::to_string(line_no) + ": expected 'index,count'");
        auto const count = parse_double(std::string_view(line).substr(comma + 1));
        if (!count || *count < 0.0 || std::floor(*count) != *count)
            throw ValidationError("count record line " + std::to_string(line_no)
                                  + ": count must be a non-negative integer");
        rec.counts.push_back(static_cast<std::uint32_t>(*count));
    }
    if (!(rec.period_s > 0.0))
        throw ValidationError("count record: missing or invalid '# period_s' line");
    return rec;
}

double G2Result::std_error(std::size_t lag) const
{
    auto const* col = trace.find_extra("std_error");
    return col ? col->values.at(lag) : 0.0;
}

G2Result g2_estimator(CountRecord const& rec, G2Options const& opt)
{
    std::size_t const n = rec.counts.size();
    if (n == 0)
        throw InsufficientDataError("g2_estimator: empty count record");
    if (opt.far_lag_min < 1 || opt.far_lag_min > opt.far_lag_max)
        throw ValidationError("g2_estimator: invalid far-lag window");
    std::size_t const top_lag = std::max(opt.max_lag, opt.far_lag_max);
    if (top_lag >= n)
        throw InsufficientDataError("g2_estimator: record shorter than the largest lag");

    // Sparse pass: counts are mostly zero.
    std::vector<std::size_t> hits;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (rec.counts[i] != 0)
            hits.push_back(i);
    }
    std::vector<double> coincidences(top_lag + 1, 0.0);
    for (std::size_t a = 0; a < hits.size(); ++a)
    {
        std::size_t const i = hits[a];
        double const ni = rec.counts[i];
        coincidences[0] += ni * (ni - 1.0);
        for (std::size_t b = a + 1; b < hits.size(); ++b)
        {
            std::size_t const lag = hits[b] - i;
            if (lag > top_lag)
                break;
            coincidences[lag] += ni * rec.counts[hits[b]];
        }
    }

    auto per_pair = [&](std::size_t lag) {
        return coincidences[lag] / static_cast<double>(n - lag);
    };
    G2Result out;
    double norm = 0.0;
    for (std::size_t m = opt.far_lag_min; m <= opt.far_lag_max; ++m)
    {
        norm += per_pair(m);
        out.far_coincidences += coincidences[m];
    }
    norm /= static_cast<double>(opt.far_lag_max - opt.far_lag_min + 1);
    if (out.far_coincidences < opt.min_far_coincidences || !(norm > 0.0))
        throw InsufficientDataError("g2_estimator: normalization window holds "
                                    + std::to_string(static_cast<long long>(out.far_coincidences))
                                    + " coincidences, fewer than required");
    out.normalization = norm;

    Column lag_pulses{"lag_pulses", "1", {}};
    Column err{"std_error", "1", {}};
    Column coinc{"coincidences", "1", {}};
    out.trace.x = {"lag", "s", {}};
    out.trace.y = {"g2", "1", {}};
    for (std::size_t m = 0; m <= opt.max_lag; ++m)
    {
        double const g = per_pair(m) / norm;
        out.trace.x.values.push_back(static_cast<double>(m) * rec.period_s);
        out.trace.y.values.push_back(g);
        lag_pulses.values.push_back(static_cast<double>(m));
        coinc.values.push_back(coincidences[m]);
        double const c = std::max(coincidences[m], 1.0);
        err.values.push_back(coincidences[m] > 0.0 ? g / std::sqrt(c)
                                                   : 1.0 / (norm * static_cast<double>(n - m)));
    }
    out.trace.extra = {std::move(lag_pulses), std::move(err), std::move(coinc)};
    out.trace.add_meta("pulses", static_cast<double>(n));
    out.trace.add_meta("period_s", rec.period_s);
    out.trace.add_meta("seed", std::to_string(rec.seed));
    out.trace.add_meta("far_lag_min", static_cast<double>(opt.far_lag_min));
    out.trace.add_meta("far_lag_max", static_cast<double>(opt.far_lag_max));
    out.trace.validate();
    return out;
}

double g2_zero_analytic(double rho)
{
    if (!(rho >= 0.0 && rho <= 1.0))
        throw DomainError("g2_zero_analytic: signal fraction must lie in [0, 1]");
    return 1.0 - rho * rho;
}

BunchingAnalysis analyse_bunching(G2Result g2, double period_s, std::size_t max_fit_lag)
{
    BunchingAnalysis out;
    out.g2 = std::move(g2);
    auto const g = [&](std::size_t m) { return out.g2.g2(m); };
    std::size_t const last = std::min(max_fit_lag, out.g2.trace.size() - 1);
    if (last < 1)
        throw InsufficientDataError("analyse_bunching: need at least lag 1");
    out.bunching_present = g(1) - 1.0 > 3.0 * out.g2.std_error(1);
    if (!out.bunching_present || last < 2)
        return out;

    std::vector<double> y, w;
    for (std::size_t m = 1; m <= last; ++m)
    {
        double const s = std::max(out.g2.std_error(m), 1e-12);
        y.push_back(g(m) - 1.0);
        w.push_back(1.0 / (s * s));
    }
    // chi^2 with the amplitude profiled out
    auto profile = [&](double lambda, double& amp) {
        double num = 0.0, den = 0.0, f = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            f *= lambda;
            num += w[i] * y[i] * f;
            den += w[i] * f * f;
        }
        amp = den > 0.0 ? num / den : 0.0;
        double chi2 = 0.0;
        f = 1.0;
        for (std::size_t i = 0; i < y.size(); ++i)
        {
            f *= lambda;
            double const r = y[i] - amp * f;
            chi2 += w[i] * r * r;
        }
        return chi2;
    };
    double amp = 0.0;
    auto const best = boost::math::tools::brent_find_minima(
        [&](double lambda) { return profile(lambda, amp); }, 1e-6, 1.0 - 1e-9, 40);
    double const lambda = best.first;
    profile(lambda, amp);
    if (amp > 0.0 && lambda < 1.0)
    {
        out.amplitude = amp;
        out.lag_constant_s = -period_s / std::log(lambda);
        out.shoulder_edge_s = 3.0 * out.lag_constant_s;
    }
    return out;
}

BunchingAnalysis bunching_curve(EmitterLevelScheme const& scheme, BackgroundModel const& background,
                                std::size_t pulses, double period_s, std::uint64_t seed,
                                G2Options const& options, unsigned workers)
{
    auto const rec = simulate_emitter_stream(scheme, background, pulses, period_s, seed, workers);
    std::size_t const fit_lags = options.far_lag_min > 1 ? options.far_lag_min - 1 : 1;
    return analyse_bunching(g2_estimator(rec, options), period_s, fit_lags);
}

double SfsModel::expected_count(double detuning_hz, double bin_hz) const
{
    if (amplitude == 0.0)
        return 0.0;
    return amplitude * std::pow(detuning_hz / detuning_unit_hz, -exponent) * bin_hz / reference_bandwidth_hz;
}

TimeTrace sfs_generate(SfsModel const& model, double lo, double hi, double bin, std::uint64_t seed)
{
    if (!(lo > 0.0) || !(hi > lo) || !(bin > 0.0))
        throw ValidationError("sfs_generate: need 0 < min < max and bin > 0");
    if (!(model.amplitude >= 0.0) || !(model.detuning_unit_hz > 0.0) || !(model.reference_bandwidth_hz > 0.0))
        throw ValidationError("sfs_generate: invalid density model");
    auto const bins = static_cast<std::size_t>(std::floor((hi - lo) / bin));
    if (bins == 0)
        throw ValidationError("sfs_generate: range narrower than one bin");

    TimeTrace out;
    out.x = {"detuning", "Hz", {}};
    out.y = {"ion_count", "1", {}};
    Column mean{"expected_mean", "1", {}};
    Column noise{"shot_noise", "1", {}};
    for (std::size_t k = 0; k < bins; ++k)
    {
        double const centre = lo + (static_cast<double>(k) + 0.5) * bin;
        double const mu = model.expected_count(centre, bin);
        CounterRng rng(seed, k);
        out.x.values.push_back(centre);
        out.y.values.push_back(poisson_draw(rng, mu));
        mean.values.push_back(mu);
        noise.values.push_back(std::sqrt(mu));
    }
    out.extra = {std::move(mean), std::move(noise)};
    out.add_meta("amplitude", model.amplitude);
    out.add_meta("exponent", model.exponent);
    out.add_meta("detuning_unit_hz", model.detuning_unit_hz);
    out.add_meta("reference_bandwidth_hz", model.reference_bandwidth_hz);
    out.add_meta("bin_hz", bin);
    out.add_meta("seed", std::to_string(seed));
    out.validate();
    return out;
}

DispersionTest poisson_dispersion_test(TimeTrace const& sfs)
{
    auto const* mean = sfs.find_extra("expected_mean");
    if (!mean)
        throw ValidationError("poisson_dispersion_test: trace has no expected_mean column");
    DispersionTest out;
    for (std::size_t i = 0; i < sfs.size(); ++i)
    {
        double const mu = mean->values[i];
        if (!(mu > 0.0))
            continue;
        double const d = sfs.y.values[i] - mu;
        out.chi_square += d * d / mu;
        ++out.dof;
    }
    if (out.dof < 2)
        throw InsufficientDataError("poisson_dispersion_test: need at least two bins with a positive mean");
    out.variance_to_mean = out.chi_square / static_cast<double>(out.dof);
    boost::math::chi_squared const dist(static_cast<double>(out.dof));
    double const lower = boost::math::cdf(dist, out.chi_square);
    out.p_value = std::min(1.0, 2.0 * std::min(lower, 1.0 - lower));
    return out;
}

std::vector<std::pair<double, double>> sfs_binned_density(TimeTrace const& sfs, SfsModel const& model,
                                                          std::size_t group)
{
    if (group < 1)
        throw ValidationError("sfs_binned_density: group must be >= 1");
    if (sfs.size() < 2)
        throw InsufficientDataError("sfs_binned_density: need at least two bins");
    double const bin = sfs.x.values[1] - sfs.x.values[0];
    std::vector<std::pair<double, double>> out;
    for (std::size_t start = 0; start + group <= sfs.size(); start += group)
    {
        double counts = 0.0;
        for (std::size_t i = start; i < start + group; ++i)
            counts += sfs.y.values[i];
        if (counts <= 0.0)
            continue;
        double const centre = 0.5 * (sfs.x.values[start] + sfs.x.values[start + group - 1]);
        double const width = bin * static_cast<double>(group);
        out.emplace_back(centre / model.detuning_unit_hz, counts * model.reference_bandwidth_hz / width);
    }
    return out;
}

double relative_purcell_rate(ModeModel const& mode, double x, double y, double z)
{
    double const g = std::abs(std::cos(constants::two_pi * x / mode.wavelength_eff_m))
                     * std::exp(-(y * y + z * z) / (mode.waist_m * mode.waist_m));
    return g * g;
}

Histogram coupling_histogram(ModeModel const& mode, std::size_t samples, std::size_t bins,
                             std::uint64_t seed, unsigned workers)
{
    if (samples < 1000)
        throw ValidationError("coupling_histogram: need at least 1000 samples");
    if (bins < 1)
        throw ValidationError("coupling_histogram: need at least one bin");
    if (!(mode.wavelength_eff_m > 0.0) || !(mode.waist_m > 0.0) || mode.transverse_radius_m < 0.0
        || mode.longitudinal_span_m < 0.0)
        throw ValidationError("coupling_histogram: invalid mode model");

    std::vector<std::uint32_t> bin_of(samples);
    parallel_for_chunks(samples, workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            CounterRng rng(seed, i);
            double const x = rng.uniform() * mode.longitudinal_span_m;
            // uniform over the disc
            double const rho = mode.transverse_radius_m * std::sqrt(rng.uniform());
            double const phi = constants::two_pi * rng.uniform();
            double const rate = relative_purcell_rate(mode, x, rho * std::cos(phi), rho * std::sin(phi));
            auto k = static_cast<std::size_t>(rate * static_cast<double>(bins));
            bin_of[i] = static_cast<std::uint32_t>(std::min(k, bins - 1));
        }
    });

    Histogram h;
    h.counts.assign(bins, 0);
    for (auto k : bin_of)
        ++h.counts[k];
    for (std::size_t k = 0; k <= bins; ++k)
        h.edges.push_back(static_cast<double>(k) / static_cast<double>(bins));
    for (auto c : h.counts)
        h.fractions.push_back(static_cast<double>(c) / static_cast<double>(samples));
    return h;
}

} // namespace rexsim::photonstats

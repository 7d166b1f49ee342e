#include "rexsim/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>

#include <fftw3.h>

#include "rexsim/errors.hpp"
#include "rexsim/units.hpp"

namespace rexsim {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree
{
    void operator()(void* p) const { fftw_free(p); }
};

struct PlanDestroy
{
    void operator()(fftw_plan p) const
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

} // namespace

Spectrum amplitude_spectrum(std::span<double const> samples, double dt, Window window,
                            std::size_t padded_length)
{
    std::size_t const n = samples.size();
    if (n < 4)
        throw InsufficientDataError("amplitude_spectrum: need at least 4 samples");
    if (!(dt > 0.0))
        throw DomainError("amplitude_spectrum: sample spacing must be > 0");
    std::size_t const len = std::max(n, padded_length);

    double const mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (len / 2 + 1))));

    double window_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double w = 1.0;
        if (window == Window::hann)
            w = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(n - 1));
        window_sum += w;
        in.get()[i] = (samples[i] - mean) * w;
    }
    std::fill(in.get() + n, in.get() + len, 0.0);

    std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(len), in.get(), out.get(), FFTW_ESTIMATE));
    }
    if (!plan)
        throw NumericError("amplitude_spectrum: FFTW planning failed");
    fftw_execute(plan.get());

    Spectrum s;
    s.resolution_hz = 1.0 / (static_cast<double>(len) * dt);
    std::size_t const bins = len / 2 + 1;
    s.frequency_hz.resize(bins);
    s.amplitude.resize(bins);
    for (std::size_t k = 0; k < bins; ++k)
    {
        s.frequency_hz[k] = static_cast<double>(k) * s.resolution_hz;
        double const re = out.get()[k][0];
        double const im = out.get()[k][1];
        // scaled so a unit-amplitude sinusoid on a bin centre reads 1
        s.amplitude[k] = 2.0 * std::hypot(re, im) / window_sum;
    }
    return s;
}

double dominant_frequency(Spectrum const& s, double min_hz)
{
    double best = -1.0;
    double where = 0.0;
    for (std::size_t k = 0; k < s.amplitude.size(); ++k)
    {
        if (s.frequency_hz[k] < min_hz)
            continue;
        if (s.amplitude[k] > best)
        {
            best = s.amplitude[k];
            where = s.frequency_hz[k];
        }
    }
    if (best < 0.0)
        throw FitError("dominant_frequency: no bins above the requested minimum frequency");
    return where;
}

std::vector<double> spectral_peaks(Spectrum const& s, double relative_threshold)
{
    auto const& a = s.amplitude;
    if (a.size() < 3)
        return {};
    double const top = *std::max_element(a.begin(), a.end());
    std::vector<double> peaks;
    for (std::size_t k = 1; k + 1 < a.size(); ++k)
    {
        if (a[k] > a[k - 1] && a[k] >= a[k + 1] && a[k] > relative_threshold * top)
            peaks.push_back(s.frequency_hz[k]);
    }
    return peaks;
}

} // namespace rexsim

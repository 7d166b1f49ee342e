#pragma once

#include <span>
#include <vector>

namespace rexsim {

enum class Window
{
    rectangular,
    hann,
};

/// One-sided amplitude spectrum of a uniformly sampled real signal.
struct Spectrum
{
    std::vector<double> frequency_hz;
    std::vector<double> amplitude;
    double resolution_hz = 0.0;
};

/*!
 * Mean-removed, windowed amplitude spectrum (FFTW r2c). The signal is
 * zero-padded to `padded_length` when that exceeds the sample count.
 */
Spectrum amplitude_spectrum(std::span<double const> samples, double dt_s,
                            Window window = Window::hann, std::size_t padded_length = 0);

/// Frequency of the largest bin at or above `min_hz`.
double dominant_frequency(Spectrum const& spectrum, double min_hz = 0.0);

/// Local maxima whose amplitude exceeds `relative_threshold` times the largest bin.
std::vector<double> spectral_peaks(Spectrum const& spectrum, double relative_threshold);

} // namespace rexsim

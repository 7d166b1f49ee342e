#include "rexsim/dynamics/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rexsim/errors.hpp"

namespace rexsim::dynamics {

LinearFit linear_regression(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size())
        throw ValidationError("linear_regression: x and y differ in length");
    std::size_t const n = x.size();
    if (n < 2)
        throw InsufficientDataError("linear_regression: need at least two points");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw FitError("linear_regression: abscissa has zero spread");

    LinearFit fit;
    fit.points = n;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        double const r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss += r * r;
    }
    fit.rms_residual = std::sqrt(ss / static_cast<double>(n));
    if (n > 2)
    {
        double const s2 = ss / static_cast<double>(n - 2);
        fit.slope_std_error = std::sqrt(s2 / sxx);
        fit.intercept_std_error = std::sqrt(s2 * (1.0 / static_cast<double>(n) + mx * mx / sxx));
    }
    return fit;
}

T2StarFit extract_t2star(TimeTrace const& fringes)
{
    auto const& t = fringes.x.values;
    std::size_t const n = t.size();
    if (n < 8)
        throw InsufficientDataError("extract_t2star: need at least 8 points");

    std::vector<double> contrast(n);
    for (std::size_t i = 0; i < n; ++i)
        contrast[i] = std::abs(2.0 * fringes.y.values[i] - 1.0);
    double const top = *std::max_element(contrast.begin(), contrast.end());

    constexpr std::size_t half_window = 3;
    std::vector<double> px, py;
    for (std::size_t i = 0; i < n; ++i)
    {
        std::size_t const lo = i >= half_window ? i - half_window : 0;
        std::size_t const hi = std::min(n - 1, i + half_window);
        bool is_peak = contrast[i] > 0.05 * top;
        for (std::size_t j = lo; j <= hi && is_peak; ++j)
        {
            if (j != i && (contrast[j] > contrast[i] || (j < i && contrast[j] == contrast[i])))
                is_peak = false;
        }
        if (!is_peak)
            continue;
        double tp = t[i];
        double yp = contrast[i];
        if (i > 0 && i + 1 < n)
        {
            double const y0 = contrast[i - 1], y1 = contrast[i], y2 = contrast[i + 1];
            double const curvature = y0 - 2.0 * y1 + y2;
            double const h = t[i + 1] - t[i];
            if (curvature < 0.0 && std::abs(t[i] - t[i - 1] - h) < 1e-9 * h)
            {
                double const offset = 0.5 * (y0 - y2) / curvature; // in samples, |offset| <= 1/2
                tp = t[i] + offset * h;
                yp = y1 - 0.25 * (y0 - y2) * offset;
            }
        }
        px.push_back(tp);
        py.push_back(std::log(yp));
    }

    T2StarFit fit;
    fit.used_envelope_peaks = px.size() >= 3;
    if (!fit.used_envelope_peaks)
    {
        px.clear();
        py.clear();
        for (std::size_t i = 0; i < n; ++i)
        {
            if (contrast[i] > 0.0)
            {
                px.push_back(t[i]);
                py.push_back(std::log(contrast[i]));
            }
        }
    }
    if (px.size() < 2)
        throw FitError("extract_t2star: not enough usable envelope points");

    auto const line = linear_regression(px, py);
    if (!(line.slope < 0.0))
        throw FitError("extract_t2star: fringe envelope does not decay");
    double const t2 = -1.0 / line.slope;
    fit.t2_star_s = {t2, line.slope_std_error / (line.slope * line.slope)};
    fit.amplitude = std::exp(line.intercept);
    fit.points_used = px.size();
    return fit;
}

EchoFit fit_t2_from_echo(TimeTrace const& echo, double t_min_s)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < echo.size(); ++i)
    {
        if (echo.x.values[i] >= t_min_s && echo.y.values[i] > 0.0)
        {
            x.push_back(echo.x.values[i]);
            y.push_back(std::log(echo.y.values[i]));
        }
    }
    if (x.size() < 5)
        throw InsufficientDataError("fit_t2_from_echo: need at least 5 points beyond t_min");
    auto const line = linear_regression(x, y);
    if (!(line.slope < 0.0))
        throw FitError("fit_t2_from_echo: echo intensity does not decay");
    EchoFit fit;
    double const t2 = -4.0 / line.slope;
    fit.t2_s = {t2, 4.0 * line.slope_std_error / (line.slope * line.slope)};
    fit.rms_log_residual = line.rms_residual;
    fit.points_used = x.size();
    fit.modulation_suspected = line.rms_residual > 0.02;
    return fit;
}

Measured<OrdinaryFrequency> fit_pure_dephasing(std::span<CoherencePoint const> points)
{
    std::size_t const n = points.size();
    if (n < 2)
        throw InsufficientDataError("fit_pure_dephasing: need at least two (T1, T2) points");
    std::vector<double> d(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        auto const& p = points[i];
        if (!(p.t1_s > 0.0) || !(p.t2_s > 0.0))
            throw DomainError("fit_pure_dephasing: lifetimes must be > 0");
        d[i] = 1.0 / (constants::pi * p.t2_s) - 1.0 / (constants::two_pi * p.t1_s);
        mean += d[i];
    }
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : d)
        ss += (v - mean) * (v - mean);
    double const se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return {OrdinaryFrequency{mean}, OrdinaryFrequency{se}};
}

PowerLawFit fit_power_law(std::span<std::pair<double, double> const> points)
{
    if (points.size() < 2)
        throw InsufficientDataError("fit_power_law: need at least two points");
    std::vector<double> lx, ly;
    lx.reserve(points.size());
    ly.reserve(points.size());
    for (auto const& [x, n] : points)
    {
        if (!(x > 0.0) || !(n > 0.0))
            throw DomainError("fit_power_law: detunings and densities must be > 0");
        lx.push_back(std::log(x));
        ly.push_back(std::log(n));
    }
    auto const line = linear_regression(lx, ly);
    return {-line.slope, std::exp(line.intercept), line.slope_std_error};
}

double single_ion_threshold(double amplitude, double exponent)
{
    if (!(amplitude > 0.0) || !(exponent > 0.0))
        throw DomainError("single_ion_threshold: amplitude and exponent must be > 0");
    return std::pow(amplitude, 1.0 / exponent);
}

} // namespace rexsim::dynamics

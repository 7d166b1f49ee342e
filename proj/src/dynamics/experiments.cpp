#include "rexsim/dynamics/experiments.hpp"

#include <cmath>

#include "rexsim/errors.hpp"
#include "rexsim/parallel.hpp"

namespace rexsim::dynamics {

namespace c = constants;

TimeTrace rabi_nutation_scan(AngularRate g0, std::span<double const> nbar, double pulse_s,
                             TwoLevelParams const& relaxation, unsigned workers)
{
    if (!(pulse_s > 0.0))
        throw DomainError("rabi_nutation_scan: pulse length must be > 0");
    auto const p = relaxation.normalized();
    std::vector<double> pl(nbar.size());
    parallel_for_chunks(nbar.size(), workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            if (!(nbar[i] >= 0.0))
                throw DomainError("rabi_nutation_scan: mean photon number must be >= 0");
            AngularRate const rabi{2.0 * g0.rad_per_s() * std::sqrt(nbar[i])};
            PulseSegment const pulse{pulse_s, rabi, 0.0, p.detuning};
            pl[i] = evolve_segment(BlochState::ground(), pulse, p.t1_s, p.t2_s).excited_population();
        }
    });

    TimeTrace out;
    out.x = {"mean_photon_number", "1", {nbar.begin(), nbar.end()}};
    out.y = {"excited_population", "1", std::move(pl)};
    out.add_meta("g0_over_2pi_hz", ordinary_from_angular(g0).hz());
    out.add_meta("pulse_s", pulse_s);
    out.add_meta("t1_s", p.t1_s);
    out.add_meta("t2_s", p.t2_s);
    out.add_meta("detuning_hz", ordinary_from_angular(p.detuning).hz());
    out.validate();
    return out;
}

std::vector<cavity::RabiPoint> extract_rabi_points(TimeTrace const& scan, double pulse_s)
{
    auto const& nbar = scan.x.values;
    auto const& pl = scan.y.values;
    std::vector<cavity::RabiPoint> out;
    int extremum = 0; // count of extrema seen; odd -> maximum
    for (std::size_t i = 1; i + 1 < pl.size(); ++i)
    {
        bool const is_max = pl[i] > pl[i - 1] && pl[i] >= pl[i + 1];
        bool const is_min = pl[i] < pl[i - 1] && pl[i] <= pl[i + 1];
        if (!is_max && !is_min)
            continue;
        // the first extremum after nbar = 0 is the pi-pulse maximum
        if (extremum == 0 && is_min)
            continue;
        ++extremum;
        // parabola through three points in x = sqrt(nbar)
        double const x0 = std::sqrt(nbar[i - 1]), x1 = std::sqrt(nbar[i]), x2 = std::sqrt(nbar[i + 1]);
        double const y0 = pl[i - 1], y1 = pl[i], y2 = pl[i + 1];
        double const denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
        double x_peak = x1;
        if (denom != 0.0)
        {
            double const a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
            double const b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
            if (a != 0.0)
            {
                double const vertex = -b / (2.0 * a);
                if (vertex > x0 && vertex < x2)
                    x_peak = vertex;
            }
        }
        double const area = c::pi * static_cast<double>(extremum);
        out.push_back({x_peak * x_peak, AngularRate{area / pulse_s}});
    }
    return out;
}

namespace {

double envelope_value(EnvelopeShape shape, double t, double t2_star)
{
    double const r = t / t2_star;
    return shape == EnvelopeShape::gaussian ? std::exp(-r * r) : std::exp(-r);
}

} // namespace

TimeTrace simulate_ramsey(RamseyModel const& m, std::span<double const> delays)
{
    if (!(m.t2_star_s > 0.0))
        throw ValidationError("simulate_ramsey: T2* must be > 0");
    TimeTrace out;
    out.x = {"delay", "s", {delays.begin(), delays.end()}};
    out.y.name = m.t1_background_s > 0.0 ? "ramsey_signal" : "ramsey_normalized";
    out.y.unit = "1";
    out.y.values.reserve(delays.size());
    for (double t : delays)
    {
        double s = 0.5
                   * (1.0
                      + std::cos(c::two_pi * m.laser_detuning.hz() * t) * std::cos(c::pi * m.beat.hz() * t)
                            * envelope_value(m.shape, t, m.t2_star_s));
        if (m.t1_background_s > 0.0)
            s *= std::exp(-t / m.t1_background_s);
        out.y.values.push_back(s);
    }
    out.add_meta("beat_hz", m.beat.hz());
    out.add_meta("t2_star_s", m.t2_star_s);
    out.add_meta("laser_detuning_hz", m.laser_detuning.hz());
    out.add_meta("envelope", m.shape == EnvelopeShape::gaussian ? "gaussian" : "exponential");
    if (m.t1_background_s > 0.0)
        out.add_meta("t1_background_s", m.t1_background_s);
    out.validate();
    return out;
}

TimeTrace remove_t1_background(TimeTrace trace, double t1_s)
{
    if (!(t1_s > 0.0))
        throw DomainError("remove_t1_background: T1 must be > 0");
    for (std::size_t i = 0; i < trace.size(); ++i)
        trace.y.values[i] *= std::exp(trace.x.values[i] / t1_s);
    trace.y.name = "ramsey_normalized";
    return trace;
}

RamseyBeat ramsey_beat_spectrum(TimeTrace const& fringes, double t2_star_s, EnvelopeShape shape)
{
    auto const& t = fringes.x.values;
    if (t.size() < 8)
        throw InsufficientDataError("ramsey_beat_spectrum: need at least 8 samples");
    double const dt = t[1] - t[0];
    for (std::size_t i = 1; i < t.size(); ++i)
    {
        if (std::abs((t[i] - t[i - 1]) - dt) > 1e-6 * dt)
            throw ValidationError("ramsey_beat_spectrum: trace must be uniformly sampled");
    }
    std::vector<double> contrast(t.size());
    for (std::size_t i = 0; i < t.size(); ++i)
    {
        double const e = envelope_value(shape, t[i], t2_star_s);
        double const d = (2.0 * fringes.y.values[i] - 1.0) / e;
        contrast[i] = d * d;
    }
    RamseyBeat out;
    out.spectrum = amplitude_spectrum(contrast, dt);
    out.beat_hz = dominant_frequency(out.spectrum, out.spectrum.resolution_hz);
    return out;
}

TimeTrace simulate_echo_decay(double t2_s, std::function<double(double)> const& envelope,
                              std::span<double const> t12, double intensity0)
{
    if (!(t2_s > 0.0))
        throw ValidationError("simulate_echo_decay: T2 must be > 0");
    TimeTrace out;
    out.x = {"pulse_separation", "s", {t12.begin(), t12.end()}};
    out.y.name = "echo_intensity";
    out.y.unit = "arb";
    out.y.values.reserve(t12.size());
    for (double t : t12)
    {
        double const v = envelope ? envelope(t) : 1.0;
        out.y.values.push_back(intensity0 * std::exp(-4.0 * t / t2_s) * v * v);
    }
    out.add_meta("t2_s", t2_s);
    out.add_meta("modulated", envelope ? "yes" : "no");
    out.validate();
    return out;
}

} // namespace rexsim::dynamics

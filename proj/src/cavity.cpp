#include "rexsim/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rexsim/errors.hpp"

namespace rexsim::cavity {

namespace c = constants;

void CavityDevice::validate() const
{
    if (!(quality_factor > 0.0))
        throw ValidationError("cavity: quality factor must be > 0");
    if (!(mode_volume_m3 > 0.0))
        throw ValidationError("cavity: mode volume must be > 0");
    if (!(coupling_fraction > 0.0 && coupling_fraction <= 1.0))
        throw ValidationError("cavity: coupling fraction must lie in (0, 1]");
    if (!(resonance.rad_per_s() > 0.0))
        throw ValidationError("cavity: resonance frequency must be > 0");
    if (kappa)
    {
        if (!(kappa->rad_per_s() > 0.0))
            throw ValidationError("cavity: kappa must be > 0");
        double const from_q = kappa_from_q(resonance, quality_factor).rad_per_s();
        if (std::abs(kappa->rad_per_s() - from_q) > 0.05 * from_q)
            throw ValidationError("cavity: supplied kappa and omega0/Q disagree by more than 5 %");
    }
}

KappaResolution resolve_kappa(CavityDevice const& device)
{
    device.validate();
    AngularRate const from_q = kappa_from_q(device.resonance, device.quality_factor);
    if (!device.kappa)
        return {from_q, std::nullopt};

    KappaResolution out{*device.kappa, std::nullopt};
    double const rel = device.kappa->rad_per_s() / from_q.rad_per_s() - 1.0;
    if (rel != 0.0)
    {
        std::ostringstream msg;
        msg << "supplied kappa = 2pi x " << ordinary_from_angular(*device.kappa).hz() / 1e9
            << " GHz differs from omega0/Q = 2pi x " << ordinary_from_angular(from_q).hz() / 1e9
            << " GHz by " << rel * 100.0 << " %; using the supplied value";
        out.warning = msg.str();
    }
    return out;
}

void DetectionChain::validate() const
{
    for (auto const& s : stages)
    {
        if (!(s.efficiency > 0.0 && s.efficiency <= 1.0))
            throw ValidationError("detection stage '" + s.name + "' efficiency must lie in (0, 1]");
    }
    if (!(dark_count_rate_hz >= 0.0))
        throw ValidationError("detection: dark count rate must be >= 0");
}

OrdinaryFrequency CoherenceSummary::homogeneous_linewidth() const
{
    return OrdinaryFrequency{1.0 / (c::pi * t2_s)};
}

void CoherenceSummary::validate() const
{
    if (!(t1_s > 0.0) || !(t2_s > 0.0))
        throw ValidationError("coherence: T1 and T2 must be > 0");
    if (t2_s > 2.0 * t1_s * 1.05)
        throw ValidationError("coherence: T2 exceeds 2 T1 beyond the 5 % tolerance");
    if (pure_dephasing.hz() < 0.0)
        throw ValidationError("coherence: pure dephasing rate must be >= 0");
}

AngularRate kappa_from_q(AngularRate resonance, double q)
{
    if (!(q > 0.0))
        throw DomainError("kappa_from_q: Q must be > 0");
    return AngularRate{resonance.rad_per_s() / q};
}

double max_purcell(double wavelength_m, double n, double chi, double q, double volume_m3)
{
    double const lambda_n = wavelength_m / n;
    return 3.0 / (4.0 * c::pi * c::pi * chi * chi) * lambda_n * lambda_n * lambda_n * q / volume_m3;
}

AngularRate max_coupling_g0(double mu, double n, AngularRate resonance, double volume_m3)
{
    return AngularRate{mu / n
                       * std::sqrt(resonance.rad_per_s()
                                   / (2.0 * c::hbar * c::vacuum_permittivity * volume_m3))};
}

double mean_photon_number(double power_w, AngularRate kappa_in, AngularRate kappa, AngularRate resonance)
{
    double const k = kappa.rad_per_s();
    return 4.0 * power_w * kappa_in.rad_per_s() / (c::hbar * resonance.rad_per_s() * k * k);
}

double cavity_lifetime(AngularRate g0, AngularRate kappa, double beta, double t1_bulk)
{
    if (!(beta > 0.0 && beta <= 1.0))
        throw DomainError("cavity_lifetime: branching ratio must lie in (0, 1]");
    double const g = g0.rad_per_s();
    return 1.0 / (4.0 * g * g / kappa.rad_per_s() + (1.0 - beta) / t1_bulk);
}

double measured_purcell(double t_cav, double t1_bulk, double beta, double t_rad)
{
    double const bulk_rate = (1.0 - beta) / t1_bulk;
    double const excess = 1.0 / t_cav - bulk_rate;
    // equality (to rounding) means no enhancement
    if (excess < -1e-12 * bulk_rate)
        throw DomainError("measured_purcell: cavity lifetime exceeds T1/(1-beta), not physical");
    return std::max(0.0, excess) * t_rad;
}

Measured<AngularRate> g0_from_rabi(std::span<RabiPoint const> points)
{
    if (points.size() < 2)
        throw InsufficientDataError("g0_from_rabi: need at least two (nbar, Omega) points");
    double sxx = 0.0, sxy = 0.0;
    for (auto const& p : points)
    {
        if (!(p.mean_photon_number > 0.0))
            throw DomainError("g0_from_rabi: mean photon numbers must be > 0");
        double const x = std::sqrt(p.mean_photon_number);
        sxx += x * x;
        sxy += x * p.rabi.rad_per_s();
    }
    double const slope = sxy / sxx;
    double ss = 0.0;
    for (auto const& p : points)
    {
        double const r = p.rabi.rad_per_s() - slope * std::sqrt(p.mean_photon_number);
        ss += r * r;
    }
    double const se = std::sqrt(ss / static_cast<double>(points.size() - 1) / sxx);
    return {AngularRate{slope / 2.0}, AngularRate{se / 2.0}};
}

double cooperativity(AngularRate g0, AngularRate kappa, double t2_s)
{
    double const g = g0.rad_per_s();
    double const gamma_h = 2.0 / t2_s;
    return 4.0 * g * g / (kappa.rad_per_s() * gamma_h);
}

double indistinguishability(double t2, double t1)
{
    if (!(t1 > 0.0) || !(t2 >= 0.0))
        throw DomainError("indistinguishability: lifetimes must be positive");
    if (t2 > 2.1 * t1)
        throw InconsistencyError("indistinguishability: T2 exceeds 2 T1 beyond the 5 % tolerance");
    return std::clamp(t2 / (2.0 * t1), 0.0, 1.0);
}

DetectionBudget detection_budget(DetectionChain const& chain)
{
    chain.validate();
    DetectionBudget out;
    for (auto const& s : chain.stages)
    {
        out.overall *= s.efficiency;
        out.rows.push_back({s.name, s.efficiency, out.overall});
    }
    return out;
}

DetectionChain reference_detection_chain()
{
    return DetectionChain{{{"cavity_outcoupling", 0.45},
                           {"waveguide_fiber", 0.19},
                           {"fiber_connectors", 0.80},
                           {"circulator", 0.65},
                           {"detector", 0.82}},
                          2.0};
}

ScalingProjection project_q_scaling(ScalingBase const& base, double factor)
{
    if (!(factor > 0.0))
        throw DomainError("project_q_scaling: factor must be > 0");
    ScalingProjection out;
    out.factor = factor;
    out.kappa = AngularRate{base.kappa.rad_per_s() / factor};
    out.cavity_lifetime_s = cavity_lifetime(base.g0, out.kappa, base.branching_ratio, base.bulk_lifetime_s);
    out.cooperativity = cooperativity(base.g0, out.kappa, base.t2_s);
    double const gamma_rad = 1.0 / (c::two_pi * out.cavity_lifetime_s);
    out.indistinguishability = gamma_rad / (gamma_rad + base.pure_dephasing.hz());
    return out;
}

} // namespace rexsim::cavity

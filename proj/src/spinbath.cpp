#include "rexsim/spinbath.hpp"

#include <array>
#include <cmath>

#include "rexsim/errors.hpp"

namespace rexsim::spinbath {

namespace c = constants;

void SpinBathSite::validate() const
{
    if (!(distance_m > 0.0))
        throw ValidationError("spin bath site '" + label + "': distance must be > 0");
    double const two_i = 2.0 * spin;
    if (!(spin > 0.0) || std::abs(two_i - std::round(two_i)) > 1e-9)
        throw ValidationError("spin bath site '" + label + "': spin must be a positive half-integer");
    if (multiplicity < 1)
        throw ValidationError("spin bath site '" + label + "': multiplicity must be >= 1");
}

int SpinBathSite::sublevel_count() const
{
    return static_cast<int>(std::lround(2.0 * spin)) + 1;
}

double ElectronicMoment::magnitude_j_per_t() const
{
    return g_factor * c::bohr_magneton / 2.0;
}

SpinBathSite yttrium_site()
{
    return SpinBathSite{"Y", 0.5, 2.1e6, 3.9e-10, 0.0, 4};
}

SpinBathSite vanadium_site()
{
    return SpinBathSite{"V", 3.5, 11.2e6, 3.14e-10, 0.0, 1};
}

namespace {

double dipole_prefactor(ElectronicMoment const& moment, SpinBathSite const& site)
{
    if (!(site.distance_m > 0.0))
        throw DomainError("dipolar field: ion-ligand distance must be > 0");
    double const r3 = site.distance_m * site.distance_m * site.distance_m;
    return c::vacuum_permeability / (4.0 * c::pi) * moment.magnitude_j_per_t() / r3;
}

// Effective field at the ligand in a frame with z along the applied field and
// the electronic moment along -z.
std::array<double, 3> effective_field(SpinBathSite const& site, ElectronicMoment const& moment,
                                      double field_t)
{
    double const k = dipole_prefactor(moment, site);
    double const ct = std::cos(site.theta_rad);
    double const st = std::sin(site.theta_rad);
    // B_dip = k [(3cos^2 - 1) m_hat + 3 cos sin x_hat], m_hat = -z
    double const along_moment = k * (3.0 * ct * ct - 1.0);
    double const transverse = k * 3.0 * ct * st;
    return {transverse, 0.0, field_t - along_moment};
}

} // namespace

double dipolar_field(ElectronicMoment const& moment, SpinBathSite const& site)
{
    double const ct = std::cos(site.theta_rad);
    return dipole_prefactor(moment, site) * (3.0 * ct * ct - 1.0);
}

OrdinaryFrequency superhyperfine_splitting(SpinBathSite const& site, ElectronicMoment const& moment,
                                           double field_t)
{
    auto const b = effective_field(site, moment, field_t);
    double const magnitude = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    return OrdinaryFrequency{site.gyromagnetic_hz_per_t * magnitude};
}

SublevelStructure sublevel_count_and_range(SpinBathSite const& site, ElectronicMoment const& moment,
                                           double field_t)
{
    site.validate();
    double const adjacent = superhyperfine_splitting(site, moment, field_t).hz();
    SublevelStructure out;
    out.count = site.sublevel_count();
    out.min_splitting = OrdinaryFrequency{adjacent};
    out.max_splitting = OrdinaryFrequency{adjacent * (out.count - 1)};
    return out;
}

double mims_modulation(OrdinaryFrequency ground, OrdinaryFrequency excited, double depth, double tau)
{
    if (!(depth >= 0.0 && depth <= 1.0))
        throw ValidationError("ESEEM modulation depth must lie in [0, 1]");
    double const g = c::two_pi * ground.hz() * tau;
    double const e = c::two_pi * excited.hz() * tau;
    return 1.0
           - depth / 4.0
                 * (2.0 - 2.0 * std::cos(g) - 2.0 * std::cos(e) + std::cos(g - e) + std::cos(g + e));
}

std::function<double(double)> mims_envelope(OrdinaryFrequency ground, OrdinaryFrequency excited,
                                            double depth)
{
    if (!(depth >= 0.0 && depth <= 1.0))
        throw ValidationError("ESEEM modulation depth must lie in [0, 1]");
    return [=](double tau) { return mims_modulation(ground, excited, depth, tau); };
}

TimeTrace eseem_envelope(OrdinaryFrequency ground, OrdinaryFrequency excited, double depth,
                         std::span<double const> taus)
{
    auto const envelope = mims_envelope(ground, excited, depth);
    TimeTrace out;
    out.x = {"tau", "s", {taus.begin(), taus.end()}};
    out.y.name = "modulation";
    out.y.unit = "1";
    out.y.values.reserve(taus.size());
    for (double t : taus)
        out.y.values.push_back(envelope(t));
    out.add_meta("delta_ground_hz", ground.hz());
    out.add_meta("delta_excited_hz", excited.hz());
    out.add_meta("modulation_depth", depth);
    out.validate();
    return out;
}

void FlipFlopParams::validate() const
{
    if (!(intrinsic_linewidth.hz() > 0.0) || !(dopant_density_per_m3 > 0.0)
        || !(spin_flip_rate_hz >= 0.0) || !(temperature_k > 0.0) || !(field_t >= 0.0)
        || !(g_ground > 0.0) || !(g_excited > 0.0))
        throw ValidationError("flip-flop parameters must be positive");
}

OrdinaryFrequency flipflop_gamma_sd(FlipFlopParams const& p)
{
    p.validate();
    double const angular = c::pi * c::vacuum_permeability * std::abs(p.g_ground - p.g_excited) * p.g_ground
                           * c::bohr_magneton * c::bohr_magneton * p.dopant_density_per_m3
                           / (9.0 * std::sqrt(3.0) * c::hbar)
                           * sech_squared_thermal(p.g_ground, p.field_t, p.temperature_k);
    return ordinary_from_angular(AngularRate{angular});
}

FlipFlopDephasing flipflop_tm(OrdinaryFrequency intrinsic, OrdinaryFrequency gamma_sd, double rate)
{
    double const g0 = intrinsic.hz();
    if (!(g0 > 0.0) || gamma_sd.hz() < 0.0 || rate < 0.0)
        throw DomainError("flipflop_tm: Gamma_0 must be > 0 and Gamma_SD, R >= 0");
    double const x = gamma_sd.hz() * rate / (c::pi * g0 * g0);
    // -1 + sqrt(1 + x) = x / (1 + sqrt(1 + x)), so T_M = 2 / (pi G0 (1 + sqrt(1 + x)))
    double const tm = 2.0 / (c::pi * g0 * (1.0 + std::sqrt(1.0 + x)));
    double const width = 1.0 / (c::pi * tm);
    // width - G0 = G0 (sqrt(1 + x) - 1) / 2
    double const added = g0 * x / (2.0 * (1.0 + std::sqrt(1.0 + x)));
    return {tm, OrdinaryFrequency{width}, OrdinaryFrequency{added}};
}

OrdinaryFrequency superhyperfine_dephasing_bound(double t1, double t2)
{
    return OrdinaryFrequency{1.0 / (c::pi * t2) - 1.0 / (2.0 * c::pi * t1)};
}

} // namespace rexsim::spinbath

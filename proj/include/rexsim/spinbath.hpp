#pragma once

#include <functional>
#include <span>
#include <string>

#include "rexsim/time_trace.hpp"
#include "rexsim/units.hpp"

namespace rexsim::spinbath {

/*!
 * One representative ligand nuclear-spin site.
 *
 * `theta_rad` is the angle between the ion's electronic moment and the
 * ion-ligand vector. Equivalent sites are folded into `multiplicity`; the
 * splitting model uses the representative geometry only.
 */
struct SpinBathSite
{
    std::string label;
    double spin = 0.5;                      // I
    double gyromagnetic_hz_per_t = 0.0;     // gamma_n / 2pi
    double distance_m = 0.0;
    double theta_rad = 0.0;
    int multiplicity = 1;

    void validate() const;
    int sublevel_count() const;
};

/// Effective spin-1/2 moment of a Kramers doublet, magnitude g muB / 2.
struct ElectronicMoment
{
    std::string label;
    double g_factor = 0.0;

    double magnitude_j_per_t() const;
};

SpinBathSite yttrium_site();
SpinBathSite vanadium_site();

/*!
 * Component of the point-dipole field of `moment` at the ligand, projected
 * on the moment axis: (mu0/4pi)(mu/r^3)(3 cos^2 theta - 1).
 */
double dipolar_field(ElectronicMoment const& moment, SpinBathSite const& site);

/*!
 * Nuclear doublet splitting gamma_n |B_eff|. The electronic moment is taken
 * anti-parallel to the applied field, and B_eff is the vector sum of the
 * applied field and the full point-dipole field at the ligand.
 */
OrdinaryFrequency superhyperfine_splitting(SpinBathSite const& site,
                                           ElectronicMoment const& moment,
                                           double field_t);

struct SublevelStructure
{
    int count = 0;
    OrdinaryFrequency min_splitting; // adjacent levels
    OrdinaryFrequency max_splitting; // outermost levels
};

SublevelStructure sublevel_count_and_range(SpinBathSite const& site,
                                           ElectronicMoment const& moment,
                                           double field_t);

/*!
 * Two-pulse envelope modulation
 *   V = 1 - (k/4)[2 - 2cos(2 pi Dg t) - 2cos(2 pi De t)
 *                 + cos(2 pi (Dg - De) t) + cos(2 pi (Dg + De) t)].
 * Throws ValidationError unless 0 <= k <= 1.
 */
double mims_modulation(OrdinaryFrequency ground, OrdinaryFrequency excited, double depth, double tau_s);

/// mims_modulation bound into a callable of tau.
std::function<double(double)> mims_envelope(OrdinaryFrequency ground, OrdinaryFrequency excited,
                                            double depth);

TimeTrace eseem_envelope(OrdinaryFrequency ground, OrdinaryFrequency excited, double depth,
                         std::span<double const> taus_s);

struct FlipFlopParams
{
    OrdinaryFrequency intrinsic_linewidth{1e3}; // Gamma_0, free parameter
    double dopant_density_per_m3 = 0.0;
    double spin_flip_rate_hz = 0.0;            // R = 1 / T1_spin
    double temperature_k = 0.0;
    double field_t = 0.0;
    double g_ground = 0.0;
    double g_excited = 0.0;

    void validate() const;
};

/*!
 * Dipolar spectral-diffusion width
 *   (pi mu0 |gg - ge| gg muB^2 n / (9 sqrt(3) hbar)) sech^2(gg muB B / 2kT).
 * The SI expression is an angular rate; it is returned as an ordinary width.
 */
OrdinaryFrequency flipflop_gamma_sd(FlipFlopParams const& params);

struct FlipFlopDephasing
{
    double tm_s = 0.0;
    OrdinaryFrequency linewidth;        // 1 / (pi T_M)
    OrdinaryFrequency added_dephasing;  // 1 / (pi T_M) - Gamma_0
};

/*!
 * Lorentzian spectral-diffusion decay time
 *   T_M = (2 G0 / (G_SD R)) (-1 + sqrt(1 + G_SD R / (pi G0^2))),
 * evaluated in a form that stays accurate as G_SD R -> 0.
 */
FlipFlopDephasing flipflop_tm(OrdinaryFrequency intrinsic_linewidth,
                              OrdinaryFrequency gamma_sd,
                              double spin_flip_rate_hz);

/// 1/(pi T2) - 1/(2 pi T1)
OrdinaryFrequency superhyperfine_dephasing_bound(double t1_s, double t2_s);

} // namespace rexsim::spinbath

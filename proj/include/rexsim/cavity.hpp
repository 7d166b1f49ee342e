#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rexsim/units.hpp"

namespace rexsim::cavity {

/*!
 * Resonator record. When both the quality factor and an explicit energy decay
 * rate are present, the explicit rate is used and resolve_kappa() reports the
 * discrepancy as a warning; they must agree within 5 %.
 */
struct CavityDevice
{
    double quality_factor = 0.0;
    double mode_volume_m3 = 0.0;
    AngularRate resonance;
    double coupling_fraction = 1.0; // kappa_in / kappa
    std::optional<AngularRate> kappa;

    void validate() const;
};

struct KappaResolution
{
    AngularRate kappa;
    std::optional<std::string> warning;
};

KappaResolution resolve_kappa(CavityDevice const& device);

struct DetectionStage
{
    std::string name;
    double efficiency = 1.0;
};

struct DetectionChain
{
    std::vector<DetectionStage> stages;
    double dark_count_rate_hz = 0.0;

    void validate() const;
};

struct BudgetRow
{
    std::string stage;
    double efficiency = 1.0;
    double cumulative = 1.0;
};

struct DetectionBudget
{
    double overall = 1.0;
    std::vector<BudgetRow> rows;
};

struct CoherenceSummary
{
    double t1_s = 0.0;
    double t2_s = 0.0;
    double t2_star_s = 0.0;
    OrdinaryFrequency pure_dephasing;

    /// gamma_h = 1/(pi T2)
    OrdinaryFrequency homogeneous_linewidth() const;
    void validate() const;
};

AngularRate kappa_from_q(AngularRate resonance, double quality_factor);

/// F = (3 / (4 pi^2 chi^2)) (lambda/n)^3 Q / V
double max_purcell(double wavelength_m, double refractive_index, double local_field,
                   double quality_factor, double mode_volume_m3);

/// g0 = (mu / n) sqrt(omega0 / (2 hbar eps0 V))
AngularRate max_coupling_g0(double dipole_moment_cm, double refractive_index,
                            AngularRate resonance, double mode_volume_m3);

/// nbar = 4 P kappa_in / (hbar omega0 kappa^2)
double mean_photon_number(double input_power_w, AngularRate kappa_in, AngularRate kappa,
                          AngularRate resonance);

/// T_cav = (4 g0^2 / kappa + (1 - beta) / T1)^-1
double cavity_lifetime(AngularRate g0, AngularRate kappa, double branching_ratio, double bulk_lifetime_s);

/// Inverts cavity_lifetime using 4 g0^2 / kappa = F / T_rad.
double measured_purcell(double cavity_lifetime_s, double bulk_lifetime_s, double branching_ratio,
                        double radiative_lifetime_s);

struct RabiPoint
{
    double mean_photon_number = 0.0;
    AngularRate rabi;
};

/*!
 * Least-squares slope of Omega against sqrt(nbar) through the origin; the
 * coupling is half the slope. Needs at least two points.
 */
Measured<AngularRate> g0_from_rabi(std::span<RabiPoint const> points);

/// C = 4 g0^2 / (kappa gamma_h) with gamma_h = 2/T2 in angular units.
double cooperativity(AngularRate g0, AngularRate kappa, double t2_s);

/// T2 / (2 T1), clamped to [0, 1]; T2 above 2.1 T1 is an InconsistencyError.
double indistinguishability(double t2_s, double t1_s);

DetectionBudget detection_budget(DetectionChain const& chain);

/// Measured stage efficiencies of the reference setup.
DetectionChain reference_detection_chain();

struct ScalingBase
{
    AngularRate g0;
    AngularRate kappa;
    double branching_ratio = 1.0;
    double bulk_lifetime_s = 0.0;
    double t2_s = 0.0; // homogeneous T2 used for the cooperativity
    OrdinaryFrequency pure_dephasing;
};

struct ScalingProjection
{
    double factor = 1.0;
    AngularRate kappa;
    double cavity_lifetime_s = 0.0;
    double cooperativity = 0.0;
    double indistinguishability = 0.0;
};

/*!
 * Recomputes lifetime, cooperativity and indistinguishability for a cavity
 * whose Q is multiplied by `factor`. The pure dephasing rate is held fixed;
 * I' = Gamma_rad / (Gamma_rad + gamma*) with Gamma_rad = 1/(2 pi T_cav').
 */
ScalingProjection project_q_scaling(ScalingBase const& base, double factor);

} // namespace rexsim::cavity

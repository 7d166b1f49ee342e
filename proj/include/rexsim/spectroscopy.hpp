#pragma once

#include <string_view>

#include "rexsim/units.hpp"

namespace rexsim::spectroscopy {

/// Local-field correction relating the macroscopic to the microscopic field.
enum class LocalFieldModel
{
    real_cavity,
    virtual_cavity,
    none,
};

std::string_view to_string(LocalFieldModel model);
/// Accepts "real", "virtual", "none". Throws ValidationError otherwise.
LocalFieldModel local_field_model_from_string(std::string_view name);

/*!
 * Host + dopant spectroscopic inputs.
 *
 * The absorption area is stored in SI (Hz/m); use
 * absorption_area_from_ghz_per_cm() when reading the customary unit.
 */
struct MaterialSpec
{
    double absorption_area_hz_per_m = 0.0;
    double ion_density_per_m3 = 0.0;
    double refractive_index = 1.0;
    double wavelength_m = 0.0;
    double lifetime_s = 0.0; // measured fluorescence T1
    double ground_g_factor = 0.0;
    double excited_g_factor = 0.9; // not measured; consistency value

    /// Throws ValidationError on a non-positive field or n <= 1.
    void validate() const;
};

constexpr double absorption_area_from_ghz_per_cm(double ghz_per_cm)
{
    return ghz_per_cm * 1e9 / 1e-2;
}

struct DerivedTransition
{
    double oscillator_strength = 0.0;
    double dipole_moment_cm = 0.0;
    double radiative_lifetime_s = 0.0;
    double branching_ratio = 0.0;
    AngularRate transition_frequency;
    LocalFieldModel model = LocalFieldModel::real_cavity;
};

/// (n^2+2)/3 for the virtual cavity, 3n^2/(2n^2+1) for the real cavity, 1 for none.
double local_field_correction(double refractive_index, LocalFieldModel model);

/// f = 4 pi eps0 (m_e c / (pi e^2)) (1/N) (n / chi^2) * integral(alpha dnu)
double oscillator_strength(MaterialSpec const& material, double local_field);

/// 1/T_rad = (2 pi e^2 / (eps0 m_e c)) chi^2 (1/n) (n^2/lambda^2) (f/3)
double radiative_lifetime(double oscillator_strength,
                          double refractive_index,
                          double wavelength_m,
                          LocalFieldModel model);

/*!
 * beta = T1 / T_rad. A measured T1 up to 5 % above T_rad is accepted and
 * clamped to beta = 1; beyond that an InconsistencyError is raised.
 */
double branching_ratio(double lifetime_s, double radiative_lifetime_s);

/// mu = sqrt(hbar e^2 f / (2 m_e omega)), in C m.
double dipole_moment(double oscillator_strength, AngularRate transition_frequency);

/// Inverse of dipole_moment.
double oscillator_strength_from_dipole(double dipole_moment_cm, AngularRate transition_frequency);

/// g muB B / h.
OrdinaryFrequency zeeman_splitting(double g_factor, double field_t);

/// 2 pi c / lambda.
AngularRate transition_frequency_from_wavelength(double wavelength_m);

/// Runs the whole chain: absorption area -> f -> T_rad -> beta, and f -> mu.
DerivedTransition derive_transition(MaterialSpec const& material,
                                    LocalFieldModel model = LocalFieldModel::real_cavity);

} // namespace rexsim::spectroscopy

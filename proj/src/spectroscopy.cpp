#include "rexsim/spectroscopy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rexsim/errors.hpp"

namespace rexsim::spectroscopy {

namespace c = constants;

std::string_view to_string(LocalFieldModel model)
{
    switch (model)
    {
    case LocalFieldModel::real_cavity:
        return "real";
    case LocalFieldModel::virtual_cavity:
        return "virtual";
    case LocalFieldModel::none:
        return "none";
    }
    return "?";
}

LocalFieldModel local_field_model_from_string(std::string_view name)
{
    if (name == "real")
        return LocalFieldModel::real_cavity;
    if (name == "virtual")
        return LocalFieldModel::virtual_cavity;
    if (name == "none")
        return LocalFieldModel::none;
    throw ValidationError("unknown local field model '" + std::string(name)
                          + "' (expected real, virtual or none)");
}

void MaterialSpec::validate() const
{
    auto require_positive = [](double v, char const* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw ValidationError(std::string("material: ") + what + " must be > 0");
    };
    require_positive(absorption_area_hz_per_m, "absorption area");
    require_positive(ion_density_per_m3, "ion density");
    require_positive(wavelength_m, "wavelength");
    require_positive(lifetime_s, "lifetime");
    require_positive(ground_g_factor, "ground g-factor");
    require_positive(excited_g_factor, "excited g-factor");
    if (!(refractive_index > 1.0))
        throw ValidationError("material: refractive index must be > 1");
}

double local_field_correction(double n, LocalFieldModel model)
{
    if (!(n >= 1.0))
        throw DomainError("local_field_correction: refractive index must be >= 1");
    double const n2 = n * n;
    switch (model)
    {
    case LocalFieldModel::virtual_cavity:
        return (n2 + 2.0) / 3.0;
    case LocalFieldModel::real_cavity:
        return 3.0 * n2 / (2.0 * n2 + 1.0);
    case LocalFieldModel::none:
        return 1.0;
    }
    return 1.0;
}

double oscillator_strength(MaterialSpec const& m, double chi)
{
    double const prefactor = 4.0 * c::pi * c::vacuum_permittivity * c::electron_mass
                             * c::speed_of_light / (c::pi * c::elementary_charge * c::elementary_charge);
    return prefactor / m.ion_density_per_m3 * m.refractive_index / (chi * chi)
           * m.absorption_area_hz_per_m;
}

double radiative_lifetime(double f, double n, double wavelength_m, LocalFieldModel model)
{
    if (!(f > 0.0))
        throw DomainError("radiative_lifetime: oscillator strength must be > 0");
    double const chi = local_field_correction(n, model);
    double const rate = 2.0 * c::pi * c::elementary_charge * c::elementary_charge
                        / (c::vacuum_permittivity * c::electron_mass * c::speed_of_light)
                        * chi * chi / n * (n * n) / (wavelength_m * wavelength_m) * f / 3.0;
    return 1.0 / rate;
}

double branching_ratio(double t1, double t_rad)
{
    if (!(t1 > 0.0) || !(t_rad > 0.0))
        throw DomainError("branching_ratio: lifetimes must be > 0");
    if (t1 > 1.05 * t_rad)
        throw InconsistencyError("branching_ratio: measured T1 exceeds the radiative lifetime by more than 5 %");
    return std::min(1.0, t1 / t_rad);
}

double dipole_moment(double f, AngularRate omega)
{
    if (!(f > 0.0) || !(omega.rad_per_s() > 0.0))
        throw DomainError("dipole_moment: oscillator strength and frequency must be > 0");
    return std::sqrt(c::hbar * c::elementary_charge * c::elementary_charge * f
                     / (2.0 * c::electron_mass * omega.rad_per_s()));
}

double oscillator_strength_from_dipole(double mu, AngularRate omega)
{
    return 2.0 * c::electron_mass * omega.rad_per_s() * mu * mu
           / (c::hbar * c::elementary_charge * c::elementary_charge);
}

OrdinaryFrequency zeeman_splitting(double g, double field_t)
{
    return OrdinaryFrequency{g * c::bohr_magneton * field_t / c::planck};
}

AngularRate transition_frequency_from_wavelength(double wavelength_m)
{
    return AngularRate{c::two_pi * c::speed_of_light / wavelength_m};
}

DerivedTransition derive_transition(MaterialSpec const& material, LocalFieldModel model)
{
    material.validate();
    DerivedTransition out;
    out.model = model;
    double const chi = local_field_correction(material.refractive_index, model);
    out.oscillator_strength = oscillator_strength(material, chi);
    out.radiative_lifetime_s = radiative_lifetime(out.oscillator_strength,
                                                  material.refractive_index,
                                                  material.wavelength_m, model);
    out.branching_ratio = branching_ratio(material.lifetime_s, out.radiative_lifetime_s);
    out.transition_frequency = transition_frequency_from_wavelength(material.wavelength_m);
    out.dipole_moment_cm = dipole_moment(out.oscillator_strength, out.transition_frequency);
    return out;
}

} // namespace rexsim::spectroscopy

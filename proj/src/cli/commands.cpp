#include "rexsim/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "rexsim/cavity.hpp"
#include "rexsim/csv.hpp"
#include "rexsim/dynamics/bloch.hpp"
#include "rexsim/dynamics/experiments.hpp"
#include "rexsim/dynamics/fitting.hpp"
#include "rexsim/errors.hpp"
#include "rexsim/numeric_format.hpp"
#include "rexsim/photonstats.hpp"
#include "rexsim/spectroscopy.hpp"
#include "rexsim/spectrum.hpp"
#include "rexsim/spinbath.hpp"
#include "rexsim/units.hpp"

namespace rexsim::cli {

namespace {

namespace c = rexsim::constants;
using config::ConfigDocument;

class IoError : public Error
{
  public:
    using Error::Error;
};

class GoldenMismatch : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Config -> module inputs

double num(ConfigDocument const& cfg, char const* section, char const* key)
{
    return cfg.number(section, key);
}

spectroscopy::MaterialSpec material_of(ConfigDocument const& cfg)
{
    spectroscopy::MaterialSpec m;
    m.absorption_area_hz_per_m = spectroscopy::absorption_area_from_ghz_per_cm(
        num(cfg, "material", "absorption_area_ghz_per_cm"));
    m.ion_density_per_m3 = num(cfg, "material", "ion_density_per_m3");
    m.refractive_index = num(cfg, "material", "refractive_index");
    m.wavelength_m = num(cfg, "material", "wavelength_nm") / 1e9;
    m.lifetime_s = num(cfg, "material", "bulk_lifetime_us") / 1e6;
    m.ground_g_factor = num(cfg, "material", "ground_g_factor");
    m.excited_g_factor = num(cfg, "material", "excited_g_factor");
    return m;
}

spectroscopy::LocalFieldModel model_of(ConfigDocument const& cfg)
{
    return spectroscopy::local_field_model_from_string(cfg.text("material", "local_field_model"));
}

cavity::CavityDevice device_of(ConfigDocument const& cfg)
{
    cavity::CavityDevice d;
    d.quality_factor = num(cfg, "cavity", "q_factor");
    d.mode_volume_m3 = num(cfg, "cavity", "mode_volume_um3") * 1e-18;
    d.resonance = two_pi_times(num(cfg, "cavity", "resonance_frequency_ghz") * 1e9);
    d.coupling_fraction = num(cfg, "cavity", "coupling_fraction");
    double const kappa_ghz = num(cfg, "cavity", "kappa_ghz");
    if (kappa_ghz > 0.0)
        d.kappa = two_pi_times(kappa_ghz * 1e9);
    return d;
}

double field_t(ConfigDocument const& cfg)
{
    return num(cfg, "field", "b_field_mt") * 1e-3;
}

spinbath::SpinBathSite site_of(ConfigDocument const& cfg, std::string const& prefix, std::string label)
{
    auto key = [&](char const* k) { return prefix + k; };
    spinbath::SpinBathSite s;
    s.label = std::move(label);
    s.spin = cfg.number("spinbath", key("spin"));
    s.gyromagnetic_hz_per_t = cfg.number("spinbath", key("gyromagnetic_mhz_per_t")) * 1e6;
    s.distance_m = cfg.number("spinbath", key("distance_angstrom")) * 1e-10;
    s.theta_rad = cfg.number("spinbath", key("theta_deg")) * c::pi / 180.0;
    s.multiplicity = static_cast<int>(cfg.number("spinbath", key("multiplicity")));
    s.validate();
    return s;
}

spinbath::ElectronicMoment ground_moment(ConfigDocument const& cfg)
{
    return {"ground", num(cfg, "material", "ground_g_factor")};
}

spinbath::ElectronicMoment excited_moment(ConfigDocument const& cfg)
{
    return {"excited", num(cfg, "material", "excited_g_factor")};
}

photonstats::EmitterLevelScheme scheme_of(ConfigDocument const& cfg)
{
    photonstats::EmitterLevelScheme s;
    s.excitation_probability = num(cfg, "simulation", "excitation_probability");
    s.detection_probability = num(cfg, "simulation", "detection_probability");
    s.shelving_probability = num(cfg, "simulation", "shelving_probability");
    s.shelf_recovery_rate_hz = num(cfg, "simulation", "shelf_recovery_rate_hz");
    s.cavity_lifetime_s = num(cfg, "cavity", "measured_lifetime_us") / 1e6;
    return s;
}

photonstats::BackgroundModel background_of(ConfigDocument const& cfg)
{
    photonstats::BackgroundModel b;
    b.counts_per_pulse = num(cfg, "simulation", "background_per_pulse");
    b.dark_count_rate_hz = num(cfg, "detection", "dark_count_rate_hz");
    b.gate_window_s = num(cfg, "simulation", "gate_window_us") / 1e6;
    return b;
}

double period_of(ConfigDocument const& cfg)
{
    return 1.0 / (num(cfg, "simulation", "repetition_rate_khz") * 1e3);
}

photonstats::G2Options g2_options_of(ConfigDocument const& cfg)
{
    photonstats::G2Options o;
    o.max_lag = static_cast<std::size_t>(num(cfg, "simulation", "g2_max_lag"));
    o.far_lag_min = static_cast<std::size_t>(num(cfg, "simulation", "g2_far_lag_min"));
    o.far_lag_max = static_cast<std::size_t>(num(cfg, "simulation", "g2_far_lag_max"));
    return o;
}

photonstats::SfsModel sfs_model_of(ConfigDocument const& cfg)
{
    photonstats::SfsModel m;
    m.amplitude = num(cfg, "simulation", "sfs_amplitude");
    m.exponent = num(cfg, "simulation", "sfs_exponent");
    m.detuning_unit_hz = 1e9;
    m.reference_bandwidth_hz = num(cfg, "simulation", "sfs_reference_bandwidth_mhz") * 1e6;
    return m;
}

photonstats::ModeModel mode_of(ConfigDocument const& cfg)
{
    photonstats::ModeModel m;
    double const lambda = num(cfg, "material", "wavelength_nm") / 1e9;
    double const n = num(cfg, "material", "refractive_index");
    m.wavelength_eff_m = lambda / n;
    m.longitudinal_span_m = m.wavelength_eff_m / 2.0;
    m.waist_m = num(cfg, "simulation", "mode_waist_nm") / 1e9;
    m.transverse_radius_m = num(cfg, "simulation", "mode_transverse_radius_nm") / 1e9;
    return m;
}

cavity::DetectionChain chain_of(ConfigDocument const& cfg)
{
    cavity::DetectionChain chain;
    for (auto const& [name, eff] : cfg.detection_stages())
        chain.stages.push_back({name, eff});
    chain.dark_count_rate_hz = num(cfg, "detection", "dark_count_rate_hz");
    return chain;
}

dynamics::TwoLevelParams nutation_relaxation(ConfigDocument const& cfg)
{
    dynamics::TwoLevelParams p;
    p.t1_s = num(cfg, "cavity", "measured_lifetime_us") / 1e6;
    p.t2_s = std::min(num(cfg, "cavity", "t2_star_us") * 1e-6, 2.0 * p.t1_s);
    return p;
}

dynamics::EnvelopeShape envelope_of(std::string const& name)
{
    if (name == "gaussian")
        return dynamics::EnvelopeShape::gaussian;
    if (name == "exponential")
        return dynamics::EnvelopeShape::exponential;
    throw ValidationError("envelope must be 'exponential' or 'gaussian', got '" + name + "'");
}

// ---------------------------------------------------------------------------
// Shared computations

struct CavityChain
{
    spectroscopy::DerivedTransition transition;
    double chi = 0.0;
    cavity::KappaResolution kappa;
    AngularRate kappa_in;
    double purcell = 0.0;
    AngularRate g0_theory;
    double purcell_cross = 0.0;
    double nbar = 0.0;
    double t_cav_theory = 0.0;
    double purcell_measured = 0.0;
    AngularRate g0_measured;
    double cooperativity = 0.0;
    cavity::ScalingProjection projection;
    double indistinguishability = 0.0;
    double t1_cavity = 0.0;
    double t2_star = 0.0;
};

CavityChain cavity_chain(ConfigDocument const& cfg)
{
    auto const material = material_of(cfg);
    auto const model = model_of(cfg);
    auto const device = device_of(cfg);
    device.validate();

    CavityChain out;
    out.transition = spectroscopy::derive_transition(material, model);
    out.chi = spectroscopy::local_field_correction(material.refractive_index, model);
    out.kappa = cavity::resolve_kappa(device);
    out.kappa_in = two_pi_times(num(cfg, "cavity", "kappa_in_ghz") * 1e9);
    out.purcell = cavity::max_purcell(material.wavelength_m, material.refractive_index, out.chi,
                                      device.quality_factor, device.mode_volume_m3);
    out.g0_theory = cavity::max_coupling_g0(out.transition.dipole_moment_cm, material.refractive_index,
                                            device.resonance, device.mode_volume_m3);
    double const g0 = out.g0_theory.rad_per_s();
    out.purcell_cross = 4.0 * g0 * g0 * out.transition.radiative_lifetime_s / out.kappa.kappa.rad_per_s();
    out.nbar = cavity::mean_photon_number(num(cfg, "cavity", "input_power_nw") / 1e9, out.kappa_in,
                                          out.kappa.kappa, device.resonance);
    out.t_cav_theory = cavity::cavity_lifetime(out.g0_theory, out.kappa.kappa, out.transition.branching_ratio,
                                               material.lifetime_s);
    out.t1_cavity = num(cfg, "cavity", "measured_lifetime_us") / 1e6;
    out.purcell_measured = cavity::measured_purcell(out.t1_cavity, material.lifetime_s,
                                                    out.transition.branching_ratio,
                                                    out.transition.radiative_lifetime_s);
    out.g0_measured = two_pi_times(num(cfg, "cavity", "measured_g0_mhz") * 1e6);
    double const t2 = num(cfg, "cavity", "t2_us") / 1e6;
    out.cooperativity = cavity::cooperativity(out.g0_measured, out.kappa.kappa, t2);

    cavity::ScalingBase base;
    base.g0 = out.g0_measured;
    base.kappa = out.kappa.kappa;
    base.branching_ratio = out.transition.branching_ratio;
    base.bulk_lifetime_s = material.lifetime_s;
    base.t2_s = t2;
    base.pure_dephasing = OrdinaryFrequency{num(cfg, "cavity", "pure_dephasing_khz") * 1e3};
    out.projection = cavity::project_q_scaling(base, num(cfg, "cavity", "q_scale_factor"));

    out.t2_star = num(cfg, "cavity", "t2_star_us") / 1e6;
    out.indistinguishability = cavity::indistinguishability(out.t2_star, out.t1_cavity);
    return out;
}

struct SuperhyperfineSummary
{
    OrdinaryFrequency ground_zero_field;
    OrdinaryFrequency ground;
    OrdinaryFrequency excited;
    spinbath::SublevelStructure vanadium;
};

SuperhyperfineSummary superhyperfine_summary(ConfigDocument const& cfg)
{
    auto const y = site_of(cfg, "y_", "Y");
    auto const v = site_of(cfg, "v_", "V");
    auto const gm = ground_moment(cfg);
    auto const em = excited_moment(cfg);
    double const b = field_t(cfg);
    return {spinbath::superhyperfine_splitting(y, gm, 0.0), spinbath::superhyperfine_splitting(y, gm, b),
            spinbath::superhyperfine_splitting(y, em, b), spinbath::sublevel_count_and_range(v, gm, b)};
}

spinbath::FlipFlopParams flipflop_params_of(ConfigDocument const& cfg)
{
    spinbath::FlipFlopParams p;
    p.intrinsic_linewidth = OrdinaryFrequency{num(cfg, "spinbath", "intrinsic_linewidth_khz") * 1e3};
    p.dopant_density_per_m3 = num(cfg, "spinbath", "nd_density_per_m3");
    p.spin_flip_rate_hz = 1.0 / (num(cfg, "spinbath", "spin_t1_ms") * 1e-3);
    p.temperature_k = num(cfg, "field", "temperature_k");
    p.field_t = field_t(cfg);
    p.g_ground = num(cfg, "material", "ground_g_factor");
    p.g_excited = num(cfg, "material", "excited_g_factor");
    return p;
}

std::vector<double> uniform_grid(double first, double last, std::size_t points)
{
    if (points < 2)
        throw ValidationError("a grid needs at least two points");
    return linspace(first, last, points);
}

/// Lines of the envelope spectrum matched against the four expected beat frequencies.
struct EchoLines
{
    std::vector<double> found_hz;
    std::vector<double> expected_hz;
    double resolution_hz = 0.0;
    bool exact_match = false;
};

EchoLines echo_lines(OrdinaryFrequency ground, OrdinaryFrequency excited, double depth, double window_s,
                     std::size_t points)
{
    auto const taus = uniform_grid(0.0, window_s, points);
    auto const v = spinbath::eseem_envelope(ground, excited, depth, taus);
    auto const spec = amplitude_spectrum(v.y.values, taus[1] - taus[0], Window::hann);
    EchoLines out;
    out.resolution_hz = spec.resolution_hz;
    out.found_hz = spectral_peaks(spec, 0.1);
    double const g = ground.hz(), e = excited.hz();
    out.expected_hz = {std::abs(e - g), std::min(g, e), std::max(g, e), g + e};
    std::sort(out.expected_hz.begin(), out.expected_hz.end());
    out.exact_match = out.found_hz.size() == out.expected_hz.size();
    for (std::size_t i = 0; out.exact_match && i < out.found_hz.size(); ++i)
        out.exact_match = std::abs(out.found_hz[i] - out.expected_hz[i]) <= 1.5 * spec.resolution_hz;
    return out;
}

// ---------------------------------------------------------------------------
// Invocation plumbing

struct Invocation
{
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
};

struct Context
{
    ConfigDocument cfg;
    Invocation inv;
    std::ostream& out;
    std::ostream& err;
    std::vector<std::pair<std::string, std::string>> params;

    std::uint64_t seed() const
    {
        return inv.seed ? *inv.seed : static_cast<std::uint64_t>(cfg.number("simulation", "seed"));
    }

    void param(std::string key, double value) { params.emplace_back(std::move(key), format_double(value)); }
    void param(std::string key, std::string value) { params.emplace_back(std::move(key), std::move(value)); }

    CsvHeader header(std::string const& subcommand, bool seeded) const
    {
        CsvHeader h;
        h.subcommand = subcommand;
        h.parameters = params;
        if (!inv.config_path.empty())
            h.parameters.insert(h.parameters.begin(), {"config", inv.config_path});
        if (seeded)
            h.seed = seed();
        return h;
    }

    bool wants_csv() const { return !inv.out_path.empty(); }

    void write(std::function<void(std::ostream&)> const& body) const
    {
        if (!wants_csv())
            return;
        std::ofstream os(inv.out_path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot open '" + inv.out_path + "' for writing");
        body(os);
        os.flush();
        if (!os)
            throw IoError("write to '" + inv.out_path + "' failed");
    }
};

std::string fmt_list(std::vector<double> const& v, double scale)
{
    std::string s;
    for (double x : v)
        s += (s.empty() ? "" : " ") + format_double(std::round(x / scale * 1e3) / 1e3);
    return s;
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_spectro(Context& ctx)
{
    auto const material = material_of(ctx.cfg);
    auto const model = model_of(ctx.cfg);
    auto const tr = spectroscopy::derive_transition(material, model);
    double const b = field_t(ctx.cfg);
    double const temp = num(ctx.cfg, "field", "temperature_k");
    auto const zeeman = spectroscopy::zeeman_splitting(material.ground_g_factor, b);
    double const ratio = boltzmann_population_ratio(zeeman, temp);

    RunReport r;
    r.title = "spectro: absorption -> oscillator strength -> lifetime (" + std::string(spectroscopy::to_string(model)) + ")";
    r.add("local-field correction chi_L", spectroscopy::local_field_correction(material.refractive_index, model), "");
    r.add("oscillator strength f", tr.oscillator_strength, "", 3.7e-5, Tolerance::rel(0.02));
    r.add("radiative lifetime T_rad", tr.radiative_lifetime_s * 1e6, "us", 237, Tolerance::rel(0.02));
    r.add("branching ratio beta", tr.branching_ratio, "", 0.38, Tolerance::rel(0.02));
    r.add("dipole moment mu", tr.dipole_moment_cm, "C m", 1.59e-31, Tolerance::rel(0.02));
    r.add("ground Zeeman splitting", zeeman.hz() * 1e-9, "GHz", 12.88, Tolerance::rel(0.005));
    r.add("upper/lower Zeeman population ratio", ratio, "");
    r.add("temperature from population ratio", temperature_from_population_ratio(ratio, zeeman), "K");
    r.add("sech^2 thermal factor", sech_squared_thermal(material.ground_g_factor, b, temp), "");
    r.print(ctx.out);

    ctx.param("b_field_t", b);
    ctx.param("temperature_k", temp);
    ctx.write([&](std::ostream& os) {
        std::vector<std::vector<std::string>> rows;
        for (auto m : {spectroscopy::LocalFieldModel::real_cavity, spectroscopy::LocalFieldModel::virtual_cavity,
                       spectroscopy::LocalFieldModel::none})
        {
            // beta may exceed the tolerance band for other local-field models
            std::string beta = "nan";
            auto const chi = spectroscopy::local_field_correction(material.refractive_index, m);
            double const f = spectroscopy::oscillator_strength(material, chi);
            double const t_rad = spectroscopy::radiative_lifetime(f, material.refractive_index, material.wavelength_m, m);
            try
            {
                beta = format_double(spectroscopy::branching_ratio(material.lifetime_s, t_rad));
            }
            catch (InconsistencyError const&)
            {
            }
            double const mu = spectroscopy::dipole_moment(f, spectroscopy::transition_frequency_from_wavelength(material.wavelength_m));
            rows.push_back({std::string(spectroscopy::to_string(m)), format_double(chi), format_double(f),
                            format_double(t_rad), beta, format_double(mu)});
        }
        write_table_csv(os, {"local_field_model", "chi_L", "oscillator_strength", "radiative_lifetime[s]",
                             "branching_ratio", "dipole_moment[C m]"},
                        rows, ctx.header("spectro", false));
    });
}

void cmd_cavity(Context& ctx, std::size_t points)
{
    auto const ch = cavity_chain(ctx.cfg);
    if (ch.kappa.warning)
        ctx.err << "warning: " << *ch.kappa.warning << '\n';

    RunReport r;
    r.title = "cavity: Purcell, coupling, lifetime, cooperativity";
    r.add("kappa / 2pi", ordinary_from_angular(ch.kappa.kappa).hz() * 1e-9, "GHz");
    r.add("max Purcell factor F", ch.purcell, "", 189, Tolerance::rel(0.03));
    r.add("max coupling g0 / 2pi", ordinary_from_angular(ch.g0_theory).hz() * 1e-6, "MHz", 52.7, Tolerance::rel(0.02));
    r.add("4 g0^2 T_rad / kappa", ch.purcell_cross, "", ch.purcell, Tolerance::rel(0.03));
    r.add("mean photon number nbar", ch.nbar, "", 1.0, Tolerance::rel(0.02));
    r.add("Purcell lifetime T_cav (max g0)", ch.t_cav_theory * 1e6, "us", 1.25, Tolerance::rel(0.05));
    r.add("measured-route Purcell factor", ch.purcell_measured, "", 111, Tolerance::rel(0.02));
    r.add("cooperativity C", ch.cooperativity, "", 2.9, Tolerance::rel(0.03));
    r.add("indistinguishability T2*/(2 T1)", ch.indistinguishability, "", 0.952, Tolerance::abs(5e-4));
    r.add("Q x" + format_double(ch.projection.factor) + ": lifetime", ch.projection.cavity_lifetime_s * 1e6, "us");
    r.add("Q x" + format_double(ch.projection.factor) + ": cooperativity", ch.projection.cooperativity, "", 29,
          Tolerance::rel(0.10));
    r.add("Q x" + format_double(ch.projection.factor) + ": indistinguishability", ch.projection.indistinguishability, "");
    r.print(ctx.out);

    double const top = std::max(1.0, ch.projection.factor);
    ctx.param("q_scale_max", top);
    ctx.param("points", static_cast<double>(points));
    ctx.write([&](std::ostream& os) {
        auto const material = material_of(ctx.cfg);
        cavity::ScalingBase base;
        base.g0 = ch.g0_measured;
        base.kappa = ch.kappa.kappa;
        base.branching_ratio = ch.transition.branching_ratio;
        base.bulk_lifetime_s = material.lifetime_s;
        base.t2_s = num(ctx.cfg, "cavity", "t2_us") / 1e6;
        base.pure_dephasing = OrdinaryFrequency{num(ctx.cfg, "cavity", "pure_dephasing_khz") * 1e3};
        TimeTrace t;
        t.x = {"q_factor_multiplier", "1", {}};
        t.y = {"cooperativity", "1", {}};
        Column kappa{"kappa_over_2pi", "Hz", {}}, life{"cavity_lifetime", "s", {}}, ind{"indistinguishability", "1", {}};
        for (double lg : uniform_grid(0.0, std::log10(top), points))
        {
            auto const p = cavity::project_q_scaling(base, std::pow(10.0, lg));
            t.x.values.push_back(p.factor);
            t.y.values.push_back(p.cooperativity);
            kappa.values.push_back(ordinary_from_angular(p.kappa).hz());
            life.values.push_back(p.cavity_lifetime_s);
            ind.values.push_back(p.indistinguishability);
        }
        t.extra = {kappa, life, ind};
        t.add_meta("g0_over_2pi_hz", ordinary_from_angular(ch.g0_measured).hz());
        write_trace_csv(os, t, ctx.header("cavity", false));
    });
}

void cmd_budget(Context& ctx)
{
    auto const chain = chain_of(ctx.cfg);
    auto const budget = cavity::detection_budget(chain);
    RunReport r;
    r.title = "budget: collection efficiency of a cavity photon";
    for (auto const& row : budget.rows)
        r.add("stage " + row.stage, 100.0 * row.efficiency, "%");
    r.add("overall efficiency", 100.0 * budget.overall, "%", 3.6, Tolerance::abs(0.5));
    r.add("dark count rate", chain.dark_count_rate_hz, "Hz");
    r.print(ctx.out);

    ctx.write([&](std::ostream& os) {
        std::vector<std::vector<std::string>> rows;
        for (auto const& row : budget.rows)
            rows.push_back({row.stage, format_double(row.efficiency), format_double(row.cumulative)});
        write_table_csv(os, {"stage", "efficiency", "cumulative"}, rows, ctx.header("budget", false));
    });
}

struct RabiFlags
{
    std::optional<double> nbar_max;
    std::optional<std::size_t> points;
    std::optional<double> pulse_ns;
    std::optional<double> g0_mhz;
};

void cmd_rabi(Context& ctx, RabiFlags const& f)
{
    double const nbar_max = f.nbar_max.value_or(num(ctx.cfg, "simulation", "rabi_nbar_max"));
    auto const points = f.points.value_or(static_cast<std::size_t>(num(ctx.cfg, "simulation", "rabi_points")));
    double const pulse = f.pulse_ns.value_or(num(ctx.cfg, "simulation", "rabi_pulse_ns")) / 1e9;
    double const g0_hz = f.g0_mhz.value_or(num(ctx.cfg, "cavity", "measured_g0_mhz")) * 1e6;
    if (!(nbar_max > 0.0) || !(pulse > 0.0) || !(g0_hz > 0.0))
        throw ValidationError("rabi: nbar-max, pulse and g0 must be > 0");
    auto const relax = nutation_relaxation(ctx.cfg);
    auto const nbar = uniform_grid(0.0, nbar_max, points);

    auto scan = dynamics::rabi_nutation_scan(two_pi_times(g0_hz), nbar, pulse, relax, ctx.inv.workers);

    RunReport r;
    r.title = "rabi: optical nutation vs mean photon number";
    r.add("input g0 / 2pi", g0_hz * 1e-6, "MHz");
    r.add("pulse length", pulse * 1e9, "ns");
    r.add("largest pulse area / pi", 2.0 * c::two_pi * g0_hz * std::sqrt(nbar_max) * pulse / c::pi, "");
    // Extremum extraction needs the pulse area to advance by < pi/2 per grid step.
    double const step_area = 2.0 * c::two_pi * g0_hz * std::sqrt(nbar[1]) * pulse;
    if (step_area < c::pi / 2.0)
    {
        auto const pts = dynamics::extract_rabi_points(scan, pulse);
        if (pts.size() >= 2)
        {
            auto const g0 = cavity::g0_from_rabi(pts);
            r.add("extrema used", static_cast<double>(pts.size()), "");
            r.add("fitted g0 / 2pi", ordinary_from_angular(g0.value).hz() * 1e-6, "MHz", g0_hz * 1e-6,
                  Tolerance::rel(0.02));
            r.add("fitted g0 std error / 2pi", ordinary_from_angular(g0.std_error).hz() * 1e-6, "MHz");
        }
        else
        {
            r.notes.push_back("fewer than two extrema in the scan; g0 not fitted");
        }
    }
    else
    {
        r.notes.push_back("grid too coarse to resolve the nutation; g0 not fitted (raise --points or lower --nbar-max)");
    }
    r.print(ctx.out);

    ctx.param("nbar_max", nbar_max);
    ctx.param("points", static_cast<double>(points));
    ctx.param("pulse_s", pulse);
    ctx.param("g0_over_2pi_hz", g0_hz);
    ctx.write([&](std::ostream& os) { write_trace_csv(os, scan, ctx.header("rabi", false)); });
}

struct RamseyFlags
{
    std::optional<double> beat_khz;
    std::optional<double> t2_star_us;
    std::optional<double> detuning_khz;
    std::optional<double> window_us;
    std::optional<std::size_t> points;
    std::optional<std::string> envelope;
    bool t1_background = false;
};

void cmd_ramsey(Context& ctx, RamseyFlags const& f)
{
    dynamics::RamseyModel m;
    m.beat = OrdinaryFrequency{f.beat_khz.value_or(num(ctx.cfg, "simulation", "ramsey_beat_khz")) * 1e3};
    m.t2_star_s = f.t2_star_us.value_or(num(ctx.cfg, "cavity", "t2_star_us")) / 1e6;
    m.laser_detuning = OrdinaryFrequency{f.detuning_khz.value_or(num(ctx.cfg, "simulation", "ramsey_detuning_khz")) * 1e3};
    m.shape = envelope_of(f.envelope.value_or(ctx.cfg.text("simulation", "ramsey_envelope")));
    double const t1 = num(ctx.cfg, "cavity", "measured_lifetime_us") / 1e6;
    if (f.t1_background)
        m.t1_background_s = t1;
    double const window = f.window_us.value_or(num(ctx.cfg, "simulation", "ramsey_window_us")) / 1e6;
    auto const points = f.points.value_or(static_cast<std::size_t>(num(ctx.cfg, "simulation", "ramsey_points")));
    auto const delays = uniform_grid(0.0, window, points);

    auto const raw = dynamics::simulate_ramsey(m, delays);
    auto const fringes = f.t1_background ? dynamics::remove_t1_background(raw, t1) : raw;
    auto const beat = dynamics::ramsey_beat_spectrum(fringes, m.t2_star_s, m.shape);

    RunReport r;
    r.title = "ramsey: two pi/2 pulses, beat and T2*";
    r.add("FFT resolution", beat.spectrum.resolution_hz * 1e-3, "kHz");
    r.add("beat frequency", beat.beat_hz * 1e-3, "kHz", m.beat.hz() * 1e-3,
          Tolerance::abs(beat.spectrum.resolution_hz * 1e-3));
    if (m.shape == dynamics::EnvelopeShape::exponential && m.laser_detuning.hz() == 0.0)
    {
        auto const fit = dynamics::extract_t2star(fringes);
        r.add("fitted T2*", fit.t2_star_s.value * 1e6, "us", m.t2_star_s * 1e6, Tolerance::rel(0.02));
    }
    else
    {
        r.notes.push_back("T2* fit applies to exponential envelopes without laser detuning");
    }
    r.print(ctx.out);

    ctx.param("beat_hz", m.beat.hz());
    ctx.param("t2_star_s", m.t2_star_s);
    ctx.param("laser_detuning_hz", m.laser_detuning.hz());
    ctx.param("envelope", m.shape == dynamics::EnvelopeShape::gaussian ? "gaussian" : "exponential");
    ctx.param("t1_background", f.t1_background ? "yes" : "no");
    ctx.param("window_s", window);
    ctx.param("points", static_cast<double>(points));
    ctx.write([&](std::ostream& os) { write_trace_csv(os, raw, ctx.header("ramsey", false)); });
}

struct EchoFlags
{
    std::optional<double> t2_us;
    std::optional<double> depth;
    std::optional<double> window_us;
    std::optional<std::size_t> points;
    double fit_from_us = 0.0;
    double spectrum_window_us = 400.0;
    std::size_t spectrum_points = 8001;
};

void cmd_echo(Context& ctx, EchoFlags const& f)
{
    auto const shf = superhyperfine_summary(ctx.cfg);
    double const t2 = f.t2_us.value_or(num(ctx.cfg, "cavity", "t2_us")) / 1e6;
    double const depth = f.depth.value_or(num(ctx.cfg, "spinbath", "modulation_depth"));
    double const window = f.window_us.value_or(num(ctx.cfg, "simulation", "echo_window_us")) / 1e6;
    auto const points = f.points.value_or(static_cast<std::size_t>(num(ctx.cfg, "simulation", "echo_points")));
    auto const t12 = uniform_grid(0.0, window, points);

    auto echo = dynamics::simulate_echo_decay(t2, spinbath::mims_envelope(shf.ground, shf.excited, depth), t12);
    auto const fit = dynamics::fit_t2_from_echo(echo, f.fit_from_us / 1e6);
    auto const lines = echo_lines(shf.ground, shf.excited, depth, f.spectrum_window_us / 1e6, f.spectrum_points);

    RunReport r;
    r.title = "echo: two-pulse photon echo with superhyperfine envelope modulation";
    r.add("ground splitting", shf.ground.hz() * 1e-3, "kHz");
    r.add("excited splitting", shf.excited.hz() * 1e-3, "kHz");
    r.add("fitted T2", fit.t2_s.value * 1e6, "us", t2 * 1e6, depth == 0.0 ? Tolerance::rel(0.02) : Tolerance::rel(0.10));
    r.add("log-residual rms", fit.rms_log_residual, "");
    r.add("envelope lines found", static_cast<double>(lines.found_hz.size()), "", 4, Tolerance::abs(0));
    r.notes.push_back("envelope lines [kHz]: " + fmt_list(lines.found_hz, 1e3));
    r.notes.push_back("expected {De-Dg, Dg, De, De+Dg} [kHz]: " + fmt_list(lines.expected_hz, 1e3));
    if (fit.modulation_suspected)
        r.notes.push_back("fit window still contains envelope modulation (log-residual rms > 0.02)");
    r.print(ctx.out);
    if (!lines.exact_match)
        ctx.err << "warning: envelope spectrum lines do not match the expected set\n";

    echo.add_meta("ground_splitting_hz", shf.ground.hz());
    echo.add_meta("excited_splitting_hz", shf.excited.hz());
    ctx.param("t2_s", t2);
    ctx.param("modulation_depth", depth);
    ctx.param("window_s", window);
    ctx.param("points", static_cast<double>(points));
    ctx.write([&](std::ostream& os) { write_trace_csv(os, echo, ctx.header("echo", false)); });
}

struct G2Flags
{
    std::optional<std::size_t> pulses;
    bool no_shelving = false;
    std::optional<double> recovery_hz;
    std::string counts_in;
    std::string counts_out;
};

void cmd_g2(Context& ctx, G2Flags const& f)
{
    auto scheme = scheme_of(ctx.cfg);
    if (f.no_shelving)
        scheme.shelving_probability = 0.0;
    if (f.recovery_hz)
        scheme.shelf_recovery_rate_hz = *f.recovery_hz;
    auto const bg = background_of(ctx.cfg);
    double const period = period_of(ctx.cfg);
    auto const pulses = f.pulses.value_or(static_cast<std::size_t>(num(ctx.cfg, "simulation", "pulses")));
    auto const opt = g2_options_of(ctx.cfg);

    photonstats::CountRecord rec;
    if (!f.counts_in.empty())
    {
        std::ifstream is(f.counts_in);
        if (!is)
            throw IoError("cannot open '" + f.counts_in + "'");
        rec = photonstats::read_count_record(is);
    }
    else
    {
        rec = photonstats::simulate_emitter_stream(scheme, bg, pulses, period, ctx.seed(), ctx.inv.workers);
    }
    if (!f.counts_out.empty())
    {
        std::ofstream os(f.counts_out, std::ios::binary | std::ios::trunc);
        if (!os)
            throw IoError("cannot open '" + f.counts_out + "' for writing");
        photonstats::write_count_record(os, rec);
    }
    auto const g2 = photonstats::g2_estimator(rec, opt);

    bool const reference_scheme = f.counts_in.empty() && !f.no_shelving && !f.recovery_hz && !f.pulses
                                  && !ctx.cfg.explicitly_set("simulation", "shelving_probability");
    std::size_t const fit_lags = opt.far_lag_min > 1 ? opt.far_lag_min - 1 : 1;
    auto const bunch = photonstats::analyse_bunching(g2, rec.period_s, fit_lags);

    RunReport r;
    r.title = "g2: pulsed autocorrelation of a multilevel emitter with background";
    r.add("pulses", static_cast<double>(rec.pulses()), "");
    if (reference_scheme)
        r.add("detected rate", rec.mean_counts() / rec.period_s, "1/s", 500, Tolerance::rel(0.05));
    else
        r.add("detected rate", rec.mean_counts() / rec.period_s, "1/s");
    if (f.counts_in.empty())
    {
        double const rho = photonstats::signal_fraction(scheme, bg, period);
        r.add("signal fraction rho", rho, "");
        double const analytic = photonstats::g2_zero_analytic(rho);
        double const sigma = g2.std_error(0);
        r.add("g2(0) Monte Carlo", g2.g2(0), "", analytic, Tolerance::abs(3.0 * sigma));
        if (reference_scheme)
            r.add("g2(0) analytic 1 - rho^2", analytic, "", 0.09, Tolerance::abs(0.013));
        else
            r.add("g2(0) analytic 1 - rho^2", analytic, "");
    }
    else
    {
        r.add("g2(0)", g2.g2(0), "");
    }
    r.add("g2(0) std error", g2.std_error(0), "");
    r.add("g2(1)", g2.g2(1), "");
    r.add("bunching amplitude g2(0+) - 1", bunch.amplitude, "");
    r.add("far-window coincidences", g2.far_coincidences, "");
    r.add("bunching present", bunch.bunching_present ? 1.0 : 0.0, "");
    if (bunch.lag_constant_s > 0.0)
    {
        r.add("bunching lag constant", bunch.lag_constant_s * 1e6, "us");
        if (reference_scheme)
            r.add("bunching shoulder edge (3 x lag constant)", bunch.shoulder_edge_s * 1e6, "us", 600,
                  Tolerance::rel(0.25));
        else
            r.add("bunching shoulder edge (3 x lag constant)", bunch.shoulder_edge_s * 1e6, "us");
    }
    r.print(ctx.out);

    ctx.param("pulses", static_cast<double>(rec.pulses()));
    ctx.param("period_s", rec.period_s);
    if (f.counts_in.empty())
    {
        ctx.param("excitation_probability", scheme.excitation_probability);
        ctx.param("detection_probability", scheme.detection_probability);
        ctx.param("shelving_probability", scheme.shelving_probability);
        ctx.param("shelf_recovery_rate_hz", scheme.shelf_recovery_rate_hz);
        ctx.param("background_per_pulse", bg.mean_per_pulse());
    }
    else
    {
        ctx.param("counts_in", f.counts_in);
    }
    ctx.write([&](std::ostream& os) { write_trace_csv(os, g2.trace, ctx.header("g2", f.counts_in.empty())); });
}

struct SfsFlags
{
    std::optional<double> amplitude;
    std::optional<double> exponent;
    std::optional<double> min_ghz;
    std::optional<double> max_ghz;
    std::optional<double> bin_mhz;
    std::size_t fit_group = 125;
};

void cmd_sfs(Context& ctx, SfsFlags const& f)
{
    auto model = sfs_model_of(ctx.cfg);
    if (f.amplitude)
        model.amplitude = *f.amplitude;
    if (f.exponent)
        model.exponent = *f.exponent;
    double const lo = f.min_ghz.value_or(num(ctx.cfg, "simulation", "sfs_detuning_min_ghz")) * 1e9;
    double const hi = f.max_ghz.value_or(num(ctx.cfg, "simulation", "sfs_detuning_max_ghz")) * 1e9;
    double const bin = f.bin_mhz.value_or(num(ctx.cfg, "simulation", "sfs_bin_mhz")) * 1e6;

    auto const trace = photonstats::sfs_generate(model, lo, hi, bin, ctx.seed());

    RunReport r;
    r.title = "sfs: spectral density of ions with Poisson fine structure";
    r.add("bins", static_cast<double>(trace.size()), "");
    if (model.amplitude > 0.0)
    {
        r.add("single-ion threshold (model)", dynamics::single_ion_threshold(model.amplitude, model.exponent), "GHz",
              25, Tolerance::rel(0.05));
        auto const binned = photonstats::sfs_binned_density(trace, model, f.fit_group);
        if (binned.size() >= 3)
        {
            auto const fit = dynamics::fit_power_law(binned);
            r.add("fitted exponent p", fit.exponent, "", model.exponent, Tolerance::abs(0.1));
            r.add("fitted threshold", dynamics::single_ion_threshold(fit.amplitude, fit.exponent), "GHz");
        }
        auto const disp = photonstats::poisson_dispersion_test(trace);
        r.add("variance / mean", disp.variance_to_mean, "");
        r.add("chi^2 two-sided p-value", disp.p_value, "");
        if (!disp.consistent())
            r.notes.push_back("scatter inconsistent with Poisson at the 5 % level");
    }
    r.print(ctx.out);

    ctx.param("amplitude", model.amplitude);
    ctx.param("exponent", model.exponent);
    ctx.param("detuning_min_hz", lo);
    ctx.param("detuning_max_hz", hi);
    ctx.param("bin_hz", bin);
    ctx.param("reference_bandwidth_hz", model.reference_bandwidth_hz);
    ctx.write([&](std::ostream& os) { write_trace_csv(os, trace, ctx.header("sfs", true)); });
}

void cmd_histogram(Context& ctx, std::optional<std::size_t> samples_flag, std::optional<std::size_t> bins_flag)
{
    auto const mode = mode_of(ctx.cfg);
    auto const samples = samples_flag.value_or(static_cast<std::size_t>(num(ctx.cfg, "simulation", "histogram_samples")));
    auto const bins = bins_flag.value_or(static_cast<std::size_t>(num(ctx.cfg, "simulation", "histogram_bins")));
    auto const h = photonstats::coupling_histogram(mode, samples, bins, ctx.seed(), ctx.inv.workers);

    bool monotone = true;
    for (std::size_t i = 1; i < h.fractions.size(); ++i)
        monotone = monotone && h.fractions[i] <= h.fractions[i - 1];

    RunReport r;
    r.title = "histogram: relative emission rate (g/gmax)^2 of randomly placed ions";
    r.add("samples", static_cast<double>(samples), "");
    r.add("fraction in lowest bin", h.fractions.front(), "");
    r.add("fraction in highest bin", h.fractions.back(), "");
    r.add("density decreases toward high PL", monotone ? 1.0 : 0.0, "");
    r.print(ctx.out);

    ctx.param("samples", static_cast<double>(samples));
    ctx.param("bins", static_cast<double>(bins));
    ctx.param("wavelength_eff_m", mode.wavelength_eff_m);
    ctx.param("waist_m", mode.waist_m);
    ctx.param("transverse_radius_m", mode.transverse_radius_m);
    ctx.write([&](std::ostream& os) {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < h.counts.size(); ++i)
            rows.push_back({format_double(h.edges[i]), format_double(h.edges[i + 1]), std::to_string(h.counts[i]),
                            format_double(h.fractions[i])});
        write_table_csv(os, {"bin_low", "bin_high", "count", "fraction"}, rows, ctx.header("histogram", true));
    });
}

void cmd_spinbath(Context& ctx, std::size_t points)
{
    auto const y = site_of(ctx.cfg, "y_", "Y");
    auto const v = site_of(ctx.cfg, "v_", "V");
    auto const gm = ground_moment(ctx.cfg);
    auto const em = excited_moment(ctx.cfg);
    auto const shf = superhyperfine_summary(ctx.cfg);
    double const b = field_t(ctx.cfg);

    RunReport r;
    r.title = "spinbath: Nd-Y / Nd-V superhyperfine splittings";
    r.add("Y ground splitting at 0 T", shf.ground_zero_field.hz() * 1e-3, "kHz", 80, Tolerance::rel(0.15));
    r.add("Y ground splitting", shf.ground.hz() * 1e-3, "kHz", 740, Tolerance::rel(0.10));
    r.add("Y excited splitting", shf.excited.hz() * 1e-3, "kHz", 790, Tolerance::rel(0.10));
    r.add("V sublevel count", shf.vanadium.count, "", 8, Tolerance::abs(0));
    r.add("V adjacent splitting", shf.vanadium.min_splitting.hz() * 1e-6, "MHz");
    r.add("V outermost splitting", shf.vanadium.max_splitting.hz() * 1e-6, "MHz");
    r.add("dipolar field at Y (ground)", spinbath::dipolar_field(gm, y) * 1e3, "mT");
    r.add("dipolar field at V (ground)", spinbath::dipolar_field(gm, v) * 1e3, "mT");
    r.print(ctx.out);

    ctx.param("points", static_cast<double>(points));
    ctx.param("b_field_max_t", b);
    ctx.write([&](std::ostream& os) {
        TimeTrace t;
        t.x = {"field", "T", uniform_grid(0.0, std::max(b, 1e-3), points)};
        t.y = {"y_ground_splitting", "Hz", {}};
        Column ye{"y_excited_splitting", "Hz", {}}, vg{"v_ground_adjacent_splitting", "Hz", {}};
        for (double bf : t.x.values)
        {
            t.y.values.push_back(spinbath::superhyperfine_splitting(y, gm, bf).hz());
            ye.values.push_back(spinbath::superhyperfine_splitting(y, em, bf).hz());
            vg.values.push_back(spinbath::superhyperfine_splitting(v, gm, bf).hz());
        }
        t.extra = {ye, vg};
        write_trace_csv(os, t, ctx.header("spinbath", false));
    });
}

void cmd_flipflop(Context& ctx, std::size_t points)
{
    auto const p = flipflop_params_of(ctx.cfg);
    auto const sd = spinbath::flipflop_gamma_sd(p);
    auto const tm = spinbath::flipflop_tm(p.intrinsic_linewidth, sd, p.spin_flip_rate_hz);
    double const bound_t2 = num(ctx.cfg, "spinbath", "shf_limited_t2_us") / 1e6;
    double const bound_t1 = num(ctx.cfg, "material", "bulk_lifetime_us") / 1e6;
    auto const bound = spinbath::superhyperfine_dephasing_bound(bound_t1, bound_t2);

    RunReport r;
    r.title = "flipflop: dephasing from dopant spin flip-flops";
    r.add("sech^2 factor", sech_squared_thermal(p.g_ground, p.field_t, p.temperature_k), "");
    r.add("spectral diffusion width Gamma_SD", sd.hz() * 1e-3, "kHz");
    r.add("decay time T_M", tm.tm_s * 1e6, "us");
    r.add("linewidth 1/(pi T_M)", tm.linewidth.hz() * 1e-3, "kHz");
    r.add("added dephasing", tm.added_dephasing.hz(), "Hz", 30, Tolerance::factor(2.0));
    r.add("V-limited dephasing 1/(pi T2) - 1/(2 pi T1)", bound.hz() * 1e-3, "kHz", 10.0, Tolerance::rel(0.01));
    r.notes.push_back("Gamma_0 = " + format_double(p.intrinsic_linewidth.hz()) + " Hz is a free parameter");
    r.print(ctx.out);

    ctx.param("intrinsic_linewidth_hz", p.intrinsic_linewidth.hz());
    ctx.param("dopant_density_per_m3", p.dopant_density_per_m3);
    ctx.param("spin_flip_rate_hz", p.spin_flip_rate_hz);
    ctx.param("field_t", p.field_t);
    ctx.param("points", static_cast<double>(points));
    ctx.write([&](std::ostream& os) {
        TimeTrace t;
        t.x = {"temperature", "K", {}};
        t.y = {"added_dephasing", "Hz", {}};
        Column sdc{"gamma_sd", "Hz", {}}, tmc{"tm", "s", {}};
        for (double lg : uniform_grid(std::log10(0.05), std::log10(5.0), points))
        {
            auto q = p;
            q.temperature_k = std::pow(10.0, lg);
            auto const s = spinbath::flipflop_gamma_sd(q);
            auto const d = spinbath::flipflop_tm(q.intrinsic_linewidth, s, q.spin_flip_rate_hz);
            t.x.values.push_back(q.temperature_k);
            t.y.values.push_back(d.added_dephasing.hz());
            sdc.values.push_back(s.hz());
            tmc.values.push_back(d.tm_s);
        }
        t.extra = {sdc, tmc};
        write_trace_csv(os, t, ctx.header("flipflop", false));
    });
}

struct FitFlags
{
    std::string kind;
    std::string input;
    double t_min_us = 0.0;
    double pulse_ns = 0.0;
    std::size_t group = 125;
};

void cmd_fit(Context& ctx, FitFlags const& f)
{
    std::ifstream is(f.input);
    if (!is)
        throw IoError("cannot open '" + f.input + "'");
    auto const trace = read_trace_csv(is);

    RunReport r;
    r.title = "fit: " + f.kind + " from " + f.input;
    if (f.kind == "t2star")
    {
        auto const fit = dynamics::extract_t2star(trace);
        r.add("T2*", fit.t2_star_s.value * 1e6, "us");
        r.add("T2* std error", fit.t2_star_s.std_error * 1e6, "us");
        r.add("points used", static_cast<double>(fit.points_used), "");
    }
    else if (f.kind == "echo")
    {
        auto const fit = dynamics::fit_t2_from_echo(trace, f.t_min_us / 1e6);
        r.add("T2", fit.t2_s.value * 1e6, "us");
        r.add("T2 std error", fit.t2_s.std_error * 1e6, "us");
        r.add("log-residual rms", fit.rms_log_residual, "");
        if (fit.modulation_suspected)
            r.notes.push_back("envelope modulation in the fit window");
    }
    else if (f.kind == "rabi")
    {
        double pulse = f.pulse_ns * 1e-9;
        if (!(pulse > 0.0))
        {
            for (auto const& [k, v] : trace.metadata)
            {
                if (k == "pulse_s")
                    pulse = parse_double(v).value_or(0.0);
            }
        }
        if (!(pulse > 0.0))
            throw ValidationError("fit rabi: pulse length unknown; pass --pulse-ns");
        auto const pts = dynamics::extract_rabi_points(trace, pulse);
        auto const g0 = cavity::g0_from_rabi(pts);
        r.add("g0 / 2pi", ordinary_from_angular(g0.value).hz() * 1e-6, "MHz");
        r.add("g0 std error / 2pi", ordinary_from_angular(g0.std_error).hz() * 1e-6, "MHz");
        r.add("extrema used", static_cast<double>(pts.size()), "");
    }
    else if (f.kind == "sfs")
    {
        auto const model = sfs_model_of(ctx.cfg);
        auto const binned = photonstats::sfs_binned_density(trace, model, f.group);
        auto const fit = dynamics::fit_power_law(binned);
        r.add("exponent p", fit.exponent, "");
        r.add("exponent std error", fit.exponent_std_error, "");
        r.add("single-ion threshold", dynamics::single_ion_threshold(fit.amplitude, fit.exponent), "GHz");
    }
    else if (f.kind == "dephasing")
    {
        // columns: T1 [s], T2 [s]
        std::vector<dynamics::CoherencePoint> pts;
        for (std::size_t i = 0; i < trace.size(); ++i)
            pts.push_back({trace.x.values[i], trace.y.values[i]});
        auto const g = dynamics::fit_pure_dephasing(pts);
        r.add("pure dephasing gamma*", g.value.hz() * 1e-3, "kHz");
        r.add("gamma* std error", g.std_error.hz() * 1e-3, "kHz");
    }
    else
    {
        throw ValidationError("fit: unknown kind '" + f.kind + "' (t2star, echo, rabi, sfs, dephasing)");
    }
    r.print(ctx.out);
}

void cmd_golden(Context& ctx)
{
    auto const report = golden_report(ctx.cfg, ctx.seed(), ctx.inv.workers);
    report.print(ctx.out);
    ctx.write([&](std::ostream& os) {
        std::vector<std::vector<std::string>> rows;
        for (auto const& row : report.rows)
        {
            auto const dev = row.deviation();
            auto const ok = row.within_tolerance();
            rows.push_back({row.quantity, format_double(row.value), row.unit,
                            row.reference ? format_double(*row.reference) : "", dev ? format_double(*dev) : "",
                            ok ? (*ok ? "ok" : "FAIL") : ""});
        }
        write_table_csv(os, {"quantity", "value", "unit", "reference", "relative_deviation", "status"}, rows,
                        ctx.header("golden", true));
    });
    if (!report.all_within())
        throw GoldenMismatch("golden: at least one quantity is outside its tolerance");
}

} // namespace

RunReport golden_report(ConfigDocument const& cfg, std::uint64_t seed, unsigned workers)
{
    RunReport r;
    r.title = "golden: reference-device quantities";

    // spectroscopy and cavity QED
    auto const ch = cavity_chain(cfg);
    auto const material = material_of(cfg);
    r.add("oscillator strength f", ch.transition.oscillator_strength, "", 3.7e-5, Tolerance::rel(0.02));
    r.add("radiative lifetime T_rad", ch.transition.radiative_lifetime_s * 1e6, "us", 237, Tolerance::rel(0.02));
    r.add("branching ratio beta", ch.transition.branching_ratio, "", 0.38, Tolerance::rel(0.02));
    r.add("dipole moment mu", ch.transition.dipole_moment_cm, "C m", 1.59e-31, Tolerance::rel(0.02));
    r.add("max coupling g0 / 2pi", ordinary_from_angular(ch.g0_theory).hz() * 1e-6, "MHz", 52.7, Tolerance::rel(0.02));
    r.add("max Purcell factor F", ch.purcell, "", 189, Tolerance::rel(0.03));
    r.add("4 g0^2 T_rad / kappa vs F", ch.purcell_cross, "", ch.purcell, Tolerance::rel(0.03));
    r.add("mean photon number at 71.8 nW", ch.nbar, "", 1.0, Tolerance::rel(0.02));
    r.add("Purcell lifetime T_cav (max g0)", ch.t_cav_theory * 1e6, "us", 1.25, Tolerance::rel(0.05));
    r.add("measured-route Purcell factor", ch.purcell_measured, "", 111, Tolerance::rel(0.02));
    r.add("cooperativity C", ch.cooperativity, "", 2.9, Tolerance::rel(0.03));
    r.add("cooperativity at 10 x Q", ch.projection.cooperativity, "", 29, Tolerance::rel(0.10));
    r.add("indistinguishability T2*/(2 T1)", ch.indistinguishability, "", 0.952, Tolerance::abs(5e-4));
    r.add("ground Zeeman splitting", spectroscopy::zeeman_splitting(material.ground_g_factor, field_t(cfg)).hz() * 1e-9,
          "GHz", 12.88, Tolerance::rel(0.005));
    r.add("overall detection efficiency", 100.0 * cavity::detection_budget(chain_of(cfg)).overall, "%", 3.6,
          Tolerance::abs(0.5));

    // spin bath
    auto const shf = superhyperfine_summary(cfg);
    r.add("Y ground splitting at 0 T", shf.ground_zero_field.hz() * 1e-3, "kHz", 80, Tolerance::rel(0.15));
    r.add("Y ground splitting Dg", shf.ground.hz() * 1e-3, "kHz", 740, Tolerance::rel(0.10));
    r.add("Y excited splitting De", shf.excited.hz() * 1e-3, "kHz", 790, Tolerance::rel(0.10));
    r.add("V sublevel count", shf.vanadium.count, "", 8, Tolerance::abs(0));
    bool const v_in_range = shf.vanadium.min_splitting.hz() >= 3e6 && shf.vanadium.max_splitting.hz() <= 35e6;
    r.add("V splittings inside [3, 35] MHz", v_in_range ? 1.0 : 0.0, "", 1.0, Tolerance::abs(0));
    auto const ff = flipflop_params_of(cfg);
    auto const tm = spinbath::flipflop_tm(ff.intrinsic_linewidth, spinbath::flipflop_gamma_sd(ff), ff.spin_flip_rate_hz);
    r.add("flip-flop added dephasing", tm.added_dephasing.hz(), "Hz", 30, Tolerance::factor(2.0));
    r.add("V-limited dephasing", spinbath::superhyperfine_dephasing_bound(material.lifetime_s,
                                                                          num(cfg, "spinbath", "shf_limited_t2_us") * 1e-6).hz() * 1e-3,
          "kHz", 10.0, Tolerance::rel(0.01));

    // coherent dynamics
    {
        dynamics::RamseyModel m;
        m.beat = shf.ground;
        m.t2_star_s = ch.t2_star;
        auto const delays = uniform_grid(0.0, num(cfg, "simulation", "ramsey_window_us") * 1e-6,
                                         static_cast<std::size_t>(num(cfg, "simulation", "ramsey_points")));
        auto const fringes = dynamics::simulate_ramsey(m, delays);
        auto const beat = dynamics::ramsey_beat_spectrum(fringes, m.t2_star_s, m.shape);
        r.add("Ramsey beat", beat.beat_hz * 1e-3, "kHz", 740, Tolerance::abs(beat.spectrum.resolution_hz * 1e-3));
        auto const t2s = dynamics::extract_t2star(fringes);
        r.add("T2* from Ramsey fringes", t2s.t2_star_s.value * 1e6, "us", 4.0, Tolerance::rel(0.02));
    }
    {
        auto const lines = echo_lines(shf.ground, shf.excited, num(cfg, "spinbath", "modulation_depth"), 400e-6, 8001);
        r.add("echo envelope lines at {De-Dg, Dg, De, De+Dg}", lines.exact_match ? 4.0 : static_cast<double>(lines.found_hz.size()) + 0.5,
              "", 4, Tolerance::abs(0));
        double const t2 = num(cfg, "cavity", "t2_us") / 1e6;
        auto const t12 = uniform_grid(0.0, num(cfg, "simulation", "echo_window_us") * 1e-6,
                                      static_cast<std::size_t>(num(cfg, "simulation", "echo_points")));
        auto const echo = dynamics::simulate_echo_decay(t2, {}, t12);
        r.add("T2 from echo decay", dynamics::fit_t2_from_echo(echo, 0.0).t2_s.value * 1e6, "us", 25.4,
              Tolerance::rel(0.02));
    }
    {
        double const gamma = num(cfg, "cavity", "pure_dephasing_khz") * 1e3;
        std::vector<dynamics::CoherencePoint> pts;
        for (double t1 : {2.1e-6, 5e-6, 10e-6, 20e-6, 45e-6, 90e-6})
            pts.push_back({t1, 1.0 / (c::pi * (1.0 / (c::two_pi * t1) + gamma))});
        r.add("gamma* from T2 vs T1", dynamics::fit_pure_dephasing(pts).value.hz() * 1e-3, "kHz", 9.7,
              Tolerance::rel(0.02));
    }
    {
        auto const relax = nutation_relaxation(cfg);
        double const pulse = num(cfg, "simulation", "rabi_pulse_ns") / 1e9;
        auto const nbar = uniform_grid(0.0, num(cfg, "simulation", "rabi_nbar_max"),
                                       static_cast<std::size_t>(num(cfg, "simulation", "rabi_points")));
        auto const scan = dynamics::rabi_nutation_scan(ch.g0_measured, nbar, pulse, relax, workers);
        auto const g0 = cavity::g0_from_rabi(dynamics::extract_rabi_points(scan, pulse));
        r.add("g0 / 2pi from nutation", ordinary_from_angular(g0.value).hz() * 1e-6, "MHz", 28.5, Tolerance::rel(0.02));
    }

    // photon statistics
    {
        auto const model = sfs_model_of(cfg);
        r.add("single-ion threshold", dynamics::single_ion_threshold(model.amplitude, model.exponent), "GHz", 25,
              Tolerance::rel(0.05));
        auto const trace = photonstats::sfs_generate(model, num(cfg, "simulation", "sfs_detuning_min_ghz") * 1e9,
                                                     num(cfg, "simulation", "sfs_detuning_max_ghz") * 1e9,
                                                     num(cfg, "simulation", "sfs_bin_mhz") * 1e6, seed);
        auto const fit = dynamics::fit_power_law(photonstats::sfs_binned_density(trace, model, 125));
        r.add("power-law exponent from SFS", fit.exponent, "", 2.9, Tolerance::abs(0.1));
    }
    {
        auto const scheme = scheme_of(cfg);
        auto const bg = background_of(cfg);
        double const period = period_of(cfg);
        auto const rec = photonstats::simulate_emitter_stream(
            scheme, bg, static_cast<std::size_t>(num(cfg, "simulation", "pulses")), period, seed, workers);
        auto const g2 = photonstats::g2_estimator(rec, g2_options_of(cfg));
        r.add("detected photons per pulse", rec.mean_counts(), "", 0.02, Tolerance::rel(0.05));
        r.add("g2(0) Monte Carlo", g2.g2(0), "", 0.09, Tolerance::abs(0.013));
        bool bunched = false;
        for (std::size_t m = 1; m * period < 600e-6 && m < g2.trace.size(); ++m)
            bunched = bunched || g2.g2(m) > 1.0 + 3.0 * g2.std_error(m);
        r.add("bunching inside 600 us", bunched ? 1.0 : 0.0, "", 1.0, Tolerance::abs(0));
    }
    return r;
}

int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"rexsim: single rare-earth ion in a nanophotonic cavity", "rexsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    Invocation inv;
    auto add_common = [&](CLI::App* sub, bool seeded) {
        sub->add_option("--config", inv.config_path, "INI config (defaults: reference device)");
        sub->add_option("--out", inv.out_path, "CSV output path");
        if (seeded)
        {
            sub->add_option("--seed", inv.seed, "master seed (overrides [simulation] seed)");
            sub->add_option("--workers", inv.workers, "worker threads, 0 = one per core (results do not depend on it)");
        }
    };

    std::function<void(Context&)> action;

    auto* spectro = app.add_subcommand("spectro", "absorption -> f, T_rad, beta, mu; Zeeman splitting");
    add_common(spectro, false);
    spectro->callback([&] { action = [](Context& c) { cmd_spectro(c); }; });

    std::size_t cavity_points = 21;
    auto* cav = app.add_subcommand("cavity", "Purcell factor, g0, T_cav, cooperativity, Q scaling");
    add_common(cav, false);
    cav->add_option("--points", cavity_points, "points of the Q-scaling sweep")->capture_default_str();
    cav->callback([&] { action = [&](Context& c) { cmd_cavity(c, cavity_points); }; });

    auto* budget = app.add_subcommand("budget", "detection efficiency budget");
    add_common(budget, false);
    budget->callback([&] { action = [](Context& c) { cmd_budget(c); }; });

    RabiFlags rabi_flags;
    auto* rabi = app.add_subcommand("rabi", "optical nutation scan vs mean photon number");
    add_common(rabi, false);
    rabi->add_option("--workers", inv.workers, "worker threads, 0 = one per core");
    rabi->add_option("--nbar-max", rabi_flags.nbar_max, "largest mean photon number");
    rabi->add_option("--points", rabi_flags.points, "grid points");
    rabi->add_option("--pulse-ns", rabi_flags.pulse_ns, "square pulse length [ns]");
    rabi->add_option("--g0-mhz", rabi_flags.g0_mhz, "coupling g0/2pi [MHz]");
    rabi->callback([&] { action = [&](Context& c) { cmd_rabi(c, rabi_flags); }; });

    RamseyFlags ramsey_flags;
    auto* ramsey = app.add_subcommand("ramsey", "Ramsey fringes, superhyperfine beat and T2*");
    add_common(ramsey, false);
    ramsey->add_option("--beat-khz", ramsey_flags.beat_khz, "beat frequency [kHz]");
    ramsey->add_option("--t2star-us", ramsey_flags.t2_star_us, "T2* [us]");
    ramsey->add_option("--detuning-khz", ramsey_flags.detuning_khz, "laser detuning [kHz]");
    ramsey->add_option("--window-us", ramsey_flags.window_us, "longest delay [us]");
    ramsey->add_option("--points", ramsey_flags.points, "delay grid points");
    ramsey->add_option("--envelope", ramsey_flags.envelope, "exponential | gaussian");
    ramsey->add_flag("--t1-background", ramsey_flags.t1_background, "multiply by exp(-t/T1), then divide it out");
    ramsey->callback([&] { action = [&](Context& c) { cmd_ramsey(c, ramsey_flags); }; });

    EchoFlags echo_flags;
    auto* echo = app.add_subcommand("echo", "two-pulse echo decay with envelope modulation");
    add_common(echo, false);
    echo->add_option("--t2-us", echo_flags.t2_us, "T2 [us]");
    echo->add_option("--depth", echo_flags.depth, "modulation depth k");
    echo->add_option("--window-us", echo_flags.window_us, "longest t12 [us]");
    echo->add_option("--points", echo_flags.points, "t12 grid points");
    echo->add_option("--fit-from-us", echo_flags.fit_from_us, "start of the T2 fit window [us]")->capture_default_str();
    echo->add_option("--spectrum-window-us", echo_flags.spectrum_window_us, "span of the envelope spectrum [us]")
        ->capture_default_str();
    echo->add_option("--spectrum-points", echo_flags.spectrum_points, "samples of the envelope spectrum")
        ->capture_default_str();
    echo->callback([&] { action = [&](Context& c) { cmd_echo(c, echo_flags); }; });

    G2Flags g2_flags;
    auto* g2 = app.add_subcommand("g2", "photon-counting Monte Carlo and g2(tau)");
    add_common(g2, true);
    g2->add_option("--pulses", g2_flags.pulses, "excitation pulses");
    g2->add_flag("--no-shelving", g2_flags.no_shelving, "two-level emitter (p_s = 0)");
    g2->add_option("--recovery-hz", g2_flags.recovery_hz, "shelf recovery rate R_s [1/s]");
    g2->add_option("--counts-in", g2_flags.counts_in, "analyse a saved count record instead of simulating");
    g2->add_option("--counts-out", g2_flags.counts_out, "save the simulated count record");
    g2->callback([&] { action = [&](Context& c) { cmd_g2(c, g2_flags); }; });

    SfsFlags sfs_flags;
    auto* sfs = app.add_subcommand("sfs", "inhomogeneous spectral density with statistical fine structure");
    add_common(sfs, true);
    sfs->add_option("--amplitude", sfs_flags.amplitude, "A (ions per reference bandwidth at 1 GHz)");
    sfs->add_option("--exponent", sfs_flags.exponent, "power-law exponent p");
    sfs->add_option("--min-ghz", sfs_flags.min_ghz, "scan start [GHz]");
    sfs->add_option("--max-ghz", sfs_flags.max_ghz, "scan end [GHz]");
    sfs->add_option("--bin-mhz", sfs_flags.bin_mhz, "bin width [MHz]");
    sfs->add_option("--fit-group", sfs_flags.fit_group, "bins summed per power-law fit point")->capture_default_str();
    sfs->callback([&] { action = [&](Context& c) { cmd_sfs(c, sfs_flags); }; });

    std::optional<std::size_t> hist_samples, hist_bins;
    auto* hist = app.add_subcommand("histogram", "coupling-strength (PL intensity) histogram");
    add_common(hist, true);
    hist->add_option("--samples", hist_samples, "ions placed");
    hist->add_option("--bins", hist_bins, "histogram bins");
    hist->callback([&] { action = [&](Context& c) { cmd_histogram(c, hist_samples, hist_bins); }; });

    std::size_t spin_points = 40;
    auto* spin = app.add_subcommand("spinbath", "superhyperfine splittings of Y and V ligands");
    add_common(spin, false);
    spin->add_option("--points", spin_points, "field sweep points")->capture_default_str();
    spin->callback([&] { action = [&](Context& c) { cmd_spinbath(c, spin_points); }; });

    std::size_t ff_points = 41;
    auto* flip = app.add_subcommand("flipflop", "spectral diffusion from dopant spin flip-flops");
    add_common(flip, false);
    flip->add_option("--points", ff_points, "temperature sweep points")->capture_default_str();
    flip->callback([&] { action = [&](Context& c) { cmd_flipflop(c, ff_points); }; });

    FitFlags fit_flags;
    auto* fit = app.add_subcommand("fit", "fit a CSV written by rabi, ramsey, echo or sfs");
    fit->add_option("--config", inv.config_path, "INI config");
    fit->add_option("kind", fit_flags.kind, "t2star | echo | rabi | sfs | dephasing")->required();
    fit->add_option("--in", fit_flags.input, "input CSV")->required();
    fit->add_option("--t-min-us", fit_flags.t_min_us, "echo: start of the fit window [us]");
    fit->add_option("--pulse-ns", fit_flags.pulse_ns, "rabi: pulse length when the CSV lacks it [ns]");
    fit->add_option("--group", fit_flags.group, "sfs: bins per fit point")->capture_default_str();
    fit->callback([&] { action = [&](Context& c) { cmd_fit(c, fit_flags); }; });

    auto* golden = app.add_subcommand("golden", "every reference-device quantity against its target; exit 1 on mismatch");
    add_common(golden, true);
    golden->callback([&] { action = [](Context& c) { cmd_golden(c); }; });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (CLI::ParseError const& e)
    {
        int const code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try
    {
        Context ctx{inv.config_path.empty() ? config::default_config() : config::parse_config(inv.config_path),
                    inv, out, err, {}};
        action(ctx);
        return exit_ok;
    }
    catch (IoError const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_io;
    }
    catch (NumericError const& e)
    {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    }
    catch (FitError const& e)
    {
        err << "fit error: " << e.what() << '\n';
        return exit_numeric;
    }
    catch (Error const& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (GoldenMismatch const& e)
    {
        err << e.what() << '\n';
        return exit_golden_mismatch;
    }
    catch (std::exception const& e)
    {
        err << "internal error: " << e.what() << '\n';
        return exit_numeric;
    }
}

} // namespace rexsim::cli

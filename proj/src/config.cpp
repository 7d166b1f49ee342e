#include "rexsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rexsim/numeric_format.hpp"

namespace rexsim::config {

namespace {

using enum ValueKind;
using enum Constraint;

// clang-format off
constexpr KeySpec kKeys[] = {
    // section      key                            unit        kind     constraint    default        description
    {"material",   "absorption_area_ghz_per_cm",  "GHz/cm",   number,  positive,     "102",         "integrated absorption of the probed transition"},
    {"material",   "ion_density_per_m3",          "m^-3",     number,  positive,     "1.24e23",     "dopant number density of the absorption sample"},
    {"material",   "refractive_index",            "",         number,  above_one,    "2.1785",      "index for light polarized along the dipole"},
    {"material",   "wavelength_nm",               "nm",       number,  positive,     "880",         "vacuum wavelength of the transition"},
    {"material",   "bulk_lifetime_us",            "us",       number,  positive,     "90",          "fluorescence lifetime in bulk"},
    {"material",   "ground_g_factor",             "",         number,  positive,     "2.36",        "ground doublet g-factor along the field"},
    {"material",   "excited_g_factor",            "",         number,  positive,     "0.9",         "excited doublet g-factor (not measured; consistency value)"},
    {"material",   "local_field_model",           "",         text,    any,          "real",        "real | virtual | none"},

    {"cavity",     "q_factor",                    "",         number,  positive,     "3900",        "loaded quality factor"},
    {"cavity",     "mode_volume_um3",             "um^3",     number,  positive,     "0.056",       "mode volume"},
    {"cavity",     "resonance_frequency_ghz",     "GHz",      number,  positive,     "340703",      "cavity resonance (ordinary frequency)"},
    {"cavity",     "kappa_ghz",                   "GHz",      number,  non_negative, "90",          "energy decay rate / 2pi; 0 derives it from Q"},
    {"cavity",     "kappa_in_ghz",                "GHz",      number,  positive,     "40",          "input-mirror coupling rate / 2pi"},
    {"cavity",     "coupling_fraction",           "",         number,  efficiency,   "0.45",        "kappa_in / kappa"},
    {"cavity",     "input_power_nw",              "nW",       number,  non_negative, "71.8",        "peak power in the waveguide"},
    {"cavity",     "measured_g0_mhz",             "MHz",      number,  positive,     "28.5",        "coupling from the nutation fit / 2pi"},
    {"cavity",     "measured_lifetime_us",        "us",       number,  positive,     "2.1",         "Purcell-shortened lifetime of the single ion"},
    {"cavity",     "t2_us",                       "us",       number,  positive,     "25.4",        "homogeneous T2 without cavity enhancement"},
    {"cavity",     "t2_star_us",                  "us",       number,  positive,     "4.0",         "Ramsey T2* of the single ion"},
    {"cavity",     "pure_dephasing_khz",          "kHz",      number,  non_negative, "9.7",         "pure dephasing rate gamma*"},
    {"cavity",     "q_scale_factor",              "",         number,  positive,     "10",          "Q multiplier for the projection"},

    {"field",      "b_field_mt",                  "mT",       number,  non_negative, "390",         "applied magnetic field"},
    {"field",      "temperature_k",               "K",        number,  positive,     "0.5",         "sample temperature"},

    {"spinbath",   "y_spin",                      "",         number,  positive,     "0.5",         "Y nuclear spin"},
    {"spinbath",   "y_gyromagnetic_mhz_per_t",    "MHz/T",    number,  positive,     "2.1",         "Y gyromagnetic ratio / 2pi"},
    {"spinbath",   "y_distance_angstrom",         "angstrom", number,  positive,     "3.9",         "ion - nearest Y distance"},
    {"spinbath",   "y_theta_deg",                 "deg",      number,  any,          "0",           "angle between moment and ion-Y vector"},
    {"spinbath",   "y_multiplicity",              "",         integer, positive,     "4",           "equivalent Y sites"},
    {"spinbath",   "v_spin",                      "",         number,  positive,     "3.5",         "V nuclear spin"},
    {"spinbath",   "v_gyromagnetic_mhz_per_t",    "MHz/T",    number,  positive,     "11.2",        "V gyromagnetic ratio / 2pi"},
    {"spinbath",   "v_distance_angstrom",         "angstrom", number,  positive,     "3.14",        "ion - nearest V distance"},
    {"spinbath",   "v_theta_deg",                 "deg",      number,  any,          "0",           "angle between moment and ion-V vector"},
    {"spinbath",   "v_multiplicity",              "",         integer, positive,     "1",           "equivalent V sites"},
    {"spinbath",   "modulation_depth",            "",         number,  probability,  "0.2",         "ESEEM modulation depth k (free parameter)"},
    {"spinbath",   "nd_density_per_m3",           "m^-3",     number,  positive,     "6.3e23",      "dopant density of the device crystal"},
    {"spinbath",   "intrinsic_linewidth_khz",     "kHz",      number,  positive,     "1.0",         "Gamma_0 of the flip-flop model (free parameter)"},
    {"spinbath",   "spin_t1_ms",                  "ms",       number,  positive,     "98",          "dopant spin T1 (R = 1/T1)"},
    {"spinbath",   "shf_limited_t2_us",           "us",       number,  positive,     "27.0",        "high-field T2 limited by the V bath"},
    {"spinbath",   "undoped_t2_us",               "us",       number,  positive,     "27.0",        "T2 in the nominally undoped crystal"},

    {"detection",  "dark_count_rate_hz",          "Hz",       number,  non_negative, "2",           "detector dark counts"},

    {"simulation", "seed",                        "",         integer, non_negative, "20181",       "master seed of every Monte Carlo"},
    {"simulation", "repetition_rate_khz",         "kHz",      number,  positive,     "25",          "excitation pulse rate"},
    {"simulation", "pulses",                      "",         integer, positive,     "10000000",    "pulses per photon-counting run"},
    {"simulation", "excitation_probability",      "",         number,  probability,  "0.5",         "p_exc per pulse"},
    {"simulation", "detection_probability",       "",         number,  probability,  "0.048474",    "eta per emitted photon"},
    {"simulation", "shelving_probability",        "",         number,  probability,  "0.09",        "p_s per emission"},
    {"simulation", "shelf_recovery_rate_hz",      "Hz",       number,  positive,     "3850",        "R_s out of the shelf"},
    {"simulation", "background_per_pulse",        "",         number,  non_negative, "0.00091",     "uncorrelated background counts per pulse"},
    {"simulation", "gate_window_us",              "us",       number,  non_negative, "5",           "detection gate after each pulse"},
    {"simulation", "g2_max_lag",                  "",         integer, positive,     "100",         "largest g2 lag (pulses)"},
    {"simulation", "g2_far_lag_min",              "",         integer, positive,     "50",          "normalization window start (pulses)"},
    {"simulation", "g2_far_lag_max",              "",         integer, positive,     "100",         "normalization window end (pulses)"},
    {"simulation", "rabi_pulse_ns",               "ns",       number,  positive,     "250",         "square drive pulse length"},
    {"simulation", "rabi_nbar_max",               "",         number,  positive,     "0.06",        "largest mean photon number of the nutation scan"},
    {"simulation", "rabi_points",                 "",         integer, positive,     "400",         "nutation grid points"},
    {"simulation", "ramsey_window_us",            "us",       number,  positive,     "20",          "longest Ramsey delay"},
    {"simulation", "ramsey_points",               "",         integer, positive,     "2001",        "Ramsey delay grid points"},
    {"simulation", "echo_window_us",              "us",       number,  positive,     "40",          "longest echo pulse separation t12"},
    {"simulation", "echo_points",                 "",         integer, positive,     "4001",        "echo delay grid points"},
    {"simulation", "ramsey_beat_khz",             "kHz",      number,  non_negative, "740",         "Ramsey beat (superhyperfine splitting)"},
    {"simulation", "ramsey_detuning_khz",         "kHz",      number,  any,          "0",           "laser detuning delta"},
    {"simulation", "ramsey_envelope",             "",         text,    any,          "exponential", "exponential | gaussian"},
    {"simulation", "sfs_amplitude",               "",         number,  non_negative, "1.13e4",      "A in N = A (detuning/GHz)^-p per reference bandwidth"},
    {"simulation", "sfs_exponent",                "",         number,  positive,     "2.9",         "p"},
    {"simulation", "sfs_detuning_min_ghz",        "GHz",      number,  positive,     "5",           "scan start"},
    {"simulation", "sfs_detuning_max_ghz",        "GHz",      number,  positive,     "40",          "scan end"},
    {"simulation", "sfs_bin_mhz",                 "MHz",      number,  positive,     "2",           "scan bin width"},
    {"simulation", "sfs_reference_bandwidth_mhz", "MHz",      number,  positive,     "2",           "bandwidth the density refers to"},
    {"simulation", "mode_waist_nm",               "nm",       number,  positive,     "250",         "transverse 1/e field radius of the mode"},
    {"simulation", "mode_transverse_radius_nm",   "nm",       number,  non_negative, "375",         "radius of the ion placement disc"},
    {"simulation", "histogram_samples",           "",         integer, positive,     "100000",      "ions per coupling histogram"},
    {"simulation", "histogram_bins",              "",         integer, positive,     "20",          "histogram bins over [0, 1]"},
};
// clang-format on

struct DefaultStage
{
    std::string_view name;
    double efficiency;
};

constexpr DefaultStage kDefaultStages[] = {
    {"stage_cavity_outcoupling", 0.45}, {"stage_waveguide_fiber", 0.19}, {"stage_fiber_connectors", 0.80},
    {"stage_circulator", 0.65},         {"stage_detector", 0.82},
};

std::vector<std::string> const kSections = {"material", "cavity", "field", "spinbath", "detection", "simulation"};

KeySpec const* find_spec(std::string_view section, std::string_view key)
{
    for (auto const& k : kKeys)
    {
        if (k.section == section && k.key == key)
            return &k;
    }
    return nullptr;
}

bool is_stage_key(std::string_view section, std::string_view key)
{
    return section == "detection" && key.starts_with(kStagePrefix) && key.size() > kStagePrefix.size();
}

KeySpec const& stage_spec()
{
    static constexpr KeySpec spec{"detection", "stage_*", "", number, efficiency, "", "stage efficiency"};
    return spec;
}

std::string constraint_text(Constraint c)
{
    switch (c)
    {
    case any:
        return "";
    case positive:
        return "must be > 0";
    case non_negative:
        return "must be >= 0";
    case probability:
        return "must lie in [0, 1]";
    case efficiency:
        return "must lie in (0, 1]";
    case above_one:
        return "must be > 1";
    }
    return "";
}

bool satisfies(Constraint c, double v)
{
    switch (c)
    {
    case any:
        return true;
    case positive:
        return v > 0.0;
    case non_negative:
        return v >= 0.0;
    case probability:
        return v >= 0.0 && v <= 1.0;
    case efficiency:
        return v > 0.0 && v <= 1.0;
    case above_one:
        return v > 1.0;
    }
    return false;
}

std::vector<std::string_view> text_choices(std::string_view key)
{
    if (key == "local_field_model")
        return {"real", "virtual", "none"};
    if (key == "ramsey_envelope")
        return {"exponential", "gaussian"};
    return {};
}

std::string_view trim(std::string_view s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

int column_of(std::string_view line, std::string_view part)
{
    return static_cast<int>(part.data() - line.data()) + 1;
}

// Converts one value string according to its spec.
Value convert(KeySpec const& spec, std::string_view raw, std::string const& source, int line_no, int col,
              std::string_view key)
{
    std::string const key_s(key);
    if (spec.kind == text)
    {
        auto const choices = text_choices(key);
        if (!choices.empty() && std::find(choices.begin(), choices.end(), raw) == choices.end())
        {
            std::string allowed;
            for (auto c : choices)
                allowed += (allowed.empty() ? "" : ", ") + std::string(c);
            throw ConfigError(ErrorKind::invalid_value, source, line_no, col,
                              "'" + key_s + "' must be one of: " + allowed);
        }
        return std::string(raw);
    }

    // number, optionally followed by its unit token
    auto const space = raw.find_first_of(" \t");
    std::string_view number_part = raw.substr(0, space);
    if (space != std::string_view::npos)
    {
        std::string_view const unit = trim(raw.substr(space));
        if (unit.find_first_of(" \t") != std::string_view::npos)
            throw ConfigError(ErrorKind::syntax, source, line_no, col,
                              "'" + key_s + "' expects '<number> [unit]'");
        if (unit != spec.unit)
            throw ConfigError(ErrorKind::unit_mismatch, source, line_no,
                              col + static_cast<int>(unit.data() - raw.data()),
                              "'" + key_s + "' is in " + (spec.unit.empty() ? "dimensionless units" : std::string(spec.unit))
                                  + ", got '" + std::string(unit) + "'");
    }
    auto const v = parse_double(number_part);
    if (!v || !std::isfinite(*v))
        throw ConfigError(ErrorKind::non_numeric, source, line_no, col,
                          "'" + key_s + "' expects a number, got '" + std::string(number_part) + "'");
    if (spec.kind == integer && (std::floor(*v) != *v || std::abs(*v) > 9.0e15))
        throw ConfigError(ErrorKind::invalid_value, source, line_no, col, "'" + key_s + "' must be an integer");
    if (!satisfies(spec.constraint, *v))
        throw ConfigError(ErrorKind::invalid_value, source, line_no, col,
                          "'" + key_s + "' " + constraint_text(spec.constraint));
    return *v;
}

void fill_defaults(ConfigDocument& doc)
{
    for (auto const& k : kKeys)
    {
        std::string const section(k.section);
        auto const& existing = doc.entries(section);
        bool const present = std::any_of(existing.begin(), existing.end(),
                                         [&](Entry const& e) { return e.key == k.key; });
        if (present)
            continue;
        doc.set(section, Entry{std::string(k.key), convert(k, k.default_value, "<defaults>", 0, 0, k.key), 0});
    }
    auto const& det = doc.entries("detection");
    bool const has_stage = std::any_of(det.begin(), det.end(),
                                       [](Entry const& e) { return is_stage_key("detection", e.key); });
    if (!has_stage)
    {
        for (auto const& s : kDefaultStages)
            doc.set("detection", Entry{std::string(s.name), s.efficiency, 0});
    }
}

} // namespace

std::string_view to_string(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::missing_file:
        return "missing file";
    case ErrorKind::syntax:
        return "syntax error";
    case ErrorKind::unknown_section:
        return "unknown section";
    case ErrorKind::unknown_key:
        return "unknown key";
    case ErrorKind::duplicate_key:
        return "duplicate key";
    case ErrorKind::unit_mismatch:
        return "unit mismatch";
    case ErrorKind::non_numeric:
        return "non-numeric value";
    case ErrorKind::invalid_value:
        return "invalid value";
    }
    return "error";
}

ConfigError::ConfigError(ErrorKind kind, std::string const& source, int line, int column, std::string const& detail)
    : ValidationError(source + (line > 0 ? ":" + std::to_string(line) + ":" + std::to_string(column) : std::string())
                      + ": " + std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      line_(line),
      column_(column)
{
}

std::span<KeySpec const> key_table()
{
    return kKeys;
}

std::vector<std::string> const& ConfigDocument::section_names()
{
    return kSections;
}

std::vector<Entry> const& ConfigDocument::entries(std::string_view section) const
{
    static std::vector<Entry> const empty;
    auto const it = sections_.find(section);
    return it == sections_.end() ? empty : it->second;
}

void ConfigDocument::set(std::string const& section, Entry entry)
{
    auto& list = sections_[section];
    for (auto& e : list)
    {
        if (e.key == entry.key)
        {
            e = std::move(entry);
            return;
        }
    }
    list.push_back(std::move(entry));
}

Entry const& ConfigDocument::find(std::string_view section, std::string_view key) const
{
    for (auto const& e : entries(section))
    {
        if (e.key == key)
            return e;
    }
    throw ConfigError(ErrorKind::unknown_key, "<config>", 0, 0,
                      "no key '" + std::string(key) + "' in section [" + std::string(section) + "]");
}

double ConfigDocument::number(std::string_view section, std::string_view key) const
{
    auto const& e = find(section, key);
    if (auto const* d = std::get_if<double>(&e.value))
        return *d;
    throw ConfigError(ErrorKind::non_numeric, "<config>", e.line, 0, "'" + std::string(key) + "' is not numeric");
}

std::string const& ConfigDocument::text(std::string_view section, std::string_view key) const
{
    auto const& e = find(section, key);
    if (auto const* s = std::get_if<std::string>(&e.value))
        return *s;
    throw ConfigError(ErrorKind::invalid_value, "<config>", e.line, 0, "'" + std::string(key) + "' is not text");
}

bool ConfigDocument::explicitly_set(std::string_view section, std::string_view key) const
{
    for (auto const& e : entries(section))
    {
        if (e.key == key)
            return e.line > 0;
    }
    return false;
}

std::vector<std::pair<std::string, double>> ConfigDocument::detection_stages() const
{
    std::vector<std::pair<std::string, double>> out;
    for (auto const& e : entries("detection"))
    {
        if (is_stage_key("detection", e.key))
            out.emplace_back(e.key.substr(kStagePrefix.size()), std::get<double>(e.value));
    }
    return out;
}

bool operator==(ConfigDocument const& a, ConfigDocument const& b)
{
    for (auto const& name : kSections)
    {
        auto const& ea = a.entries(name);
        auto const& eb = b.entries(name);
        if (ea.size() != eb.size())
            return false;
        for (auto const& x : ea)
        {
            auto const it = std::find_if(eb.begin(), eb.end(), [&](Entry const& y) { return y.key == x.key; });
            if (it == eb.end() || it->value != x.value)
                return false;
        }
    }
    return true;
}

ConfigDocument default_config()
{
    ConfigDocument doc;
    fill_defaults(doc);
    return doc;
}

ConfigDocument parse_config_text(std::string_view text, std::string const& source)
{
    ConfigDocument doc;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        auto const nl = text.find('\n', pos);
        std::string_view const line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string_view body = line;
        // inline comment: '#' or ';' at line start or preceded by whitespace
        for (std::size_t i = 0; i < body.size(); ++i)
        {
            if ((body[i] == '#' || body[i] == ';') && (i == 0 || body[i - 1] == ' ' || body[i - 1] == '\t'))
            {
                body = body.substr(0, i);
                break;
            }
        }
        body = trim(body);
        if (body.empty())
            continue;

        if (body.front() == '[')
        {
            if (body.back() != ']')
                throw ConfigError(ErrorKind::syntax, source, line_no, column_of(line, body), "unterminated section header");
            std::string_view const name = trim(body.substr(1, body.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
                throw ConfigError(ErrorKind::unknown_section, source, line_no, column_of(line, name),
                                  "[" + std::string(name) + "]");
            section = std::string(name);
            continue;
        }

        auto const eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(ErrorKind::syntax, source, line_no, column_of(line, body), "expected 'key = value'");
        if (section.empty())
            throw ConfigError(ErrorKind::syntax, source, line_no, column_of(line, body), "key outside of any section");
        std::string_view const key = trim(body.substr(0, eq));
        std::string_view const raw = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError(ErrorKind::syntax, source, line_no, column_of(line, body), "missing key name");

        KeySpec const* spec = find_spec(section, key);
        if (!spec && is_stage_key(section, key))
            spec = &stage_spec();
        if (!spec)
            throw ConfigError(ErrorKind::unknown_key, source, line_no, column_of(line, key),
                              "'" + std::string(key) + "' in section [" + section + "]");
        auto const& existing = doc.entries(section);
        if (std::any_of(existing.begin(), existing.end(), [&](Entry const& e) { return e.key == key; }))
            throw ConfigError(ErrorKind::duplicate_key, source, line_no, column_of(line, key), "'" + std::string(key) + "'");
        if (raw.empty())
            throw ConfigError(ErrorKind::syntax, source, line_no, column_of(line, body) + static_cast<int>(eq) + 1,
                              "missing value for '" + std::string(key) + "'");

        doc.set(section, Entry{std::string(key), convert(*spec, raw, source, line_no, column_of(line, raw), key), line_no});
    }
    fill_defaults(doc);
    return doc;
}

ConfigDocument parse_config(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(ErrorKind::missing_file, path.string(), 0, 0, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

std::string serialize(ConfigDocument const& doc)
{
    std::ostringstream out;
    bool first = true;
    for (auto const& name : kSections)
    {
        out << (first ? "" : "\n") << '[' << name << "]\n";
        first = false;
        for (auto const& e : doc.entries(name))
        {
            out << e.key << " = ";
            if (auto const* d = std::get_if<double>(&e.value))
                out << format_double(*d);
            else
                out << std::get<std::string>(e.value);
            out << '\n';
        }
    }
    return out.str();
}

} // namespace rexsim::config

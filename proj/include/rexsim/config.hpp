#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rexsim/errors.hpp"

namespace rexsim::config {

enum class ErrorKind
{
    missing_file,
    syntax,
    unknown_section,
    unknown_key,
    duplicate_key,
    unit_mismatch,
    non_numeric,
    invalid_value,
};

std::string_view to_string(ErrorKind kind);

/// Config problem located at a 1-based line/column (0 when not applicable).
class ConfigError : public ValidationError
{
  public:
    ConfigError(ErrorKind kind, std::string const& source, int line, int column, std::string const& detail);

    ErrorKind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    ErrorKind kind_;
    int line_;
    int column_;
};

enum class ValueKind
{
    number,
    integer,
    text,
};

enum class Constraint
{
    any,
    positive,       // > 0
    non_negative,   // >= 0
    probability,    // [0, 1]
    efficiency,     // (0, 1]
    above_one,      // > 1
};

/// One row of the fixed key table. The unit is the suffix token a value may carry.
struct KeySpec
{
    std::string_view section;
    std::string_view key;
    std::string_view unit;
    ValueKind kind;
    Constraint constraint;
    std::string_view default_value;
    std::string_view description;
};

/// The complete, stable key table.
std::span<KeySpec const> key_table();

/// Detection stages are the only open-ended keys: `stage_<name>` in [detection].
inline constexpr std::string_view kStagePrefix = "stage_";

using Value = std::variant<double, std::string>;

struct Entry
{
    std::string key;
    Value value;
    int line = 0; // 0 for defaults
};

/*!
 * Parsed configuration: ordered sections of key/value entries, validated
 * against key_table() with defaults filled in for absent keys.
 */
class ConfigDocument
{
  public:
    static std::vector<std::string> const& section_names();

    double number(std::string_view section, std::string_view key) const;
    std::string const& text(std::string_view section, std::string_view key) const;
    bool explicitly_set(std::string_view section, std::string_view key) const;

    /// [detection] stage_* entries in file order (defaults when none given).
    std::vector<std::pair<std::string, double>> detection_stages() const;

    std::vector<Entry> const& entries(std::string_view section) const;

    void set(std::string const& section, Entry entry);

    friend bool operator==(ConfigDocument const& a, ConfigDocument const& b);

  private:
    Entry const& find(std::string_view section, std::string_view key) const;

    std::map<std::string, std::vector<Entry>, std::less<>> sections_;
};

/// Defaults only (the reference device and material).
ConfigDocument default_config();

ConfigDocument parse_config_text(std::string_view text, std::string const& source_name = "<config>");

/// Throws ConfigError{missing_file} when the file cannot be read.
ConfigDocument parse_config(std::filesystem::path const& path);

/// INI text that parses back to an equal document.
std::string serialize(ConfigDocument const& doc);

} // namespace rexsim::config

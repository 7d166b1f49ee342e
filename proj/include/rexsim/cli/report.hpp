#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rexsim::cli {

/// Acceptance band around a reference value.
struct Tolerance
{
    enum class Kind
    {
        relative, // |value/reference - 1| <= v
        absolute, // |value - reference| <= v, in the row's unit
        factor,   // reference/v <= value <= reference*v
    };
    double value = 0.0;
    Kind kind = Kind::relative;

    static Tolerance rel(double v) { return {v, Kind::relative}; }
    static Tolerance abs(double v) { return {v, Kind::absolute}; }
    static Tolerance factor(double v) { return {v, Kind::factor}; }
};

struct ReportRow
{
    std::string quantity;
    double value = 0.0;
    std::string unit;
    std::optional<double> reference;
    std::optional<Tolerance> tolerance;

    /// (value - reference) / reference; empty without a reference.
    std::optional<double> deviation() const;
    /// Empty unless both a reference and a tolerance are present.
    std::optional<bool> within_tolerance() const;
};

struct RunReport
{
    std::string title;
    std::vector<ReportRow> rows;
    std::vector<std::string> notes;

    ReportRow& add(std::string quantity, double value, std::string unit);
    ReportRow& add(std::string quantity, double value, std::string unit, double reference, Tolerance tolerance);

    /// True when no row with a tolerance falls outside it.
    bool all_within() const;
    std::size_t checked_rows() const;

    /// Aligned text table; values with 5 significant digits.
    void print(std::ostream& os) const;
};

} // namespace rexsim::cli

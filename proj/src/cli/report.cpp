#include "rexsim/cli/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace rexsim::cli {

namespace {

std::string fmt(double v, char const* spec = "%.5g")
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string tolerance_text(Tolerance const& t)
{
    switch (t.kind)
    {
    case Tolerance::Kind::relative:
        return "+-" + fmt(100.0 * t.value, "%.3g") + "%";
    case Tolerance::Kind::absolute:
        return "+-" + fmt(t.value, "%.3g");
    case Tolerance::Kind::factor:
        return "x/" + fmt(t.value, "%.3g");
    }
    return "";
}

} // namespace

std::optional<double> ReportRow::deviation() const
{
    if (!reference || *reference == 0.0)
        return std::nullopt;
    return (value - *reference) / *reference;
}

std::optional<bool> ReportRow::within_tolerance() const
{
    if (!reference || !tolerance)
        return std::nullopt;
    switch (tolerance->kind)
    {
    case Tolerance::Kind::relative:
        if (auto const dev = deviation())
            return std::abs(*dev) <= tolerance->value;
        return value == *reference;
    case Tolerance::Kind::absolute:
        return std::abs(value - *reference) <= tolerance->value;
    case Tolerance::Kind::factor:
        return value >= *reference / tolerance->value && value <= *reference * tolerance->value;
    }
    return false;
}

ReportRow& RunReport::add(std::string quantity, double value, std::string unit)
{
    rows.push_back({std::move(quantity), value, std::move(unit), std::nullopt, std::nullopt});
    return rows.back();
}

ReportRow& RunReport::add(std::string quantity, double value, std::string unit, double reference,
                          Tolerance tolerance)
{
    rows.push_back({std::move(quantity), value, std::move(unit), reference, tolerance});
    return rows.back();
}

bool RunReport::all_within() const
{
    return std::all_of(rows.begin(), rows.end(), [](ReportRow const& r) {
        auto const ok = r.within_tolerance();
        return !ok || *ok;
    });
}

std::size_t RunReport::checked_rows() const
{
    return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](ReportRow const& r) {
        return r.within_tolerance().has_value();
    }));
}

void RunReport::print(std::ostream& os) const
{
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"quantity", "value", "unit", "reference", "deviation", "tolerance", "status"});
    for (auto const& r : rows)
    {
        auto const dev = r.deviation();
        auto const ok = r.within_tolerance();
        cells.push_back({r.quantity, fmt(r.value), r.unit, r.reference ? fmt(*r.reference) : "",
                         dev ? fmt(100.0 * *dev, "%+.2f%%") : "", r.tolerance ? tolerance_text(*r.tolerance) : "",
                         ok ? (*ok ? "ok" : "FAIL") : ""});
    }
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (auto const& row : cells)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    }

    if (!title.empty())
        os << title << '\n';
    for (std::size_t r = 0; r < cells.size(); ++r)
    {
        std::string line;
        for (std::size_t i = 0; i < cells[r].size(); ++i)
        {
            auto const& c = cells[r][i];
            bool const numeric = i == 1 || i == 3 || i == 4;
            std::string const pad(width[i] - c.size(), ' ');
            line += (i ? "  " : "") + (numeric ? pad + c : c + pad);
        }
        line.erase(line.find_last_not_of(' ') + 1);
        os << line << '\n';
        if (r == 0)
        {
            std::size_t total = 0;
            for (auto w : width)
                total += w + 2;
            os << std::string(total - 2, '-') << '\n';
        }
    }
    for (auto const& n : notes)
        os << "note: " << n << '\n';
}

} // namespace rexsim::cli

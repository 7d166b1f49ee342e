#include "rexsim/csv.hpp"

#include <chrono>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>

#include "rexsim/errors.hpp"
#include "rexsim/numeric_format.hpp"

namespace rexsim {

namespace {

std::string utc_timestamp()
{
    auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_header(std::ostream& os, CsvHeader const& h,
                  std::vector<std::pair<std::string, std::string>> const& extra_meta)
{
    os << "# tool: " << kToolVersion << '\n';
    os << "# subcommand: " << h.subcommand << '\n';
    if (h.timestamp)
        os << "# generated: " << utc_timestamp() << '\n';
    if (h.seed)
        os << "# seed: " << *h.seed << '\n';
    for (auto const& [k, v] : h.parameters)
        os << "# param." << k << ": " << v << '\n';
    for (auto const& [k, v] : extra_meta)
        os << "# " << k << ": " << v << '\n';
}

std::string header_cell(Column const& c)
{
    return c.unit.empty() ? c.name : c.name + "[" + c.unit + "]";
}

std::vector<std::string> split(std::string const& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep))
        out.push_back(cell);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    auto const b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    auto const e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

Column column_from_header(std::string const& cell)
{
    Column c;
    auto const open = cell.find('[');
    if (open != std::string::npos && cell.back() == ']')
    {
        c.name = cell.substr(0, open);
        c.unit = cell.substr(open + 1, cell.size() - open - 2);
    }
    else
    {
        c.name = cell;
    }
    return c;
}

} // namespace

void write_trace_csv(std::ostream& os, TimeTrace const& trace, CsvHeader const& header)
{
    trace.validate();
    write_header(os, header, trace.metadata);
    os << header_cell(trace.x) << ',' << header_cell(trace.y);
    for (auto const& c : trace.extra)
        os << ',' << header_cell(c);
    os << '\n';
    for (std::size_t i = 0; i < trace.size(); ++i)
    {
        os << format_double(trace.x.values[i]) << ',' << format_double(trace.y.values[i]);
        for (auto const& c : trace.extra)
            os << ',' << format_double(c.values[i]);
        os << '\n';
    }
}

void write_table_csv(std::ostream& os, std::vector<std::string> const& columns,
                     std::vector<std::vector<std::string>> const& rows, CsvHeader const& header)
{
    write_header(os, header, {});
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << columns[i];
    os << '\n';
    for (auto const& row : rows)
    {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << row[i];
        os << '\n';
    }
}

TimeTrace read_trace_csv(std::istream& is)
{
    TimeTrace trace;
    std::vector<Column> columns;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(is, line))
    {
        ++line_no;
        if (trim(line).empty())
            continue;
        if (line[0] == '#')
        {
            auto const colon = line.find(':');
            if (colon != std::string::npos)
                trace.metadata.emplace_back(trim(line.substr(1, colon - 1)), trim(line.substr(colon + 1)));
            continue;
        }
        auto const cells = split(line, ',');
        if (!header_seen)
        {
            header_seen = true;
            if (cells.size() < 2)
                throw ValidationError("CSV line " + std::to_string(line_no) + ": need at least two columns");
            for (auto const& c : cells)
                columns.push_back(column_from_header(trim(c)));
            continue;
        }
        if (cells.size() != columns.size())
            throw ValidationError("CSV line " + std::to_string(line_no) + ": expected "
                                  + std::to_string(columns.size()) + " cells");
        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            auto const v = parse_double(trim(cells[i]));
            if (!v)
                throw ValidationError("CSV line " + std::to_string(line_no) + ", column "
                                      + std::to_string(i + 1) + ": not a number");
            columns[i].values.push_back(*v);
        }
    }
    if (!header_seen)
        throw ValidationError("CSV input has no header row");
    trace.x = std::move(columns[0]);
    trace.y = std::move(columns[1]);
    for (std::size_t i = 2; i < columns.size(); ++i)
        trace.extra.push_back(std::move(columns[i]));
    trace.validate();
    return trace;
}

std::string csv_payload(std::string const& text)
{
    std::istringstream is(text);
    std::ostringstream out;
    std::string line;
    while (std::getline(is, line))
    {
        if (!line.empty() && line[0] == '#')
            continue;
        out << line << '\n';
    }
    return out.str();
}

} // namespace rexsim

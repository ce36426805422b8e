#include "pansr/core/csv.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace pansr::csv {

namespace {
    std::string_view trim(std::string_view s)
    {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
            s.remove_prefix(1);
        }
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
            s.remove_suffix(1);
        }
        return s;
    }
} // namespace

std::vector<std::string> split_record(std::string_view line)
{
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char const c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.emplace_back(was_quoted ? current : std::string(trim(current)));
            current.clear();
            was_quoted = false;
        } else {
            current += c;
        }
    }
    if (quoted) {
        throw std::runtime_error("csv: unterminated quoted field");
    }
    fields.emplace_back(was_quoted ? current : std::string(trim(current)));
    return fields;
}

Table read(std::filesystem::path const& path, bool has_header)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("csv: cannot open " + path.string());
    }
    Table table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        auto fields = split_record(line);
        if (first && has_header) {
            table.header = std::move(fields);
        } else {
            table.rows.push_back(std::move(fields));
        }
        first = false;
    }
    return table;
}

std::string quote_if_needed(std::string_view field)
{
    if (field.find_first_of(",\"\n") == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

double parse_double(std::string_view text)
{
    text = trim(text);
    double value = 0;
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    if (!text.empty() && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw std::invalid_argument("csv: not a number: '" + std::string(text) + "'");
    }
    return value;
}

} // namespace pansr::csv

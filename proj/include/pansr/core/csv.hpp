#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace pansr::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// Splits one CSV record. Double-quoted fields may contain commas; "" escapes a quote.
std::vector<std::string> split_record(std::string_view line);

Table read(std::filesystem::path const& path, bool has_header = true);

std::string quote_if_needed(std::string_view field);

double parse_double(std::string_view text);

} // namespace pansr::csv

#include "pansr/expr/equation.hpp"

#include "pansr/core/csv.hpp"
#include "pansr/expr/parser.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace pansr::expr {

std::vector<std::string> default_variable_names(std::size_t count)
{
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t j = 0; j < count; ++j) {
        names.push_back("x" + std::to_string(j + 1));
    }
    return names;
}

void EquationSpec::validate() const
{
    if (bounds.empty()) {
        throw std::invalid_argument("equation '" + name + "': no variables declared");
    }
    if (variable_names.size() != bounds.size()) {
        throw std::invalid_argument("equation '" + name + "': names and bounds disagree in length");
    }
    for (std::size_t j = 0; j < bounds.size(); ++j) {
        auto const& b = bounds[j];
        if (!std::isfinite(b.lower) || !std::isfinite(b.upper) || !(b.lower < b.upper)) {
            throw std::invalid_argument("equation '" + name + "': bounds of " + variable_names[j] + " must satisfy a < b");
        }
    }
    (void)parse();
}

Expression EquationSpec::parse() const
{
    auto e = parse_expression(expression, variable_names);
    if (e.arity() > p0()) {
        throw std::invalid_argument("equation '" + name + "': expression refers to more than p0 variables");
    }
    return e;
}

std::vector<EquationSpec> read_equations_csv(std::filesystem::path const& path)
{
    auto const table = csv::read(path, true);
    std::vector<EquationSpec> out;
    for (auto const& row : table.rows) {
        if (row.size() < 3) {
            throw std::invalid_argument("equation csv: row needs at least name, expression, p0");
        }
        EquationSpec eq;
        eq.name = row[0];
        eq.expression = row[1];
        auto const p0_value = csv::parse_double(row[2]);
        if (p0_value < 1 || p0_value != std::floor(p0_value)) {
            throw std::invalid_argument("equation csv: invalid p0 for '" + eq.name + "'");
        }
        auto const p0 = static_cast<std::size_t>(p0_value);
        if (row.size() != 3 + 2 * p0 && row.size() != 3 + 3 * p0) {
            throw std::invalid_argument("equation csv: '" + eq.name + "' has " + std::to_string(row.size()) + " fields, expected " + std::to_string(3 + 2 * p0) + " or " + std::to_string(3 + 3 * p0));
        }
        for (std::size_t j = 0; j < p0; ++j) {
            eq.bounds.push_back({ csv::parse_double(row[3 + 2 * j]), csv::parse_double(row[4 + 2 * j]) });
        }
        if (row.size() == 3 + 3 * p0) {
            eq.variable_names.assign(row.begin() + static_cast<std::ptrdiff_t>(3 + 2 * p0), row.end());
        } else {
            eq.variable_names = default_variable_names(p0);
        }
        eq.validate();
        out.push_back(std::move(eq));
    }
    return out;
}

void write_equations_csv(std::filesystem::path const& path, std::vector<EquationSpec> const& equations)
{
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << std::setprecision(17);
    out << "name,expression,p0";
    std::size_t max_p0 = 0;
    for (auto const& eq : equations) {
        max_p0 = std::max(max_p0, eq.p0());
    }
    for (std::size_t j = 1; j <= max_p0; ++j) {
        out << ",a_" << j << ",b_" << j;
    }
    out << '\n';
    for (auto const& eq : equations) {
        out << csv::quote_if_needed(eq.name) << ',' << csv::quote_if_needed(eq.expression) << ',' << eq.p0();
        for (auto const& b : eq.bounds) {
            out << ',' << b.lower << ',' << b.upper;
        }
        for (auto const& n : eq.variable_names) {
            out << ',' << csv::quote_if_needed(n);
        }
        out << '\n';
    }
}

} // namespace pansr::expr

#pragma once

#include "pansr/expr/expression.hpp"

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace pansr::expr {

struct Bounds {
    double lower = 0.0;
    double upper = 1.0;
};

/// A ground-truth equation with the sampling box of each relevant variable.
struct EquationSpec {
    std::string name;
    std::string expression;
    std::vector<std::string> variable_names;
    std::vector<Bounds> bounds;

    [[nodiscard]] std::size_t p0() const noexcept { return bounds.size(); }

    // Throws std::invalid_argument if bounds are inverted or the expression
    // does not parse over the declared names.
    void validate() const;

    [[nodiscard]] Expression parse() const;
};

std::vector<std::string> default_variable_names(std::size_t count);

/// Equation CSV: `name,expression,p0,a_1,b_1,...,a_p0,b_p0`, optionally
/// followed by p0 variable names (default x1..xp0). A header row is expected.
std::vector<EquationSpec> read_equations_csv(std::filesystem::path const& path);
void write_equations_csv(std::filesystem::path const& path, std::vector<EquationSpec> const& equations);

} // namespace pansr::expr

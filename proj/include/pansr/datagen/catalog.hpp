#pragma once

#include "pansr/expr/equation.hpp"

#include <string_view>
#include <vector>

namespace pansr::datagen {

/// Built-in ground truths: the Friedman function, a handful of Feynman-style
/// physics formulas and small polynomials.
std::vector<expr::EquationSpec> const& builtin_equations();

// Throws std::out_of_range for an unknown name.
expr::EquationSpec const& builtin_equation(std::string_view name);

} // namespace pansr::datagen

#pragma once

#include "pansr/expr/expression.hpp"

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace pansr::expr {

// Assumptions made by rewrites that are only valid where the input is defined
// (e.g. x/x -> 1 assumes x != 0).
struct SimplifyNotes {
    std::vector<std::string> guards;
};

/// Bounded rewriting to a fixpoint: constant folding, additive and
/// multiplicative identities, x-x, x/x, pow(x,1), pow(x,0), double negation,
/// and merging of constants inside +/- and */÷ chains. Never increases the
/// node count; agrees with the input wherever the input is defined.
Expression simplify(Expression const& e, SimplifyNotes* notes = nullptr);

/// Operators + variable occurrences + constant occurrences of simplify(e).
std::size_t complexity(Expression const& e);

/// Zero-based indices of the variables that survive simplification.
std::set<std::size_t> variables_used(Expression const& e);

/// Rewrites variable j as variable `mapping[j]` named `names[mapping[j]]`.
/// `names` may be empty, in which case the default xK naming is used.
Expression remap_variables(Expression const& e, std::span<std::size_t const> mapping, std::span<std::string const> names = {});

} // namespace pansr::expr

#pragma once

#include "pansr/expr/equation.hpp"
#include "pansr/expr/expression.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string_view>

namespace pansr::metrics {

/// 1 - SSE/SST. Throws std::invalid_argument on a length mismatch, fewer than
/// two points, or a constant y.
double r_squared(Eigen::Ref<Eigen::VectorXd const> const& y, Eigen::Ref<Eigen::VectorXd const> const& yhat);

enum class SolutionMode { None, Difference, Ratio };

std::string_view name_of(SolutionMode mode) noexcept;

struct SolutionVerdict {
    bool is_solution = false;
    SolutionMode mode = SolutionMode::None;
    double constant = 0.0; // a in difference mode, b in ratio mode
    double residual = 0.0; // relative range of the tested difference or ratio
    bool non_constant_model = false;
};

struct SolutionOptions {
    double tol = 1e-6;
    std::size_t samples = 1000;
    std::uint64_t seed = 0x5EEDULL;
};

/// Decides whether fhat equals f0 up to an additive constant or a nonzero
/// multiplicative constant on the box `bounds`, using seeded uniform samples.
/// A difference that simplifies to a literal short-circuits to difference
/// mode. Throws std::invalid_argument when fhat or f0 reads a variable
/// outside `bounds`, and std::domain_error when no sample is defined for both.
SolutionVerdict is_solution(expr::Expression const& fhat, expr::Expression const& f0,
    std::span<expr::Bounds const> bounds, SolutionOptions const& options = {});

struct UsageReport {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;
    double tpr = 0.0;
    double fpr = 0.0;
    double fnr = 0.0;
};

/// Scores a set of zero-based feature indices against the oracle set S0.
/// Throws std::out_of_range for indices >= p.
UsageReport usage_of_set(std::set<std::size_t> const& used, std::set<std::size_t> const& s0, std::size_t p);

/// usage_of_set(variables_used(fhat), S0, p).
UsageReport feature_usage(expr::Expression const& fhat, std::set<std::size_t> const& s0, std::size_t p);

nlohmann::json to_json(SolutionVerdict const& v);
nlohmann::json to_json(UsageReport const& u);

} // namespace pansr::metrics

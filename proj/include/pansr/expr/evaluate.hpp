#pragma once

#include "pansr/expr/expression.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>

namespace pansr::expr {

/// Scalar operator semantics. Undefined results (domain violations, division
/// by zero, non-finite values) are reported as NaN.
double apply(UnaryOp op, double x) noexcept;
double apply(BinaryOp op, double a, double b) noexcept;

/// Evaluates `e` at one point. Returns nullopt where the expression is
/// undefined. Requires row.size() >= e.arity().
std::optional<double> evaluate(Expression const& e, std::span<double const> row);

/// Column-wise evaluation over every row of `X` (rows are samples).
/// Undefined entries are NaN.
Eigen::ArrayXd evaluate_rows(Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X);

/// Result of the closure-preserving evaluation used during evolutionary search.
struct ProtectedEvaluation {
    Eigen::ArrayXd values;
    // True when no protection rule fired, i.e. the values equal the strict
    // evaluation on every row.
    bool strictly_defined = true;
};

/// Protected semantics: |b| <= 1e-3 divides to 1, log uses |x| and returns 0
/// near zero, sqrt uses |x|. Non-finite values remain NaN.
ProtectedEvaluation evaluate_rows_protected(Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X);

} // namespace pansr::expr

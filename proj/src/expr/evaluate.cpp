#include "pansr/expr/evaluate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pansr::expr {

namespace {
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
    constexpr double kProtectEps = 1e-3;

    double finite_or_nan(double v) noexcept { return std::isfinite(v) ? v : kNaN; }

    double integer_power(double base, double exponent) noexcept
    {
        bool const negative = exponent < 0;
        auto n = static_cast<std::uint64_t>(std::abs(exponent));
        double result = 1.0;
        double b = base;
        while (n != 0) {
            if ((n & 1U) != 0) {
                result *= b;
            }
            n >>= 1U;
            if (n != 0) {
                b *= b;
            }
        }
        if (negative) {
            if (result == 0.0) {
                return kNaN;
            }
            result = 1.0 / result;
        }
        return finite_or_nan(result);
    }

    double power(double base, double exponent) noexcept
    {
        if (std::isnan(base) || std::isnan(exponent)) {
            return kNaN;
        }
        if (exponent == std::trunc(exponent) && std::abs(exponent) < 9.0e15) {
            return integer_power(base, exponent);
        }
        if (base < 0.0) {
            return kNaN;
        }
        if (base == 0.0 && exponent < 0.0) {
            return kNaN;
        }
        return finite_or_nan(std::pow(base, exponent));
    }

    struct Strict {
        static double unary(UnaryOp op, double x, bool& /*strict*/) noexcept { return apply(op, x); }
        static double binary(BinaryOp op, double a, double b, bool& /*strict*/) noexcept { return apply(op, a, b); }
    };

    struct Protected {
        static double unary(UnaryOp op, double x, bool& strict) noexcept
        {
            if (std::isnan(x)) {
                return kNaN;
            }
            switch (op) {
            case UnaryOp::Log:
                if (x <= kProtectEps) {
                    strict = false;
                }
                return std::abs(x) > kProtectEps ? std::log(std::abs(x)) : 0.0;
            case UnaryOp::Sqrt:
                if (x < 0.0) {
                    strict = false;
                }
                return std::sqrt(std::abs(x));
            default: {
                auto const v = apply(op, x);
                if (std::isnan(v)) {
                    strict = false;
                }
                return v;
            }
            }
        }

        static double binary(BinaryOp op, double a, double b, bool& strict) noexcept
        {
            if (std::isnan(a) || std::isnan(b)) {
                return kNaN;
            }
            if (op == BinaryOp::Div) {
                if (std::abs(b) <= kProtectEps) {
                    strict = false;
                    return 1.0;
                }
            }
            auto const v = apply(op, a, b);
            if (std::isnan(v)) {
                strict = false;
            }
            return v;
        }
    };

    double evaluate_scalar(Expression const& e, std::span<double const> row)
    {
        switch (e.kind()) {
        case NodeKind::Constant:
            return e.value();
        case NodeKind::Variable:
            return finite_or_nan(row[e.index()]);
        case NodeKind::Unary:
            return apply(e.unary_op(), evaluate_scalar(e.child(), row));
        case NodeKind::Binary:
            return apply(e.binary_op(), evaluate_scalar(e.lhs(), row), evaluate_scalar(e.rhs(), row));
        }
        return kNaN;
    }

    template <typename Semantics>
    Eigen::ArrayXd evaluate_columns(Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X, bool& strict)
    {
        auto const n = X.rows();
        switch (e.kind()) {
        case NodeKind::Constant:
            return Eigen::ArrayXd::Constant(n, e.value());
        case NodeKind::Variable:
            return X.col(static_cast<Eigen::Index>(e.index())).array().unaryExpr([](double v) { return finite_or_nan(v); });
        case NodeKind::Unary: {
            auto v = evaluate_columns<Semantics>(e.child(), X, strict);
            auto const op = e.unary_op();
            for (Eigen::Index i = 0; i < n; ++i) {
                v[i] = Semantics::unary(op, v[i], strict);
            }
            return v;
        }
        case NodeKind::Binary: {
            auto a = evaluate_columns<Semantics>(e.lhs(), X, strict);
            auto const b = evaluate_columns<Semantics>(e.rhs(), X, strict);
            auto const op = e.binary_op();
            for (Eigen::Index i = 0; i < n; ++i) {
                a[i] = Semantics::binary(op, a[i], b[i], strict);
            }
            return a;
        }
        }
        return Eigen::ArrayXd::Constant(n, kNaN);
    }
} // namespace

double apply(UnaryOp op, double x) noexcept
{
    if (std::isnan(x)) {
        return kNaN;
    }
    double v = kNaN;
    switch (op) {
    case UnaryOp::Neg: v = -x; break;
    case UnaryOp::Exp: v = std::exp(x); break;
    case UnaryOp::Log: v = x > 0.0 ? std::log(x) : kNaN; break;
    case UnaryOp::Sqrt: v = x >= 0.0 ? std::sqrt(x) : kNaN; break;
    case UnaryOp::Sin: v = std::sin(x); break;
    case UnaryOp::Cos: v = std::cos(x); break;
    case UnaryOp::Tan: v = std::tan(x); break;
    case UnaryOp::Asin: v = (x >= -1.0 && x <= 1.0) ? std::asin(x) : kNaN; break;
    case UnaryOp::Acos: v = (x >= -1.0 && x <= 1.0) ? std::acos(x) : kNaN; break;
    case UnaryOp::Atan: v = std::atan(x); break;
    case UnaryOp::Tanh: v = std::tanh(x); break;
    case UnaryOp::Abs: v = std::abs(x); break;
    case UnaryOp::Square: v = x * x; break;
    }
    return finite_or_nan(v);
}

double apply(BinaryOp op, double a, double b) noexcept
{
    if (std::isnan(a) || std::isnan(b)) {
        return kNaN;
    }
    switch (op) {
    case BinaryOp::Add: return finite_or_nan(a + b);
    case BinaryOp::Sub: return finite_or_nan(a - b);
    case BinaryOp::Mul: return finite_or_nan(a * b);
    case BinaryOp::Div: return b == 0.0 ? kNaN : finite_or_nan(a / b);
    case BinaryOp::Pow: return power(a, b);
    }
    return kNaN;
}

std::optional<double> evaluate(Expression const& e, std::span<double const> row)
{
    if (row.size() < e.arity()) {
        throw std::invalid_argument("evaluate: row has " + std::to_string(row.size()) + " entries, expression needs " + std::to_string(e.arity()));
    }
    auto const v = evaluate_scalar(e, row);
    if (std::isnan(v)) {
        return std::nullopt;
    }
    return v;
}

Eigen::ArrayXd evaluate_rows(Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X)
{
    if (static_cast<std::size_t>(X.cols()) < e.arity()) {
        throw std::invalid_argument("evaluate_rows: matrix has too few columns for expression");
    }
    bool unused = true;
    return evaluate_columns<Strict>(e, X, unused);
}

ProtectedEvaluation evaluate_rows_protected(Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X)
{
    if (static_cast<std::size_t>(X.cols()) < e.arity()) {
        throw std::invalid_argument("evaluate_rows_protected: matrix has too few columns for expression");
    }
    ProtectedEvaluation out;
    out.values = evaluate_columns<Protected>(e, X, out.strictly_defined);
    if (!out.values.isFinite().all()) {
        out.strictly_defined = false;
    }
    return out;
}

} // namespace pansr::expr

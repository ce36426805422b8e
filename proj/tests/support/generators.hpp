#pragma once

// Random inputs for property-style tests. Independent of the GP initializer.

#include "pansr/core/random.hpp"
#include "pansr/expr/expression.hpp"

#include <array>
#include <cstddef>
#include <random>

namespace pansr::testing {

inline expr::Expression random_expression(Rng& rng, std::size_t num_vars, int depth)
{
    using expr::BinaryOp;
    using expr::Expression;
    using expr::UnaryOp;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (depth <= 1 || unit(rng) < 0.2) {
        if (unit(rng) < 0.6) {
            auto j = std::uniform_int_distribution<std::size_t>(0, num_vars - 1)(rng);
            return Expression::variable(j, "x" + std::to_string(j + 1));
        }
        // Mix small integers (hit identities) with arbitrary reals, both signs.
        double c = unit(rng) < 0.5 ? static_cast<double>(std::uniform_int_distribution<int>(-2, 3)(rng))
                                   : std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
        return Expression::constant(c);
    }
    constexpr std::array unary { UnaryOp::Neg, UnaryOp::Exp, UnaryOp::Log, UnaryOp::Sqrt, UnaryOp::Sin, UnaryOp::Cos,
        UnaryOp::Tan, UnaryOp::Asin, UnaryOp::Acos, UnaryOp::Atan, UnaryOp::Tanh, UnaryOp::Abs, UnaryOp::Square };
    constexpr std::array binary { BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow };
    if (unit(rng) < 0.3) {
        auto op = unary[std::uniform_int_distribution<std::size_t>(0, unary.size() - 1)(rng)];
        return Expression::unary(op, random_expression(rng, num_vars, depth - 1));
    }
    auto op = binary[std::uniform_int_distribution<std::size_t>(0, binary.size() - 1)(rng)];
    auto lhs = random_expression(rng, num_vars, depth - 1);
    auto rhs = random_expression(rng, num_vars, depth - 1);
    return Expression::binary(op, std::move(lhs), std::move(rhs));
}

} // namespace pansr::testing

#pragma once

#include "pansr/expr/expression.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pansr::expr {

class ParseError : public std::runtime_error {
public:
    enum class Kind { Syntax, UnknownIdentifier, Arity };

    ParseError(Kind kind, std::size_t position, std::string const& message);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    // Zero-based character offset into the input.
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    Kind kind_;
    std::size_t position_;
};

/// Parses infix text over `variable_names`. Precedence, tightest first:
/// `**` (right associative, `^` accepted), unary minus, `* /`, `+ -`.
/// A minus sign directly before a numeric literal that is not itself a
/// `**` base yields a negative constant, which keeps printing invertible.
Expression parse_expression(std::string_view text, std::span<std::string const> variable_names);

} // namespace pansr::expr

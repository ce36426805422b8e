#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace pansr::expr {

enum class NodeKind { Constant, Variable, Unary, Binary };

enum class UnaryOp { Neg, Exp, Log, Sqrt, Sin, Cos, Tan, Asin, Acos, Atan, Tanh, Abs, Square };

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

std::string_view name_of(UnaryOp op) noexcept;
std::string_view symbol_of(BinaryOp op) noexcept;

// Function-call spelling (including a few aliases such as "ln" and "arcsin").
// Neg has no function spelling.
std::optional<UnaryOp> unary_from_name(std::string_view name) noexcept;

/// Immutable expression tree with shared structure.
///
/// Copies are cheap (one shared_ptr), nodes are never mutated after
/// construction, so expressions can be shared freely between threads.
class Expression {
public:
    static Expression constant(double value);
    static Expression variable(std::size_t index, std::string name);
    static Expression unary(UnaryOp op, Expression child);
    static Expression binary(BinaryOp op, Expression lhs, Expression rhs);

    [[nodiscard]] NodeKind kind() const noexcept;
    [[nodiscard]] bool is_constant() const noexcept { return kind() == NodeKind::Constant; }
    [[nodiscard]] bool is_variable() const noexcept { return kind() == NodeKind::Variable; }

    [[nodiscard]] double value() const;
    [[nodiscard]] std::size_t index() const;
    [[nodiscard]] std::string const& name() const;
    [[nodiscard]] UnaryOp unary_op() const;
    [[nodiscard]] BinaryOp binary_op() const;
    [[nodiscard]] Expression const& child() const;
    [[nodiscard]] Expression const& lhs() const;
    [[nodiscard]] Expression const& rhs() const;

    // Number of nodes.
    [[nodiscard]] std::size_t size() const noexcept;
    // Depth of the tree; a single leaf has depth 1.
    [[nodiscard]] std::size_t depth() const noexcept;
    // One past the largest variable index; 0 when no variables occur.
    [[nodiscard]] std::size_t arity() const noexcept;

    // Canonical infix text with `**` for pow.
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(Expression const& a, Expression const& b) noexcept;

private:
    struct Node;
    explicit Expression(std::shared_ptr<Node const> node) : node_(std::move(node)) {}
    std::shared_ptr<Node const> node_;
};

struct Expression::Node {
    NodeKind kind;
    double value = 0.0;
    std::size_t index = 0;
    std::string name;
    UnaryOp unary_op = UnaryOp::Neg;
    BinaryOp binary_op = BinaryOp::Add;
    std::optional<Expression> lhs;
    std::optional<Expression> rhs;
    std::size_t size = 1;
    std::size_t depth = 1;
    std::size_t arity = 0;
};

} // namespace pansr::expr

#include "pansr/expr/expression.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace pansr::expr {

namespace {
    constexpr std::array<std::pair<std::string_view, UnaryOp>, 16> kUnaryNames { {
        { "exp", UnaryOp::Exp },
        { "log", UnaryOp::Log },
        { "ln", UnaryOp::Log },
        { "sqrt", UnaryOp::Sqrt },
        { "sin", UnaryOp::Sin },
        { "cos", UnaryOp::Cos },
        { "tan", UnaryOp::Tan },
        { "asin", UnaryOp::Asin },
        { "arcsin", UnaryOp::Asin },
        { "acos", UnaryOp::Acos },
        { "arccos", UnaryOp::Acos },
        { "atan", UnaryOp::Atan },
        { "arctan", UnaryOp::Atan },
        { "tanh", UnaryOp::Tanh },
        { "abs", UnaryOp::Abs },
        { "square", UnaryOp::Square },
    } };

    // Printing precedence; higher binds tighter.
    enum Level : int { kSum = 1, kProduct = 2, kPrefix = 3, kPower = 4, kAtom = 5 };

    int level_of(Expression const& e)
    {
        switch (e.kind()) {
        case NodeKind::Constant:
            return std::signbit(e.value()) ? kPrefix : kAtom;
        case NodeKind::Variable:
            return kAtom;
        case NodeKind::Unary:
            return e.unary_op() == UnaryOp::Neg ? kPrefix : kAtom;
        case NodeKind::Binary:
            switch (e.binary_op()) {
            case BinaryOp::Add:
            case BinaryOp::Sub:
                return kSum;
            case BinaryOp::Mul:
            case BinaryOp::Div:
                return kProduct;
            case BinaryOp::Pow:
                return kPower;
            }
        }
        return kAtom;
    }

    void print_number(double v, std::string& out)
    {
        std::array<char, 64> buf {};
        auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
        out.append(buf.data(), ptr);
    }

    void print(Expression const& e, std::string& out);

    void print_wrapped(Expression const& e, bool wrap, std::string& out)
    {
        if (wrap) {
            out += '(';
        }
        print(e, out);
        if (wrap) {
            out += ')';
        }
    }

    void print(Expression const& e, std::string& out)
    {
        switch (e.kind()) {
        case NodeKind::Constant:
            print_number(e.value(), out);
            return;
        case NodeKind::Variable:
            out += e.name();
            return;
        case NodeKind::Unary: {
            auto const& c = e.child();
            if (e.unary_op() == UnaryOp::Neg) {
                // "-2" would read back as a negative literal, so constants are parenthesized.
                out += '-';
                print_wrapped(c, level_of(c) < kPower || c.is_constant(), out);
            } else {
                out += name_of(e.unary_op());
                print_wrapped(c, true, out);
            }
            return;
        }
        case NodeKind::Binary: {
            auto const& l = e.lhs();
            auto const& r = e.rhs();
            auto const op = e.binary_op();
            if (op == BinaryOp::Pow) {
                print_wrapped(l, level_of(l) <= kPower, out);
                out += "**";
                print_wrapped(r, level_of(r) < kPrefix, out);
                return;
            }
            int const lv = level_of(e);
            print_wrapped(l, level_of(l) < lv, out);
            if (lv == kSum) {
                out += ' ';
                out += symbol_of(op);
                out += ' ';
            } else {
                out += symbol_of(op);
            }
            print_wrapped(r, level_of(r) <= lv, out);
            return;
        }
        }
    }
} // namespace

std::string_view name_of(UnaryOp op) noexcept
{
    switch (op) {
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Log: return "log";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Tan: return "tan";
    case UnaryOp::Asin: return "asin";
    case UnaryOp::Acos: return "acos";
    case UnaryOp::Atan: return "atan";
    case UnaryOp::Tanh: return "tanh";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Square: return "square";
    }
    return "?";
}

std::string_view symbol_of(BinaryOp op) noexcept
{
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "**";
    }
    return "?";
}

std::optional<UnaryOp> unary_from_name(std::string_view name) noexcept
{
    auto it = std::find_if(kUnaryNames.begin(), kUnaryNames.end(), [&](auto const& kv) { return kv.first == name; });
    if (it == kUnaryNames.end()) {
        return std::nullopt;
    }
    return it->second;
}

Expression Expression::constant(double value)
{
    if (!std::isfinite(value)) {
        throw std::invalid_argument("expression constants must be finite");
    }
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = value;
    return Expression(std::move(n));
}

Expression Expression::variable(std::size_t index, std::string name)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->index = index;
    n->name = name.empty() ? "x" + std::to_string(index + 1) : std::move(name);
    n->arity = index + 1;
    return Expression(std::move(n));
}

Expression Expression::unary(UnaryOp op, Expression child)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Unary;
    n->unary_op = op;
    n->size = child.size() + 1;
    n->depth = child.depth() + 1;
    n->arity = child.arity();
    n->lhs = std::move(child);
    return Expression(std::move(n));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Binary;
    n->binary_op = op;
    n->size = lhs.size() + rhs.size() + 1;
    n->depth = std::max(lhs.depth(), rhs.depth()) + 1;
    n->arity = std::max(lhs.arity(), rhs.arity());
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Expression(std::move(n));
}

NodeKind Expression::kind() const noexcept { return node_->kind; }

double Expression::value() const
{
    if (node_->kind != NodeKind::Constant) {
        throw std::logic_error("value() on a non-constant node");
    }
    return node_->value;
}

std::size_t Expression::index() const
{
    if (node_->kind != NodeKind::Variable) {
        throw std::logic_error("index() on a non-variable node");
    }
    return node_->index;
}

std::string const& Expression::name() const
{
    if (node_->kind != NodeKind::Variable) {
        throw std::logic_error("name() on a non-variable node");
    }
    return node_->name;
}

UnaryOp Expression::unary_op() const
{
    if (node_->kind != NodeKind::Unary) {
        throw std::logic_error("unary_op() on a non-unary node");
    }
    return node_->unary_op;
}

BinaryOp Expression::binary_op() const
{
    if (node_->kind != NodeKind::Binary) {
        throw std::logic_error("binary_op() on a non-binary node");
    }
    return node_->binary_op;
}

Expression const& Expression::child() const
{
    if (node_->kind != NodeKind::Unary) {
        throw std::logic_error("child() on a non-unary node");
    }
    return *node_->lhs;
}

Expression const& Expression::lhs() const
{
    if (node_->kind != NodeKind::Binary) {
        throw std::logic_error("lhs() on a non-binary node");
    }
    return *node_->lhs;
}

Expression const& Expression::rhs() const
{
    if (node_->kind != NodeKind::Binary) {
        throw std::logic_error("rhs() on a non-binary node");
    }
    return *node_->rhs;
}

std::size_t Expression::size() const noexcept { return node_->size; }
std::size_t Expression::depth() const noexcept { return node_->depth; }
std::size_t Expression::arity() const noexcept { return node_->arity; }

std::string Expression::to_string() const
{
    std::string out;
    print(*this, out);
    return out;
}

bool operator==(Expression const& a, Expression const& b) noexcept
{
    if (a.node_ == b.node_) {
        return true;
    }
    auto const& x = *a.node_;
    auto const& y = *b.node_;
    if (x.kind != y.kind || x.size != y.size) {
        return false;
    }
    switch (x.kind) {
    case NodeKind::Constant:
        return x.value == y.value;
    case NodeKind::Variable:
        return x.index == y.index;
    case NodeKind::Unary:
        return x.unary_op == y.unary_op && *x.lhs == *y.lhs;
    case NodeKind::Binary:
        return x.binary_op == y.binary_op && *x.lhs == *y.lhs && *x.rhs == *y.rhs;
    }
    return false;
}

} // namespace pansr::expr

#include "pansr/expr/simplify.hpp"

#include "pansr/expr/evaluate.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

namespace pansr::expr {

namespace {
    constexpr int kMaxPasses = 16;

    bool is_const(Expression const& e, double v) { return e.is_constant() && e.value() == v; }

    std::optional<Expression> fold(double v)
    {
        if (!std::isfinite(v)) {
            return std::nullopt;
        }
        return Expression::constant(v);
    }

    struct Term {
        bool positive;
        Expression expr;
    };

    // Flattens a chain of the two given operators into signed operands.
    void flatten(Expression const& e, BinaryOp plus, BinaryOp minus, bool positive, std::vector<Term>& out)
    {
        if (e.kind() == NodeKind::Binary && (e.binary_op() == plus || e.binary_op() == minus)) {
            flatten(e.lhs(), plus, minus, positive, out);
            flatten(e.rhs(), plus, minus, e.binary_op() == plus ? positive : !positive, out);
            return;
        }
        out.push_back({ positive, e });
    }

    std::optional<Expression> merge_sum_constants(Expression const& e)
    {
        std::vector<Term> terms;
        flatten(e, BinaryOp::Add, BinaryOp::Sub, true, terms);
        double total = 0.0;
        int constants = 0;
        std::vector<Term> rest;
        for (auto const& t : terms) {
            if (t.expr.is_constant()) {
                total += t.positive ? t.expr.value() : -t.expr.value();
                ++constants;
            } else {
                rest.push_back(t);
            }
        }
        if (constants < 2 || !std::isfinite(total)) {
            return std::nullopt;
        }
        std::optional<Expression> acc;
        auto first_pos = std::find_if(rest.begin(), rest.end(), [](Term const& t) { return t.positive; });
        if (first_pos != rest.end()) {
            acc = first_pos->expr;
            rest.erase(first_pos);
        } else if (total != 0.0 || rest.empty()) {
            acc = Expression::constant(total);
            total = 0.0;
        } else {
            acc = Expression::unary(UnaryOp::Neg, rest.front().expr);
            rest.erase(rest.begin());
        }
        for (auto const& t : rest) {
            acc = Expression::binary(t.positive ? BinaryOp::Add : BinaryOp::Sub, *acc, t.expr);
        }
        if (total > 0.0) {
            acc = Expression::binary(BinaryOp::Add, *acc, Expression::constant(total));
        } else if (total < 0.0) {
            acc = Expression::binary(BinaryOp::Sub, *acc, Expression::constant(-total));
        }
        return acc;
    }

    std::optional<Expression> merge_product_constants(Expression const& e)
    {
        std::vector<Term> factors;
        flatten(e, BinaryOp::Mul, BinaryOp::Div, true, factors);
        double product = 1.0;
        int constants = 0;
        std::vector<Term> rest;
        for (auto const& f : factors) {
            if (f.expr.is_constant()) {
                if (!f.positive && f.expr.value() == 0.0) {
                    return std::nullopt;
                }
                product = f.positive ? product * f.expr.value() : product / f.expr.value();
                ++constants;
            } else {
                rest.push_back(f);
            }
        }
        if (constants < 2 || !std::isfinite(product)) {
            return std::nullopt;
        }
        if (product == 0.0) {
            return Expression::constant(0.0);
        }
        std::optional<Expression> acc;
        auto first_num = std::find_if(rest.begin(), rest.end(), [](Term const& t) { return t.positive; });
        if (product == 1.0 && first_num != rest.end()) {
            acc = first_num->expr;
            rest.erase(first_num);
        } else {
            acc = Expression::constant(product);
        }
        for (auto const& f : rest) {
            acc = Expression::binary(f.positive ? BinaryOp::Mul : BinaryOp::Div, *acc, f.expr);
        }
        return acc;
    }

    Expression rewrite_unary(UnaryOp op, Expression const& c)
    {
        if (c.is_constant()) {
            if (auto v = fold(apply(op, c.value()))) {
                return *v;
            }
        }
        if (op == UnaryOp::Neg && c.kind() == NodeKind::Unary && c.unary_op() == UnaryOp::Neg) {
            return c.child();
        }
        return Expression::unary(op, c);
    }

    Expression rewrite_binary(BinaryOp op, Expression const& a, Expression const& b, SimplifyNotes* notes)
    {
        if (a.is_constant() && b.is_constant()) {
            if (auto v = fold(apply(op, a.value(), b.value()))) {
                return *v;
            }
        }
        auto guard = [&](std::string const& note) {
            if (notes != nullptr) {
                notes->guards.push_back(note);
            }
        };
        switch (op) {
        case BinaryOp::Add:
            if (is_const(a, 0.0)) {
                return b;
            }
            if (is_const(b, 0.0)) {
                return a;
            }
            break;
        case BinaryOp::Sub:
            if (is_const(b, 0.0)) {
                return a;
            }
            if (a == b) {
                return Expression::constant(0.0);
            }
            if (is_const(a, 0.0)) {
                return rewrite_unary(UnaryOp::Neg, b);
            }
            break;
        case BinaryOp::Mul:
            if (is_const(a, 0.0) || is_const(b, 0.0)) {
                return Expression::constant(0.0);
            }
            if (is_const(a, 1.0)) {
                return b;
            }
            if (is_const(b, 1.0)) {
                return a;
            }
            break;
        case BinaryOp::Div:
            if (is_const(b, 1.0)) {
                return a;
            }
            if (a == b) {
                guard("(" + a.to_string() + ") != 0 assumed by x/x -> 1");
                return Expression::constant(1.0);
            }
            if (is_const(a, 0.0)) {
                guard("(" + b.to_string() + ") != 0 assumed by 0/x -> 0");
                return Expression::constant(0.0);
            }
            break;
        case BinaryOp::Pow:
            if (is_const(b, 1.0)) {
                return a;
            }
            if (is_const(b, 0.0) || is_const(a, 1.0)) {
                return Expression::constant(1.0);
            }
            break;
        }
        auto e = Expression::binary(op, a, b);
        if (op == BinaryOp::Add || op == BinaryOp::Sub) {
            if (auto m = merge_sum_constants(e)) {
                return *m;
            }
        } else if (op == BinaryOp::Mul || op == BinaryOp::Div) {
            if (auto m = merge_product_constants(e)) {
                return *m;
            }
        }
        return e;
    }

    Expression pass(Expression const& e, SimplifyNotes* notes)
    {
        switch (e.kind()) {
        case NodeKind::Constant:
        case NodeKind::Variable:
            return e;
        case NodeKind::Unary:
            return rewrite_unary(e.unary_op(), pass(e.child(), notes));
        case NodeKind::Binary:
            return rewrite_binary(e.binary_op(), pass(e.lhs(), notes), pass(e.rhs(), notes), notes);
        }
        return e;
    }

    void collect_variables(Expression const& e, std::set<std::size_t>& out)
    {
        switch (e.kind()) {
        case NodeKind::Constant:
            return;
        case NodeKind::Variable:
            out.insert(e.index());
            return;
        case NodeKind::Unary:
            collect_variables(e.child(), out);
            return;
        case NodeKind::Binary:
            collect_variables(e.lhs(), out);
            collect_variables(e.rhs(), out);
            return;
        }
    }
} // namespace

Expression simplify(Expression const& e, SimplifyNotes* notes)
{
    Expression current = e;
    for (int i = 0; i < kMaxPasses; ++i) {
        auto next = pass(current, notes);
        if (next == current) {
            return next;
        }
        current = std::move(next);
    }
    return current;
}

std::size_t complexity(Expression const& e) { return simplify(e).size(); }

std::set<std::size_t> variables_used(Expression const& e)
{
    std::set<std::size_t> out;
    collect_variables(simplify(e), out);
    return out;
}

Expression remap_variables(Expression const& e, std::span<std::size_t const> mapping, std::span<std::string const> names)
{
    switch (e.kind()) {
    case NodeKind::Constant:
        return e;
    case NodeKind::Variable: {
        if (e.index() >= mapping.size()) {
            throw std::out_of_range("remap_variables: no mapping for variable " + e.name());
        }
        auto const target = mapping[e.index()];
        return Expression::variable(target, target < names.size() ? names[target] : std::string {});
    }
    case NodeKind::Unary:
        return Expression::unary(e.unary_op(), remap_variables(e.child(), mapping, names));
    case NodeKind::Binary:
        return Expression::binary(e.binary_op(), remap_variables(e.lhs(), mapping, names), remap_variables(e.rhs(), mapping, names));
    }
    return e;
}

} // namespace pansr::expr

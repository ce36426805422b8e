#include "pansr/expr/equation.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/parser.hpp"
#include "pansr/expr/simplify.hpp"

#include "support/generators.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <vector>

using namespace pansr::expr;

namespace {
std::vector<std::string> const kNames5 = default_variable_names(5);
std::string const kFriedman = "10*sin(pi*x1*x2) + 20*(x3-0.5)**2 + 10*x4 + 5*x5";

Expression parse(std::string_view text, std::vector<std::string> const& names = kNames5)
{
    return parse_expression(text, names);
}
} // namespace

TEST_CASE("parse: gravitational law structure")
{
    std::vector<std::string> const names { "m1", "m2", "r" };
    auto const e = parse_expression("m1*m2/r**2", names);
    auto const m1 = Expression::variable(0, "m1");
    auto const m2 = Expression::variable(1, "m2");
    auto const r = Expression::variable(2, "r");
    auto const expected = Expression::binary(BinaryOp::Div, Expression::binary(BinaryOp::Mul, m1, m2),
        Expression::binary(BinaryOp::Pow, r, Expression::constant(2)));
    CHECK(e == expected);
    CHECK(e.arity() == 3);
}

TEST_CASE("parse: Friedman equation has arity 5")
{
    auto const e = parse(kFriedman);
    CHECK(e.arity() == 5);
}

TEST_CASE("parse: errors carry kind and position")
{
    try {
        (void)parse("x1 +");
        FAIL("expected a syntax error");
    } catch (ParseError const& err) {
        CHECK(err.kind() == ParseError::Kind::Syntax);
        CHECK(err.position() == 4);
    }
    try {
        (void)parse("x1 + y");
        FAIL("expected unknown identifier");
    } catch (ParseError const& err) {
        CHECK(err.kind() == ParseError::Kind::UnknownIdentifier);
        CHECK(err.position() == 5);
    }
    CHECK_THROWS_AS((void)parse("foo(x1)"), ParseError);
    try {
        (void)parse("sin(x1, x2)");
        FAIL("expected an arity error");
    } catch (ParseError const& err) {
        CHECK(err.kind() == ParseError::Kind::Arity);
    }
    CHECK_THROWS_AS((void)parse("(x1"), ParseError);
    CHECK_THROWS_AS((void)parse("x1 $ x2"), ParseError);
    CHECK_THROWS_AS((void)parse(""), ParseError);
}

TEST_CASE("parse: precedence and associativity")
{
    auto const x1 = Expression::variable(0, "x1");
    auto const two = Expression::constant(2);
    auto const three = Expression::constant(3);
    // pow binds tighter than unary minus
    CHECK(parse("-x1**2") == Expression::unary(UnaryOp::Neg, Expression::binary(BinaryOp::Pow, x1, two)));
    // pow is right-associative
    CHECK(parse("x1**2**3") == Expression::binary(BinaryOp::Pow, x1, Expression::binary(BinaryOp::Pow, two, three)));
    // minus is left-associative
    CHECK(parse("x1-2-3") == Expression::binary(BinaryOp::Sub, Expression::binary(BinaryOp::Sub, x1, two), three));
    CHECK(parse("x1^2") == parse("x1**2"));
    CHECK(parse("1.5e-3*x1").lhs().value() == doctest::Approx(1.5e-3));
    CHECK(parse("2E+2").value() == 200.0);
    CHECK(parse("pi").value() == std::numbers::pi);
    CHECK(parse("ln(x1)") == parse("log(x1)"));
    CHECK(parse("arcsin(x1)") == parse("asin(x1)"));
}

TEST_CASE("parse: pi is reserved even when declared as a name")
{
    std::vector<std::string> const names { "pi", "x" };
    auto const e = parse_expression("pi*x", names);
    CHECK(e.lhs().is_constant());
    CHECK(e.arity() == 2);
}

TEST_CASE("evaluate: examples")
{
    std::vector<double> const row { 1.0, 2.0 };
    CHECK(*evaluate(parse("x1+x2"), row) == 3.0);
    std::vector<double> const neg { -1.0 };
    CHECK_FALSE(evaluate(parse("log(x1)"), neg).has_value());
    std::vector<double> const half(5, 0.5);
    // 10 sin(pi/4) + 0 + 5 + 2.5, computed independently.
    CHECK(*evaluate(parse(kFriedman), half) == doctest::Approx(14.571067811865476).epsilon(1e-14));
}

TEST_CASE("evaluate: domain violations are undefined, not errors")
{
    std::vector<double> const row { 0.0, -2.0 };
    CHECK_FALSE(evaluate(parse("1/x1"), row));
    CHECK_FALSE(evaluate(parse("sqrt(x2)"), row));
    CHECK_FALSE(evaluate(parse("x2**0.5"), row));
    CHECK_FALSE(evaluate(parse("exp(1000)"), row));
    CHECK_FALSE(evaluate(parse("asin(x2)"), row));
    CHECK_FALSE(evaluate(parse("x1**-1"), row));
    // integer exponents on negative bases are fine
    CHECK(*evaluate(parse("x2**3"), row) == -8.0);
    CHECK(*evaluate(parse("x2**-2"), row) == 0.25);
    CHECK(*evaluate(parse("x1**0"), row) == 1.0);
    // an undefined subtree is not rescued by an absorbing parent
    CHECK_FALSE(evaluate(parse("log(x2)**0"), row));
    CHECK_FALSE(evaluate(parse("0*log(x2)"), row));
}

TEST_CASE("evaluate_rows agrees with the scalar path")
{
    pansr::Rng rng(7);
    Eigen::MatrixXd X = Eigen::MatrixXd::Random(50, 3) * 3.0;
    for (int k = 0; k < 200; ++k) {
        auto e = pansr::testing::random_expression(rng, 3, 5);
        auto const values = evaluate_rows(e, X);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            Eigen::RowVectorXd r = X.row(i);
            auto const v = evaluate(e, std::span<double const>(r.data(), 3));
            if (v) {
                CHECK(values[i] == *v);
            } else {
                CHECK(std::isnan(values[i]));
            }
        }
    }
}

TEST_CASE("evaluate_rows_protected keeps closure and flags protection")
{
    Eigen::MatrixXd X(3, 1);
    X << 0.0, -4.0, 2.0;
    auto const div = evaluate_rows_protected(parse("1/x1"), X);
    CHECK(div.values[0] == 1.0);
    CHECK(div.values[2] == 0.5);
    CHECK_FALSE(div.strictly_defined);
    auto const sq = evaluate_rows_protected(parse("sqrt(x1)"), X);
    CHECK(sq.values[1] == 2.0);
    CHECK_FALSE(sq.strictly_defined);
    auto const ok = evaluate_rows_protected(parse("x1*2"), X);
    CHECK(ok.strictly_defined);
}

TEST_CASE("simplify: examples")
{
    auto const x1 = Expression::variable(0, "x1");
    CHECK(simplify(parse("(x1*1)+0")) == x1);
    CHECK(simplify(parse("2*3*x1")) == parse("6*x1"));
    CHECK(simplify(parse("x1*2*3")) == parse("6*x1"));
    CHECK(simplify(parse("x1 + 2 - 5")) == parse("x1 - 3"));
    CHECK(simplify(parse("--x1")) == x1);
    CHECK(simplify(parse("x1**1")) == x1);
    CHECK(simplify(parse("x1**0")).value() == 1.0);
    CHECK(simplify(parse("sin(x1) - sin(x1)")).value() == 0.0);
    CHECK(simplify(parse("x2*0 + x1")) == x1);
    CHECK(simplify(parse("-(3)")).value() == -3.0);
    // undefined constant subtrees are not folded
    CHECK(simplify(parse("log(-1)")).kind() == NodeKind::Unary);
}

TEST_CASE("simplify: x/x -> 1 records a guard and is sound on nonzero points")
{
    SimplifyNotes notes;
    auto const s = simplify(parse("x1/x1"), &notes);
    REQUIRE(s.is_constant());
    CHECK(s.value() == 1.0);
    CHECK_FALSE(notes.guards.empty());

    auto const original = parse("x1/x1");
    pansr::Rng rng(11);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    int checked = 0;
    while (checked < 1000) {
        double const x = u(rng);
        if (x == 0.0) {
            continue;
        }
        std::vector<double> row { x };
        CHECK(*evaluate(original, row) == *evaluate(s, row));
        ++checked;
    }
}

TEST_CASE("complexity: examples")
{
    CHECK(complexity(parse("x1")) == 1);
    CHECK(complexity(parse("x1+2*x2")) == 5);
    CHECK(complexity(parse("(x1*1)+0")) == 1);
}

TEST_CASE("variables_used: examples")
{
    CHECK(variables_used(parse("x1+x3")) == std::set<std::size_t> { 0, 2 });
    CHECK(variables_used(parse("x1 + 0*x2")) == std::set<std::size_t> { 0 });
    CHECK(variables_used(parse(kFriedman)) == std::set<std::size_t> { 0, 1, 2, 3, 4 });
}

TEST_CASE("printing: canonical text")
{
    CHECK(parse("m1*m2/r**2", { "m1", "m2", "r" }).to_string() == "m1*m2/r**2");
    CHECK(parse("x1 - (x2 - x3)").to_string() == "x1 - (x2 - x3)");
    CHECK(parse("(-2)**x1").to_string() == "(-2)**x1");
    CHECK(Expression::unary(UnaryOp::Neg, Expression::constant(2)).to_string() == "-(2)");
    CHECK(Expression::constant(-2).to_string() == "-2");
}

TEST_CASE("property: parse(print(e)) == e")
{
    pansr::Rng rng(20240601);
    auto const names = default_variable_names(4);
    for (int k = 0; k < 2000; ++k) {
        auto const e = pansr::testing::random_expression(rng, 4, 6);
        auto const text = e.to_string();
        INFO(text);
        CHECK(parse_expression(text, names) == e);
    }
}

TEST_CASE("property: simplification is sound and never grows the tree")
{
    pansr::Rng rng(99);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 300; ++k) {
        auto const e = pansr::testing::random_expression(rng, 3, 5);
        auto const s = simplify(e);
        INFO(e.to_string(), " => ", s.to_string());
        CHECK(s.size() <= e.size());
        CHECK(complexity(s) <= complexity(e));
        CHECK(simplify(s) == s);
        int defined = 0;
        for (int trial = 0; trial < 1000 && defined < 50; ++trial) {
            std::vector<double> row { u(rng), u(rng), u(rng) };
            auto const a = evaluate(e, row);
            if (!a) {
                continue;
            }
            ++defined;
            auto const b = evaluate(s, row);
            REQUIRE(b.has_value());
            CHECK(std::abs(*a - *b) <= 1e-12 * (1.0 + std::abs(*a)));
        }
    }
}

TEST_CASE("parse is deterministic")
{
    CHECK(parse(kFriedman) == parse(kFriedman));
    CHECK(parse(kFriedman).to_string() == parse(parse(kFriedman).to_string()).to_string());
}

TEST_CASE("equation csv round trip and validation")
{
    auto const dir = std::filesystem::temp_directory_path() / "pansr_test_expr";
    std::filesystem::create_directories(dir);
    auto const path = dir / "eq.csv";
    {
        std::ofstream out(path);
        out << "name,expression,p0,a_1,b_1,a_2,b_2\n";
        out << "I.12.1,mu*Nn,2,1,5,1,5,mu,Nn\n";
        out << "poly,x1 + x2**2,2,0,1,-1,1\n";
    }
    auto const eqs = read_equations_csv(path);
    REQUIRE(eqs.size() == 2);
    CHECK(eqs[0].variable_names == std::vector<std::string> { "mu", "Nn" });
    CHECK(eqs[1].bounds[1].lower == -1.0);
    write_equations_csv(dir / "eq2.csv", eqs);
    auto const again = read_equations_csv(dir / "eq2.csv");
    CHECK(again[0].expression == eqs[0].expression);
    CHECK(again[1].variable_names == eqs[1].variable_names);

    EquationSpec bad { "bad", "x1", { "x1" }, { { 2.0, 1.0 } } };
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    EquationSpec unknown { "unknown", "x1 + x2", { "x1" }, { { 0.0, 1.0 } } };
    CHECK_THROWS_AS(unknown.validate(), ParseError);
}

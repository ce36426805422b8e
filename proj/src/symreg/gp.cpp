#include "pansr/symreg/gp.hpp"

#include "pansr/core/random.hpp"
#include "pansr/expr/evaluate.hpp"
#include "pansr/expr/simplify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>
#include <variant>

namespace pansr::symreg {

namespace {

using expr::BinaryOp;
using expr::Expression;
using expr::NodeKind;
using expr::UnaryOp;
using Function = std::variant<UnaryOp, BinaryOp>;

std::optional<BinaryOp> binary_from_name(std::string_view name)
{
    if (name == "add") {
        return BinaryOp::Add;
    }
    if (name == "sub") {
        return BinaryOp::Sub;
    }
    if (name == "mul") {
        return BinaryOp::Mul;
    }
    if (name == "div") {
        return BinaryOp::Div;
    }
    if (name == "pow") {
        return BinaryOp::Pow;
    }
    return std::nullopt;
}

std::vector<Function> parse_functions(std::vector<std::string> const& names)
{
    std::vector<Function> out;
    for (auto const& n : names) {
        if (auto b = binary_from_name(n)) {
            out.emplace_back(*b);
        } else if (auto u = expr::unary_from_name(n)) {
            out.emplace_back(*u);
        } else if (n == "neg") {
            out.emplace_back(UnaryOp::Neg);
        } else {
            throw std::invalid_argument("unknown GP function: " + n);
        }
    }
    return out;
}

// Preorder view of a tree: each node with its depth (root = 1).
struct Site {
    Expression node;
    std::size_t depth;
};

void collect(Expression const& e, std::size_t depth, std::vector<Site>& out)
{
    out.push_back({ e, depth });
    if (e.kind() == NodeKind::Unary) {
        collect(e.child(), depth + 1, out);
    } else if (e.kind() == NodeKind::Binary) {
        collect(e.lhs(), depth + 1, out);
        collect(e.rhs(), depth + 1, out);
    }
}

std::vector<Site> sites(Expression const& e)
{
    std::vector<Site> out;
    out.reserve(e.size());
    collect(e, 1, out);
    return out;
}

// Returns e with its preorder node `target` replaced by `with`.
Expression replace(Expression const& e, std::size_t target, Expression const& with, std::size_t& cursor)
{
    if (cursor == target) {
        cursor += e.size();
        return with;
    }
    ++cursor;
    switch (e.kind()) {
    case NodeKind::Unary: {
        auto child = replace(e.child(), target, with, cursor);
        return Expression::unary(e.unary_op(), std::move(child));
    }
    case NodeKind::Binary: {
        auto lhs = replace(e.lhs(), target, with, cursor);
        auto rhs = replace(e.rhs(), target, with, cursor);
        return Expression::binary(e.binary_op(), std::move(lhs), std::move(rhs));
    }
    default:
        return e;
    }
}

Expression replace(Expression const& e, std::size_t target, Expression const& with)
{
    std::size_t cursor = 0;
    return replace(e, target, with, cursor);
}

class Engine {
public:
    Engine(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y, GPConfig const& cfg,
        std::function<void(Individual const&)> const& on_evaluate)
        : X_(X)
        , y_(y)
        , cfg_(cfg)
        , on_evaluate_(on_evaluate)
        , functions_(parse_functions(cfg.functions))
        , num_features_(static_cast<std::size_t>(X.cols()))
        , rng_(cfg.seed)
    {
        for (auto const& f : functions_) {
            (std::holds_alternative<UnaryOp>(f) ? unary_ : binary_).push_back(f);
        }
    }

    GPResult run();

private:
    Expression terminal()
    {
        auto const t = std::uniform_int_distribution<std::size_t>(0, num_features_)(rng_);
        if (t == num_features_) {
            return Expression::constant(std::uniform_real_distribution<double>(cfg_.const_min, cfg_.const_max)(rng_));
        }
        return Expression::variable(t, "x" + std::to_string(t + 1));
    }

    Expression apply_function(Function const& f, std::size_t depth, std::size_t max_depth, bool full)
    {
        if (auto const* u = std::get_if<UnaryOp>(&f)) {
            return Expression::unary(*u, random_tree(depth + 1, max_depth, full));
        }
        auto lhs = random_tree(depth + 1, max_depth, full);
        auto rhs = random_tree(depth + 1, max_depth, full);
        return Expression::binary(std::get<BinaryOp>(f), std::move(lhs), std::move(rhs));
    }

    // Full trees put functions everywhere above max_depth; grow trees pick
    // among functions and features uniformly at every level.
    Expression random_tree(std::size_t depth, std::size_t max_depth, bool full)
    {
        auto const choice = std::uniform_int_distribution<std::size_t>(0, num_features_ + functions_.size() - 1)(rng_);
        bool const function = depth == 1 || full || choice < functions_.size();
        if (depth < max_depth && function) {
            auto const& f = functions_[std::uniform_int_distribution<std::size_t>(0, functions_.size() - 1)(rng_)];
            return apply_function(f, depth, max_depth, full);
        }
        return terminal();
    }

    // Koza-style subtree choice: internal nodes 90%, leaves 10%.
    std::size_t pick_site(std::vector<Site> const& s)
    {
        std::vector<double> w(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto const k = s[i].node.kind();
            w[i] = (k == NodeKind::Unary || k == NodeKind::Binary) ? 0.9 : 0.1;
        }
        return std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng_);
    }

    Individual const& tournament(std::vector<Individual> const& pop)
    {
        std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
        std::size_t best = pick(rng_);
        for (std::size_t t = 1; t < cfg_.tournament_size; ++t) {
            auto const c = pick(rng_);
            if (pop[c].fitness < pop[best].fitness) {
                best = c;
            }
        }
        return pop[best];
    }

    Expression crossover(Expression const& parent, Expression const& donor)
    {
        auto const ps = sites(parent);
        auto const ds = sites(donor);
        return replace(parent, pick_site(ps), ds[pick_site(ds)].node);
    }

    Expression hoist(Expression const& parent)
    {
        auto const ps = sites(parent);
        auto const at = pick_site(ps);
        auto const inner = sites(ps[at].node);
        return replace(parent, at, inner[pick_site(inner)].node);
    }

    Expression point_mutation(Expression const& e)
    {
        std::bernoulli_distribution hit(cfg_.p_point_replace);
        switch (e.kind()) {
        case NodeKind::Constant:
        case NodeKind::Variable:
            return hit(rng_) ? terminal() : e;
        case NodeKind::Unary: {
            auto op = e.unary_op();
            if (hit(rng_) && !unary_.empty()) {
                op = std::get<UnaryOp>(unary_[std::uniform_int_distribution<std::size_t>(0, unary_.size() - 1)(rng_)]);
            }
            return Expression::unary(op, point_mutation(e.child()));
        }
        case NodeKind::Binary: {
            auto op = e.binary_op();
            if (hit(rng_) && !binary_.empty()) {
                op = std::get<BinaryOp>(binary_[std::uniform_int_distribution<std::size_t>(0, binary_.size() - 1)(rng_)]);
            }
            auto lhs = point_mutation(e.lhs());
            auto rhs = point_mutation(e.rhs());
            return Expression::binary(op, std::move(lhs), std::move(rhs));
        }
        }
        return e;
    }

    Individual evaluate(Expression e)
    {
        Individual ind;
        ind.evaluation = ++evaluations_;
        auto const pe = expr::evaluate_rows_protected(e, X_);
        double const mse = (pe.values - y_.array()).square().mean();
        ind.complexity = expr::complexity(e);
        if (std::isfinite(mse)) {
            ind.mse = mse;
            ind.fitness = mse + cfg_.parsimony * static_cast<double>(ind.complexity);
            ind.valid = pe.strictly_defined;
        }
        ind.expression = std::move(e);
        if (ind.valid && ind.fitness < best_.fitness) {
            best_ = ind;
        }
        if (on_evaluate_) {
            on_evaluate_(ind);
        }
        return ind;
    }

    Eigen::Ref<Eigen::MatrixXd const> X_;
    Eigen::Ref<Eigen::VectorXd const> y_;
    GPConfig const& cfg_;
    std::function<void(Individual const&)> const& on_evaluate_;
    std::vector<Function> functions_;
    std::vector<Function> unary_;
    std::vector<Function> binary_;
    std::size_t num_features_;
    Rng rng_;
    std::size_t evaluations_ = 0;
    Individual best_;
};

GPResult Engine::run()
{
    auto const start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
    GPResult result;

    auto const pop_size = cfg_.population_size;
    std::vector<Individual> pop;
    pop.reserve(pop_size);
    auto const depths = cfg_.init_max_depth - cfg_.init_min_depth + 1;
    for (std::size_t i = 0; i < pop_size; ++i) {
        auto const depth = cfg_.init_min_depth + i % depths;
        bool const full = (i / depths) % 2 == 0;
        pop.push_back(evaluate(random_tree(1, depth, full)));
    }
    result.generations = 1;
    result.best_fitness_trace.push_back(best_.fitness);

    double const c1 = cfg_.p_crossover;
    double const c2 = c1 + cfg_.p_subtree_mutation;
    double const c3 = c2 + cfg_.p_hoist_mutation;
    double const c4 = c3 + cfg_.p_point_mutation;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    result.stop_reason = "generations";
    while (result.generations < cfg_.generations) {
        if (evaluations_ + pop_size > cfg_.max_evaluations) {
            result.stop_reason = "evaluations";
            break;
        }
        if (elapsed() > cfg_.max_seconds) {
            result.stop_reason = "time";
            break;
        }
        std::vector<Individual> next;
        next.reserve(pop_size);
        for (std::size_t i = 0; i < pop_size; ++i) {
            auto const& parent = tournament(pop);
            double const r = unit(rng_);
            std::optional<Expression> child;
            if (r < c1) {
                child = crossover(parent.expression, tournament(pop).expression);
            } else if (r < c2) {
                auto const depth = std::uniform_int_distribution<std::size_t>(1, cfg_.init_max_depth)(rng_);
                child = crossover(parent.expression, random_tree(1, depth, false));
            } else if (r < c3) {
                child = hoist(parent.expression);
            } else if (r < c4) {
                child = point_mutation(parent.expression);
            }
            // Reproduction, or a child that broke the depth limit: copy the
            // parent without spending an evaluation.
            if (child && child->depth() <= cfg_.max_depth) {
                next.push_back(evaluate(std::move(*child)));
            } else {
                next.push_back(parent);
            }
        }
        pop = std::move(next);
        ++result.generations;
        result.best_fitness_trace.push_back(best_.fitness);
    }

    if (!best_.valid) {
        // No strictly defined individual: report the best protected one.
        best_ = *std::min_element(pop.begin(), pop.end(), [](auto const& a, auto const& b) { return a.fitness < b.fitness; });
        best_.fitness = kWorstFitness;
        best_.mse = kWorstFitness;
        best_.valid = false;
    }
    result.best = best_;
    result.evaluations = evaluations_;
    result.seconds = elapsed();
    return result;
}

} // namespace

void GPConfig::validate() const
{
    auto require = [](bool ok, char const* what) {
        if (!ok) {
            throw std::invalid_argument(std::string("GPConfig: ") + what);
        }
    };
    require(population_size >= 1, "population_size must be positive");
    require(generations >= 1, "generations must be positive");
    require(max_evaluations >= population_size, "max_evaluations must cover one population");
    require(tournament_size >= 1, "tournament_size must be positive");
    for (double p : { p_crossover, p_subtree_mutation, p_hoist_mutation, p_point_mutation, p_point_replace }) {
        require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
    }
    require(p_crossover + p_subtree_mutation + p_hoist_mutation + p_point_mutation <= 1.0 + 1e-12,
        "variation probabilities must sum to at most 1");
    require(init_min_depth >= 1 && init_min_depth <= init_max_depth, "bad initial depth range");
    require(init_max_depth <= max_depth, "init_max_depth exceeds max_depth");
    require(!functions.empty(), "function set is empty");
    require(const_min < const_max, "empty constant range");
    require(parsimony >= 0.0, "parsimony must be non-negative");
    require(max_seconds > 0.0, "max_seconds must be positive");
    parse_functions(functions);
}

void to_json(nlohmann::json& j, GPConfig const& c)
{
    j = {
        { "population_size", c.population_size },
        { "generations", c.generations },
        { "max_evaluations", c.max_evaluations },
        { "tournament_size", c.tournament_size },
        { "p_crossover", c.p_crossover },
        { "p_subtree_mutation", c.p_subtree_mutation },
        { "p_hoist_mutation", c.p_hoist_mutation },
        { "p_point_mutation", c.p_point_mutation },
        { "p_point_replace", c.p_point_replace },
        { "init_min_depth", c.init_min_depth },
        { "init_max_depth", c.init_max_depth },
        { "max_depth", c.max_depth },
        { "functions", c.functions },
        { "const_min", c.const_min },
        { "const_max", c.const_max },
        { "parsimony", c.parsimony },
        { "max_seconds", c.max_seconds },
        { "seed", c.seed },
    };
}

void from_json(nlohmann::json const& j, GPConfig& c)
{
    GPConfig const d;
    c.population_size = j.value("population_size", d.population_size);
    c.generations = j.value("generations", d.generations);
    c.max_evaluations = j.value("max_evaluations", d.max_evaluations);
    c.tournament_size = j.value("tournament_size", d.tournament_size);
    c.p_crossover = j.value("p_crossover", d.p_crossover);
    c.p_subtree_mutation = j.value("p_subtree_mutation", d.p_subtree_mutation);
    c.p_hoist_mutation = j.value("p_hoist_mutation", d.p_hoist_mutation);
    c.p_point_mutation = j.value("p_point_mutation", d.p_point_mutation);
    c.p_point_replace = j.value("p_point_replace", d.p_point_replace);
    c.init_min_depth = j.value("init_min_depth", d.init_min_depth);
    c.init_max_depth = j.value("init_max_depth", d.init_max_depth);
    c.max_depth = j.value("max_depth", d.max_depth);
    c.functions = j.value("functions", d.functions);
    c.const_min = j.value("const_min", d.const_min);
    c.const_max = j.value("const_max", d.const_max);
    c.parsimony = j.value("parsimony", d.parsimony);
    c.max_seconds = j.value("max_seconds", d.max_seconds);
    c.seed = j.value("seed", d.seed);
}

double fitness(expr::Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X,
    Eigen::Ref<Eigen::VectorXd const> const& y, double parsimony)
{
    auto const values = expr::evaluate_rows(e, X);
    if (!values.allFinite()) {
        return kWorstFitness;
    }
    double const mse = (values - y.array()).square().mean();
    return mse + parsimony * static_cast<double>(expr::complexity(e));
}

GPResult evolve(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y,
    GPConfig const& cfg, std::function<void(Individual const&)> const& on_evaluate)
{
    cfg.validate();
    if (X.rows() == 0 || X.cols() == 0 || X.rows() != y.size()) {
        throw std::invalid_argument("evolve: need a non-empty design with one response per row");
    }
    if (!X.allFinite() || !y.allFinite()) {
        throw std::invalid_argument("evolve: non-finite training data");
    }
    return Engine(X, y, cfg, on_evaluate).run();
}

nlohmann::json to_json(GPResult const& r)
{
    auto finite_or_null = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json trace = nlohmann::json::array();
    for (double v : r.best_fitness_trace) {
        trace.push_back(finite_or_null(v));
    }
    return {
        { "model", r.best.expression.to_string() },
        { "fitness", finite_or_null(r.best.fitness) },
        { "mse", finite_or_null(r.best.mse) },
        { "complexity", r.best.complexity },
        { "valid", r.best.valid },
        { "found_at_evaluation", r.best.evaluation },
        { "evaluations", r.evaluations },
        { "generations", r.generations },
        { "fitness_trace", trace },
        { "seconds", r.seconds },
        { "stop_reason", r.stop_reason },
    };
}

} // namespace pansr::symreg

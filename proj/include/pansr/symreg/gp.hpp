#pragma once

#include "pansr/expr/expression.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace pansr::symreg {

struct GPConfig {
    std::size_t population_size = 500;
    std::size_t generations = 1000;
    std::size_t max_evaluations = 50000;
    std::size_t tournament_size = 20;
    double p_crossover = 0.7;
    double p_subtree_mutation = 0.1;
    double p_hoist_mutation = 0.05;
    double p_point_mutation = 0.1;
    // Per-node replacement probability inside a point mutation.
    double p_point_replace = 0.1;
    std::size_t init_min_depth = 2;
    std::size_t init_max_depth = 6;
    std::size_t max_depth = 10;
    std::vector<std::string> functions { "add", "sub", "mul", "div", "sqrt", "log", "exp", "sin", "cos" };
    double const_min = -5.0;
    double const_max = 5.0;
    double parsimony = 1e-3;
    // Wall-clock backstop; the evaluation budget is the primary limit.
    double max_seconds = 600.0;
    std::uint64_t seed = 1;

    // Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

void to_json(nlohmann::json& j, GPConfig const& cfg);
void from_json(nlohmann::json const& j, GPConfig& cfg);

inline constexpr double kWorstFitness = std::numeric_limits<double>::infinity();

struct Individual {
    expr::Expression expression = expr::Expression::constant(0.0);
    double fitness = kWorstFitness; // MSE + parsimony * complexity
    double mse = kWorstFitness;
    std::size_t complexity = 0;
    std::size_t evaluation = 0; // 1-based stamp of the evaluation that produced it
    bool valid = false;         // defined on every training row without protection
};

struct GPResult {
    Individual best;
    std::size_t evaluations = 0;
    std::size_t generations = 0;
    std::vector<double> best_fitness_trace; // best-ever fitness after each generation
    double seconds = 0.0;
    std::string stop_reason;
};

/// Strict fitness: MSE + parsimony * complexity(e), or kWorstFitness if e is
/// undefined on any row.
double fitness(expr::Expression const& e, Eigen::Ref<Eigen::MatrixXd const> const& X,
    Eigen::Ref<Eigen::VectorXd const> const& y, double parsimony);

/// Generational GP with tournament selection. Search runs on protected
/// semantics; the returned individual is the best strictly defined one ever
/// evaluated. A generation starts only if its worst-case evaluation count
/// fits in the remaining budget. Variables are named x1..xp.
/// Throws std::invalid_argument for empty or non-finite data and for a budget
/// below the population size.
/// `on_evaluate`, if set, sees every individual right after its evaluation.
GPResult evolve(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y,
    GPConfig const& cfg, std::function<void(Individual const&)> const& on_evaluate = {});

nlohmann::json to_json(GPResult const& result);

} // namespace pansr::symreg

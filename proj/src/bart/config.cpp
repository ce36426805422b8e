#include "pansr/bart/config.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace pansr::bart {

void BartConfig::validate() const
{
    if (num_trees < 1) {
        throw std::invalid_argument("bart: num_trees must be >= 1");
    }
    if (posterior_draws < 1) {
        throw std::invalid_argument("bart: posterior_draws must be >= 1");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("bart: alpha must lie in (0, 1)");
    }
    if (!(beta >= 0.0)) {
        throw std::invalid_argument("bart: beta must be >= 0");
    }
    if (!(k > 0.0) || !(nu > 0.0) || !(q > 0.0 && q < 1.0)) {
        throw std::invalid_argument("bart: k > 0, nu > 0 and q in (0, 1) required");
    }
    if (!(p_grow > 0.0 && p_prune > 0.0 && p_change > 0.0) || std::abs(p_grow + p_prune + p_change - 1.0) > 1e-9) {
        throw std::invalid_argument("bart: move probabilities must be positive and sum to 1");
    }
}

BartConfig BartConfig::full_scale()
{
    BartConfig cfg;
    cfg.burn_in = 10000;
    cfg.posterior_draws = 10000;
    return cfg;
}

void to_json(nlohmann::json& j, BartConfig const& cfg)
{
    j = nlohmann::json {
        { "num_trees", cfg.num_trees },
        { "burn_in", cfg.burn_in },
        { "posterior_draws", cfg.posterior_draws },
        { "alpha", cfg.alpha },
        { "beta", cfg.beta },
        { "k", cfg.k },
        { "nu", cfg.nu },
        { "q", cfg.q },
        { "p_grow", cfg.p_grow },
        { "p_prune", cfg.p_prune },
        { "p_change", cfg.p_change },
        { "seed", cfg.seed },
        { "keep_trees", cfg.keep_trees },
    };
}

void from_json(nlohmann::json const& j, BartConfig& cfg)
{
    BartConfig const defaults;
    cfg.num_trees = j.value("num_trees", defaults.num_trees);
    cfg.burn_in = j.value("burn_in", defaults.burn_in);
    cfg.posterior_draws = j.value("posterior_draws", defaults.posterior_draws);
    cfg.alpha = j.value("alpha", defaults.alpha);
    cfg.beta = j.value("beta", defaults.beta);
    cfg.k = j.value("k", defaults.k);
    cfg.nu = j.value("nu", defaults.nu);
    cfg.q = j.value("q", defaults.q);
    cfg.p_grow = j.value("p_grow", defaults.p_grow);
    cfg.p_prune = j.value("p_prune", defaults.p_prune);
    cfg.p_change = j.value("p_change", defaults.p_change);
    cfg.seed = j.value("seed", defaults.seed);
    cfg.keep_trees = j.value("keep_trees", defaults.keep_trees);
}

} // namespace pansr::bart

#pragma once

#include <cstddef>
#include <cstdint>

#include <json.hpp>

namespace pansr::bart {

struct BartConfig {
    std::size_t num_trees = 20;
    std::size_t burn_in = 1000;
    std::size_t posterior_draws = 1000;

    // Split probability at depth d is alpha * (1 + d)^-beta.
    double alpha = 0.95;
    double beta = 2.0;
    // Leaf prior N(0, (0.5 / (k sqrt(M)))^2) on the response rescaled to [-0.5, 0.5].
    double k = 2.0;
    // sigma^2 ~ nu * lambda / chi^2_nu with P(sigma^2 < sigma_hat^2) = q.
    double nu = 3.0;
    double q = 0.9;

    double p_grow = 0.28;
    double p_prune = 0.28;
    double p_change = 0.44;

    std::uint64_t seed = 1;
    // Keep every retained ensemble so predict() works on new data.
    bool keep_trees = true;

    // Throws std::invalid_argument on a violated invariant.
    void validate() const;

    // Long chains: 10,000 burn-in and 10,000 retained draws.
    static BartConfig full_scale();
};

void to_json(nlohmann::json& j, BartConfig const& cfg);
void from_json(nlohmann::json const& j, BartConfig& cfg);

} // namespace pansr::bart

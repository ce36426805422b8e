#pragma once

#include "pansr/bart/config.hpp"
#include "pansr/bart/posterior.hpp"
#include "pansr/bart/tree.hpp"
#include "pansr/core/random.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <vector>

namespace pansr::bart {

struct MoveStats {
    std::size_t grow_proposed = 0;
    std::size_t grow_accepted = 0;
    std::size_t prune_proposed = 0;
    std::size_t prune_accepted = 0;
    std::size_t change_proposed = 0;
    std::size_t change_accepted = 0;
};

/// One Markov chain of the sum-of-trees model (Bayesian backfitting).
///
/// Each sweep visits every tree: a single grow/prune/change Metropolis-Hastings
/// move against the partial residuals with the leaf values integrated out,
/// then a conjugate normal draw of the leaf values. The sweep ends with a
/// scaled-inverse-chi-square draw of sigma^2. Everything here works on the
/// rescaled response.
class BartSampler {
public:
    BartSampler(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y, BartConfig const& cfg);

    void step();

    // Holds sigma^2 (rescaled units) fixed for the remaining sweeps.
    void fix_sigma2(double sigma2);

    [[nodiscard]] double sigma2() const noexcept { return sigma2_; }
    [[nodiscard]] double sigma2_estimate() const noexcept { return sigma2_hat_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double leaf_sd() const noexcept { return leaf_sd_; }
    [[nodiscard]] ResponseScale const& scale() const noexcept { return scale_; }
    [[nodiscard]] std::vector<RegressionTree> const& trees() const noexcept { return trees_; }
    [[nodiscard]] MoveStats const& move_stats() const noexcept { return stats_; }

    // Ensemble sum per training row, rescaled units, summed in tree order.
    [[nodiscard]] Eigen::VectorXd ensemble_fit() const;

    [[nodiscard]] BartDraw snapshot(bool keep_trees) const;

private:
    struct LeafStats {
        std::vector<double> sum;
        std::vector<std::size_t> count;
    };

    void update_tree(std::size_t t);
    bool propose_grow(std::size_t t, LeafStats const& stats);
    bool propose_prune(std::size_t t, LeafStats const& stats);
    bool propose_change(std::size_t t, LeafStats const& stats);
    void draw_leaves(std::size_t t);
    void draw_sigma2();

    [[nodiscard]] double log_marginal(double sum, std::size_t count) const noexcept;
    [[nodiscard]] double split_prob(int depth) const noexcept;
    [[nodiscard]] std::pair<std::size_t, double> draw_rule();

    Eigen::MatrixXd X_;
    Eigen::VectorXd y_;
    ResponseScale scale_;
    BartConfig cfg_;
    Rng rng_;

    std::vector<std::vector<double>> cutpoints_;
    std::vector<std::size_t> splittable_;

    std::vector<RegressionTree> trees_;
    std::vector<std::vector<int>> leaf_of_;
    Eigen::VectorXd fit_;
    Eigen::VectorXd residual_;

    double leaf_sd_ = 0.0;
    double sigma2_hat_ = 0.0;
    double lambda_ = 0.0;
    double sigma2_ = 0.0;
    bool sigma2_fixed_ = false;
    MoveStats stats_;
};

} // namespace pansr::bart

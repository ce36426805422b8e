#pragma once

#include "pansr/bart/tree.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace pansr::bart {

/// Affine map between the original response and the sampler's [-0.5, 0.5] scale.
struct ResponseScale {
    double min = -0.5;
    double range = 1.0;

    [[nodiscard]] double to_scaled(double y) const noexcept { return (y - min) / range - 0.5; }
    [[nodiscard]] double to_original(double s) const noexcept { return (s + 0.5) * range + min; }
};

struct BartDraw {
    // Noise variance in original response units.
    double sigma2 = 0.0;
    std::vector<std::uint32_t> split_counts;
    std::uint32_t total_splits = 0;
    // Empty when the fit was run with keep_trees = false.
    std::vector<RegressionTree> trees;
};

class BartPosterior {
public:
    BartPosterior(std::size_t num_features, ResponseScale scale, std::vector<BartDraw> draws,
        Eigen::VectorXd train_predictions = {}, std::optional<Eigen::VectorXd> test_predictions = std::nullopt);

    [[nodiscard]] std::size_t num_features() const noexcept { return num_features_; }
    [[nodiscard]] ResponseScale const& scale() const noexcept { return scale_; }
    [[nodiscard]] std::vector<BartDraw> const& draws() const noexcept { return draws_; }
    [[nodiscard]] bool has_trees() const noexcept;

    // Posterior mean on the training design, in original units.
    [[nodiscard]] Eigen::VectorXd const& train_predictions() const noexcept { return train_predictions_; }
    [[nodiscard]] std::optional<Eigen::VectorXd> const& test_predictions() const noexcept { return test_predictions_; }

    [[nodiscard]] std::vector<double> sigma2_draws() const;

private:
    std::size_t num_features_;
    ResponseScale scale_;
    std::vector<BartDraw> draws_;
    Eigen::VectorXd train_predictions_;
    std::optional<Eigen::VectorXd> test_predictions_;
};

} // namespace pansr::bart

#pragma once

#include "pansr/bart/config.hpp"
#include "pansr/bart/posterior.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <optional>
#include <vector>

namespace pansr::bart {

/// Runs burn-in plus posterior sweeps of one chain and keeps the posterior
/// draws. When `X_test` is given its posterior-mean predictions are cached.
/// Throws std::invalid_argument for n < 10, p < 1, non-finite inputs or a
/// constant response.
BartPosterior fit_bart(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y,
    BartConfig const& cfg, std::optional<Eigen::MatrixXd> const& X_test = std::nullopt);

/// Posterior mean of the ensemble sum in original units.
Eigen::VectorXd predict(BartPosterior const& posterior, Eigen::Ref<Eigen::MatrixXd const> const& X_new);

/// Variable inclusion proportions: the per-draw share of splits on each
/// feature (0 for a draw without splits), averaged over draws.
std::vector<double> vip(BartPosterior const& posterior);

/// Per-draw sigma^2 and split-count matrix.
nlohmann::json posterior_to_json(BartPosterior const& posterior);

} // namespace pansr::bart

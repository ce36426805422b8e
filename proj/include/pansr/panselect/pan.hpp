#pragma once

#include "pansr/bart/config.hpp"
#include "pansr/panselect/cluster.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

namespace pansr::panselect {

/// Descending ranks (largest VIP gets 1); exact ties share their midrank.
std::vector<double> rank_vips(std::span<double const> q);

struct PanConfig {
    std::size_t num_chains = 20; // K
    bart::BartConfig bart;
    ClusterAlgo algo = ClusterAlgo::AHC;
    std::uint64_t seed = 1;
    std::size_t threads = 0; // 0 = hardware concurrency

    void validate() const;
};

nlohmann::json to_json(PanConfig const& cfg);
PanConfig pan_config_from_json(nlohmann::json const& j);

struct SelectionResult {
    Eigen::MatrixXd vips;  // p x K
    Eigen::MatrixXd ranks; // p x K
    std::vector<double> average_ranks;
    TwoClusters clusters;
    std::vector<std::size_t> selected; // zero-based, ascending
    bool degenerate = false;
    std::size_t num_chains = 0;
    ClusterAlgo algo = ClusterAlgo::AHC;
    std::uint64_t seed = 0;
};

/// Aggregation step of PAN: averages each row of the p x K rank matrix,
/// splits the averages in two and keeps the low-mean group. A degenerate
/// split (equal means) selects every feature; p = 1 selects the only one.
SelectionResult select_from_ranks(Eigen::MatrixXd const& ranks, ClusterAlgo algo, std::uint64_t seed);

/// Fits K independent BART chains (chain k seeded with derive_seed(seed, {k}))
/// and selects features from their VIP ranks. Chains run concurrently; the
/// result does not depend on the thread count.
SelectionResult run_pan(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y,
    PanConfig const& cfg);

nlohmann::json to_json(SelectionResult const& result);

/// Mean rank of relevant and irrelevant features against the uniform-rank
/// model, whose means are (1 + p0) / 2 and (p0 + 1 + p) / 2.
struct RankModelReport {
    double relevant_mean = 0.0;
    double relevant_expected = 0.0;
    double irrelevant_mean = 0.0;
    double irrelevant_expected = 0.0;
    // |observed - expected| / expected
    double relevant_deviation = 0.0;
    double irrelevant_deviation = 0.0;
};

/// Throws std::invalid_argument if S0 is empty, covers every feature, or
/// holds an index >= p.
RankModelReport rank_distribution_check(Eigen::MatrixXd const& ranks, std::set<std::size_t> const& s0);

nlohmann::json to_json(RankModelReport const& report);

} // namespace pansr::panselect

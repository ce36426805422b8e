#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace pansr::panselect {

enum class ClusterAlgo { AHC, KMeans, GMM };

std::string_view name_of(ClusterAlgo algo) noexcept;
ClusterAlgo cluster_algo_from_name(std::string_view name);

/// A split of scalars into two groups. Label 0 is the group with the smaller
/// mean; on equal means it is the group holding the lowest index, and
/// `degenerate` is set.
struct TwoClusters {
    std::vector<int> labels;
    double means[2] = { 0.0, 0.0 };
    bool degenerate = false;
};

/// UPGMA on |v_i - v_j|, stopped at two clusters. Ties between equally close
/// cluster pairs go to the pair that comes first in ascending value order
/// (index order among equal values), so relabeling the inputs relabels the
/// output in the same way.
/// Throws std::invalid_argument for fewer than two values.
TwoClusters ahc_two_cluster(std::span<double const> values);

/// k-means with k-means++ seeding and Lloyd iterations.
TwoClusters kmeans_two_cluster(std::span<double const> values, std::uint64_t seed);

/// Two-component 1-D Gaussian mixture fitted by EM (started from k-means);
/// each value goes to its most responsible component.
TwoClusters gmm_two_cluster(std::span<double const> values, std::uint64_t seed);

TwoClusters two_cluster(ClusterAlgo algo, std::span<double const> values, std::uint64_t seed);

} // namespace pansr::panselect

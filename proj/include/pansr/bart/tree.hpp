#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace pansr::bart {

struct TreeNode {
    int parent = -1;
    int left = -1;
    int right = -1;
    std::size_t feature = 0;
    double cutpoint = 0.0;
    double value = 0.0;
    int depth = 0;
    bool alive = true;

    [[nodiscard]] bool is_leaf() const noexcept { return left < 0; }
};

/// Binary regression tree. Internal nodes send x[feature] <= cutpoint to the
/// left child. Node slots freed by pruning are reused by later splits, so
/// node indices are stable for the lifetime of a node.
class RegressionTree {
public:
    explicit RegressionTree(double root_value = 0.0);

    [[nodiscard]] std::vector<TreeNode> const& nodes() const noexcept { return nodes_; }
    [[nodiscard]] TreeNode const& node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

    // Turns leaf `leaf` into an internal node; returns {left, right}.
    std::pair<int, int> split(int leaf, std::size_t feature, double cutpoint, double left_value = 0.0, double right_value = 0.0);
    // Collapses an internal node whose children are both leaves.
    void prune(int node, double value = 0.0);
    void set_rule(int node, std::size_t feature, double cutpoint);
    void set_value(int leaf, double value);

    [[nodiscard]] std::vector<int> leaves() const;
    // Internal nodes whose children are both leaves.
    [[nodiscard]] std::vector<int> prunable_nodes() const;
    [[nodiscard]] std::size_t num_internal() const noexcept { return num_internal_; }
    [[nodiscard]] bool is_stump() const noexcept { return num_internal_ == 0; }

    // Leaf reached by row i of X (rows are samples).
    [[nodiscard]] int find_leaf(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Index row) const;
    [[nodiscard]] double predict(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Index row) const;

    void add_split_counts(std::vector<std::uint32_t>& counts) const;

private:
    int allocate();

    std::vector<TreeNode> nodes_;
    std::vector<int> free_;
    std::size_t num_internal_ = 0;
};

} // namespace pansr::bart

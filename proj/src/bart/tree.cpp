#include "pansr/bart/tree.hpp"

#include <stdexcept>

namespace pansr::bart {

RegressionTree::RegressionTree(double root_value)
{
    TreeNode root;
    root.value = root_value;
    nodes_.push_back(root);
}

int RegressionTree::allocate()
{
    if (!free_.empty()) {
        int const i = free_.back();
        free_.pop_back();
        nodes_[static_cast<std::size_t>(i)] = TreeNode {};
        return i;
    }
    nodes_.emplace_back();
    return static_cast<int>(nodes_.size() - 1);
}

std::pair<int, int> RegressionTree::split(int leaf, std::size_t feature, double cutpoint, double left_value, double right_value)
{
    if (!nodes_.at(static_cast<std::size_t>(leaf)).is_leaf() || !nodes_[static_cast<std::size_t>(leaf)].alive) {
        throw std::logic_error("split: node is not a live leaf");
    }
    int const l = allocate();
    int const r = allocate();
    auto& parent = nodes_[static_cast<std::size_t>(leaf)];
    parent.left = l;
    parent.right = r;
    parent.feature = feature;
    parent.cutpoint = cutpoint;
    for (auto [child, value] : { std::pair { l, left_value }, std::pair { r, right_value } }) {
        auto& c = nodes_[static_cast<std::size_t>(child)];
        c.parent = leaf;
        c.depth = parent.depth + 1;
        c.value = value;
    }
    ++num_internal_;
    return { l, r };
}

void RegressionTree::prune(int node, double value)
{
    auto& n = nodes_.at(static_cast<std::size_t>(node));
    if (n.is_leaf() || !nodes_[static_cast<std::size_t>(n.left)].is_leaf() || !nodes_[static_cast<std::size_t>(n.right)].is_leaf()) {
        throw std::logic_error("prune: node does not have two leaf children");
    }
    nodes_[static_cast<std::size_t>(n.left)].alive = false;
    nodes_[static_cast<std::size_t>(n.right)].alive = false;
    free_.push_back(n.right);
    free_.push_back(n.left);
    n.left = -1;
    n.right = -1;
    n.value = value;
    --num_internal_;
}

void RegressionTree::set_rule(int node, std::size_t feature, double cutpoint)
{
    auto& n = nodes_.at(static_cast<std::size_t>(node));
    if (n.is_leaf()) {
        throw std::logic_error("set_rule: node is a leaf");
    }
    n.feature = feature;
    n.cutpoint = cutpoint;
}

void RegressionTree::set_value(int leaf, double value)
{
    nodes_.at(static_cast<std::size_t>(leaf)).value = value;
}

std::vector<int> RegressionTree::leaves() const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].alive && nodes_[i].is_leaf()) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::vector<int> RegressionTree::prunable_nodes() const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto const& n = nodes_[i];
        if (n.alive && !n.is_leaf() && nodes_[static_cast<std::size_t>(n.left)].is_leaf() && nodes_[static_cast<std::size_t>(n.right)].is_leaf()) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

int RegressionTree::find_leaf(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Index row) const
{
    int i = 0;
    while (!nodes_[static_cast<std::size_t>(i)].is_leaf()) {
        auto const& n = nodes_[static_cast<std::size_t>(i)];
        i = X(row, static_cast<Eigen::Index>(n.feature)) <= n.cutpoint ? n.left : n.right;
    }
    return i;
}

double RegressionTree::predict(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Index row) const
{
    return nodes_[static_cast<std::size_t>(find_leaf(X, row))].value;
}

void RegressionTree::add_split_counts(std::vector<std::uint32_t>& counts) const
{
    for (auto const& n : nodes_) {
        if (n.alive && !n.is_leaf()) {
            counts.at(n.feature) += 1;
        }
    }
}

} // namespace pansr::bart

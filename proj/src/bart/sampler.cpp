#include "pansr/bart/sampler.hpp"

#include <Eigen/QR>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pansr::bart {

namespace {
    double variance(Eigen::VectorXd const& v)
    {
        double const mean = v.mean();
        return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
    }

    // Residual variance of an intercept + linear fit, or the response variance
    // when the design is too wide for least squares.
    double initial_sigma2(Eigen::MatrixXd const& X, Eigen::VectorXd const& y)
    {
        auto const n = X.rows();
        auto const p = X.cols();
        double const var_y = variance(y);
        if (n <= p + 1) {
            return var_y;
        }
        Eigen::MatrixXd design(n, p + 1);
        design.col(0).setOnes();
        design.rightCols(p) = X;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        Eigen::VectorXd const coef = qr.solve(y);
        double const sse = (y - design * coef).squaredNorm();
        auto const dof = static_cast<double>(n - qr.rank());
        double const est = dof > 0 ? sse / dof : var_y;
        return std::max(est, 1e-8 * var_y);
    }
} // namespace

BartSampler::BartSampler(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y, BartConfig const& cfg)
    : X_(X)
    , cfg_(cfg)
    , rng_(cfg.seed)
{
    cfg_.validate();
    if (X.rows() != y.size() || X.rows() < 2) {
        throw std::invalid_argument("bart: need at least two rows and matching X/y lengths");
    }
    double const y_min = y.minCoeff();
    double const y_range = y.maxCoeff() - y_min;
    if (!(y_range > 0.0)) {
        throw std::invalid_argument("bart: response has zero variance");
    }
    scale_ = ResponseScale { y_min, y_range };
    y_ = y.unaryExpr([this](double v) { return scale_.to_scaled(v); });

    auto const p = static_cast<std::size_t>(X_.cols());
    cutpoints_.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        auto col = X_.col(static_cast<Eigen::Index>(j));
        std::vector<double> values(col.data(), col.data() + col.size());
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        values.pop_back();
        cutpoints_[j] = std::move(values);
        if (!cutpoints_[j].empty()) {
            splittable_.push_back(j);
        }
    }

    leaf_sd_ = 0.5 / (cfg_.k * std::sqrt(static_cast<double>(cfg_.num_trees)));
    sigma2_hat_ = initial_sigma2(X_, y_);
    boost::math::chi_squared chi2(cfg_.nu);
    lambda_ = sigma2_hat_ * boost::math::quantile(chi2, 1.0 - cfg_.q) / cfg_.nu;
    sigma2_ = sigma2_hat_;

    double const init = y_.mean() / static_cast<double>(cfg_.num_trees);
    trees_.assign(cfg_.num_trees, RegressionTree(init));
    leaf_of_.assign(cfg_.num_trees, std::vector<int>(static_cast<std::size_t>(X_.rows()), 0));
    fit_ = ensemble_fit();
    residual_.resize(X_.rows());
}

void BartSampler::fix_sigma2(double sigma2)
{
    if (!(sigma2 > 0.0)) {
        throw std::invalid_argument("bart: sigma^2 must be positive");
    }
    sigma2_ = sigma2;
    sigma2_fixed_ = true;
}

double BartSampler::split_prob(int depth) const noexcept
{
    return cfg_.alpha * std::pow(1.0 + depth, -cfg_.beta);
}

double BartSampler::log_marginal(double sum, std::size_t count) const noexcept
{
    double const tau2 = leaf_sd_ * leaf_sd_;
    double const denom = sigma2_ + static_cast<double>(count) * tau2;
    return 0.5 * std::log(sigma2_ / denom) + tau2 * sum * sum / (2.0 * sigma2_ * denom);
}

std::pair<std::size_t, double> BartSampler::draw_rule()
{
    auto const j = splittable_[std::uniform_int_distribution<std::size_t>(0, splittable_.size() - 1)(rng_)];
    auto const& cuts = cutpoints_[j];
    auto const c = cuts[std::uniform_int_distribution<std::size_t>(0, cuts.size() - 1)(rng_)];
    return { j, c };
}

Eigen::VectorXd BartSampler::ensemble_fit() const
{
    Eigen::VectorXd fit = Eigen::VectorXd::Zero(X_.rows());
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        auto const& nodes = trees_[t].nodes();
        auto const& leaf = leaf_of_[t];
        for (Eigen::Index i = 0; i < fit.size(); ++i) {
            fit[i] += nodes[static_cast<std::size_t>(leaf[static_cast<std::size_t>(i)])].value;
        }
    }
    return fit;
}

void BartSampler::step()
{
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        update_tree(t);
    }
    fit_ = ensemble_fit();
    draw_sigma2();
}

void BartSampler::update_tree(std::size_t t)
{
    auto const& tree = trees_[t];
    auto const& leaf = leaf_of_[t];
    auto const& nodes = tree.nodes();
    auto const n = static_cast<std::size_t>(X_.rows());

    LeafStats stats;
    stats.sum.assign(nodes.size(), 0.0);
    stats.count.assign(nodes.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        auto const l = static_cast<std::size_t>(leaf[i]);
        double const old = nodes[l].value;
        fit_[static_cast<Eigen::Index>(i)] -= old;
        double const r = y_[static_cast<Eigen::Index>(i)] - fit_[static_cast<Eigen::Index>(i)];
        residual_[static_cast<Eigen::Index>(i)] = r;
        stats.sum[l] += r;
        stats.count[l] += 1;
    }

    if (tree.is_stump()) {
        propose_grow(t, stats);
    } else {
        double const u = std::uniform_real_distribution<double>(0.0, 1.0)(rng_);
        if (u < cfg_.p_grow) {
            propose_grow(t, stats);
        } else if (u < cfg_.p_grow + cfg_.p_prune) {
            propose_prune(t, stats);
        } else {
            propose_change(t, stats);
        }
    }
    draw_leaves(t);
}

bool BartSampler::propose_grow(std::size_t t, LeafStats const& stats)
{
    ++stats_.grow_proposed;
    auto& tree = trees_[t];
    auto& leaf_of = leaf_of_[t];
    auto const leaves = tree.leaves();
    int const target = leaves[std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng_)];
    if (splittable_.empty()) {
        return false;
    }
    auto const [feature, cut] = draw_rule();

    auto const col = X_.col(static_cast<Eigen::Index>(feature));
    double left_sum = 0.0;
    std::size_t left_count = 0;
    for (std::size_t i = 0; i < leaf_of.size(); ++i) {
        if (leaf_of[i] == target && col[static_cast<Eigen::Index>(i)] <= cut) {
            left_sum += residual_[static_cast<Eigen::Index>(i)];
            ++left_count;
        }
    }
    auto const parent_count = stats.count[static_cast<std::size_t>(target)];
    double const parent_sum = stats.sum[static_cast<std::size_t>(target)];
    if (left_count == 0 || left_count == parent_count) {
        return false;
    }
    double const right_sum = parent_sum - left_sum;
    std::size_t const right_count = parent_count - left_count;

    auto const& node = tree.node(target);
    int const d = node.depth;
    std::size_t nog_after = tree.prunable_nodes().size() + 1;
    if (node.parent >= 0) {
        auto const& parent = tree.node(node.parent);
        if (tree.node(parent.left).is_leaf() && tree.node(parent.right).is_leaf()) {
            nog_after -= 1;
        }
    }
    double const p_here = split_prob(d);
    double const p_child = split_prob(d + 1);
    double const log_ratio = log_marginal(left_sum, left_count) + log_marginal(right_sum, right_count)
        - log_marginal(parent_sum, parent_count)
        + std::log(p_here) + 2.0 * std::log1p(-p_child) - std::log1p(-p_here)
        + std::log(cfg_.p_prune) - std::log(tree.is_stump() ? 1.0 : cfg_.p_grow)
        + std::log(static_cast<double>(leaves.size())) - std::log(static_cast<double>(nog_after));

    if (std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng_)) >= log_ratio) {
        return false;
    }
    auto const [l, r] = tree.split(target, feature, cut);
    for (std::size_t i = 0; i < leaf_of.size(); ++i) {
        if (leaf_of[i] == target) {
            leaf_of[i] = col[static_cast<Eigen::Index>(i)] <= cut ? l : r;
        }
    }
    ++stats_.grow_accepted;
    return true;
}

bool BartSampler::propose_prune(std::size_t t, LeafStats const& stats)
{
    ++stats_.prune_proposed;
    auto& tree = trees_[t];
    auto& leaf_of = leaf_of_[t];
    auto const nogs = tree.prunable_nodes();
    int const target = nogs[std::uniform_int_distribution<std::size_t>(0, nogs.size() - 1)(rng_)];
    auto const& node = tree.node(target);
    auto const l = static_cast<std::size_t>(node.left);
    auto const r = static_cast<std::size_t>(node.right);
    std::size_t const num_leaves = tree.leaves().size();
    bool const stump_after = tree.num_internal() == 1;

    double const p_here = split_prob(node.depth);
    double const p_child = split_prob(node.depth + 1);
    double const log_ratio = log_marginal(stats.sum[l] + stats.sum[r], stats.count[l] + stats.count[r])
        - log_marginal(stats.sum[l], stats.count[l]) - log_marginal(stats.sum[r], stats.count[r])
        - (std::log(p_here) + 2.0 * std::log1p(-p_child) - std::log1p(-p_here))
        + std::log(stump_after ? 1.0 : cfg_.p_grow) - std::log(cfg_.p_prune)
        + std::log(static_cast<double>(nogs.size())) - std::log(static_cast<double>(num_leaves - 1));

    if (std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng_)) >= log_ratio) {
        return false;
    }
    int const left = node.left;
    int const right = node.right;
    tree.prune(target);
    for (auto& li : leaf_of) {
        if (li == left || li == right) {
            li = target;
        }
    }
    ++stats_.prune_accepted;
    return true;
}

bool BartSampler::propose_change(std::size_t t, LeafStats const& stats)
{
    ++stats_.change_proposed;
    auto& tree = trees_[t];
    auto& leaf_of = leaf_of_[t];
    auto const nogs = tree.prunable_nodes();
    int const target = nogs[std::uniform_int_distribution<std::size_t>(0, nogs.size() - 1)(rng_)];
    auto const& node = tree.node(target);
    int const left = node.left;
    int const right = node.right;
    auto const [feature, cut] = draw_rule();

    auto const col = X_.col(static_cast<Eigen::Index>(feature));
    double new_left_sum = 0.0;
    std::size_t new_left_count = 0;
    for (std::size_t i = 0; i < leaf_of.size(); ++i) {
        if ((leaf_of[i] == left || leaf_of[i] == right) && col[static_cast<Eigen::Index>(i)] <= cut) {
            new_left_sum += residual_[static_cast<Eigen::Index>(i)];
            ++new_left_count;
        }
    }
    auto const l = static_cast<std::size_t>(left);
    auto const r = static_cast<std::size_t>(right);
    std::size_t const total_count = stats.count[l] + stats.count[r];
    double const total_sum = stats.sum[l] + stats.sum[r];
    if (new_left_count == 0 || new_left_count == total_count) {
        return false;
    }
    double const log_ratio = log_marginal(new_left_sum, new_left_count) + log_marginal(total_sum - new_left_sum, total_count - new_left_count)
        - log_marginal(stats.sum[l], stats.count[l]) - log_marginal(stats.sum[r], stats.count[r]);
    if (std::log(std::uniform_real_distribution<double>(0.0, 1.0)(rng_)) >= log_ratio) {
        return false;
    }
    tree.set_rule(target, feature, cut);
    for (std::size_t i = 0; i < leaf_of.size(); ++i) {
        if (leaf_of[i] == left || leaf_of[i] == right) {
            leaf_of[i] = col[static_cast<Eigen::Index>(i)] <= cut ? left : right;
        }
    }
    ++stats_.change_accepted;
    return true;
}

void BartSampler::draw_leaves(std::size_t t)
{
    auto& tree = trees_[t];
    auto const& leaf_of = leaf_of_[t];
    auto const size = tree.nodes().size();
    std::vector<double> sum(size, 0.0);
    std::vector<std::size_t> count(size, 0);
    for (std::size_t i = 0; i < leaf_of.size(); ++i) {
        sum[static_cast<std::size_t>(leaf_of[i])] += residual_[static_cast<Eigen::Index>(i)];
        count[static_cast<std::size_t>(leaf_of[i])] += 1;
    }
    double const tau2 = leaf_sd_ * leaf_sd_;
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int l : tree.leaves()) {
        auto const li = static_cast<std::size_t>(l);
        double const denom = sigma2_ + static_cast<double>(count[li]) * tau2;
        double const mean = tau2 * sum[li] / denom;
        double const sd = std::sqrt(sigma2_ * tau2 / denom);
        tree.set_value(l, mean + sd * normal(rng_));
    }
    auto const& nodes = tree.nodes();
    for (std::size_t i = 0; i < leaf_of.size(); ++i) {
        fit_[static_cast<Eigen::Index>(i)] += nodes[static_cast<std::size_t>(leaf_of[i])].value;
    }
}

void BartSampler::draw_sigma2()
{
    if (sigma2_fixed_) {
        return;
    }
    double const sse = (y_ - fit_).squaredNorm();
    std::chi_squared_distribution<double> chi2(cfg_.nu + static_cast<double>(y_.size()));
    sigma2_ = (cfg_.nu * lambda_ + sse) / chi2(rng_);
}

BartDraw BartSampler::snapshot(bool keep_trees) const
{
    BartDraw draw;
    draw.sigma2 = sigma2_ * scale_.range * scale_.range;
    draw.split_counts.assign(static_cast<std::size_t>(X_.cols()), 0);
    for (auto const& tree : trees_) {
        tree.add_split_counts(draw.split_counts);
    }
    for (auto c : draw.split_counts) {
        draw.total_splits += c;
    }
    if (keep_trees) {
        draw.trees = trees_;
    }
    return draw;
}

} // namespace pansr::bart

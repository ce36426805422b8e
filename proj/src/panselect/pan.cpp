#include "pansr/panselect/pan.hpp"

#include "pansr/bart/bart.hpp"
#include "pansr/core/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace pansr::panselect {

std::vector<double> rank_vips(std::span<double const> q)
{
    auto const p = q.size();
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t { 0 });
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return q[a] > q[b]; });
    std::vector<double> ranks(p);
    std::size_t i = 0;
    while (i < p) {
        std::size_t j = i;
        while (j + 1 < p && q[order[j + 1]] == q[order[i]]) {
            ++j;
        }
        // positions i..j (zero-based) share the midrank
        double const mid = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) {
            ranks[order[k]] = mid;
        }
        i = j + 1;
    }
    return ranks;
}

void PanConfig::validate() const
{
    if (num_chains < 2) {
        throw std::invalid_argument("PAN needs at least two chains");
    }
    bart.validate();
}

nlohmann::json to_json(PanConfig const& cfg)
{
    return {
        { "num_chains", cfg.num_chains },
        { "bart", cfg.bart },
        { "cluster", name_of(cfg.algo) },
        { "seed", cfg.seed },
        { "threads", cfg.threads },
    };
}

PanConfig pan_config_from_json(nlohmann::json const& j)
{
    PanConfig cfg;
    cfg.num_chains = j.value("num_chains", cfg.num_chains);
    if (j.contains("bart")) {
        cfg.bart = j.at("bart").get<bart::BartConfig>();
    }
    cfg.algo = cluster_algo_from_name(j.value("cluster", std::string(name_of(cfg.algo))));
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    return cfg;
}

SelectionResult select_from_ranks(Eigen::MatrixXd const& ranks, ClusterAlgo algo, std::uint64_t seed)
{
    auto const p = static_cast<std::size_t>(ranks.rows());
    if (p == 0 || ranks.cols() == 0) {
        throw std::invalid_argument("select_from_ranks: empty rank matrix");
    }
    SelectionResult r;
    r.ranks = ranks;
    r.num_chains = static_cast<std::size_t>(ranks.cols());
    r.algo = algo;
    r.seed = seed;
    r.average_ranks.resize(p);
    for (std::size_t j = 0; j < p; ++j) {
        r.average_ranks[j] = ranks.row(static_cast<Eigen::Index>(j)).mean();
    }
    if (p == 1) {
        r.clusters.labels = { 0 };
        r.clusters.means[0] = r.average_ranks[0];
        r.clusters.means[1] = r.average_ranks[0];
        r.clusters.degenerate = true;
        r.degenerate = true;
        r.selected = { 0 };
        return r;
    }
    r.clusters = two_cluster(algo, r.average_ranks, derive_seed(seed, { 0xC1U }));
    r.degenerate = r.clusters.degenerate;
    for (std::size_t j = 0; j < p; ++j) {
        if (r.degenerate || r.clusters.labels[j] == 0) {
            r.selected.push_back(j);
        }
    }
    return r;
}

SelectionResult run_pan(Eigen::Ref<Eigen::MatrixXd const> const& X, Eigen::Ref<Eigen::VectorXd const> const& y,
    PanConfig const& cfg)
{
    cfg.validate();
    auto const p = X.cols();
    auto const K = cfg.num_chains;
    Eigen::MatrixXd vips(p, static_cast<Eigen::Index>(K));
    Eigen::MatrixXd ranks(p, static_cast<Eigen::Index>(K));

    std::atomic<std::size_t> next { 0 };
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < K; k = next++) {
            try {
                auto chain_cfg = cfg.bart;
                chain_cfg.seed = derive_seed(cfg.seed, { k });
                chain_cfg.keep_trees = false;
                auto const q = bart::vip(bart::fit_bart(X, y, chain_cfg));
                auto const rk = rank_vips(q);
                for (Eigen::Index j = 0; j < p; ++j) {
                    vips(j, static_cast<Eigen::Index>(k)) = q[static_cast<std::size_t>(j)];
                    ranks(j, static_cast<Eigen::Index>(k)) = rk[static_cast<std::size_t>(j)];
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next = K;
            }
        }
    };
    std::size_t threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
    threads = std::min(threads, K);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    auto result = select_from_ranks(ranks, cfg.algo, cfg.seed);
    result.vips = std::move(vips);
    return result;
}

nlohmann::json to_json(SelectionResult const& r)
{
    auto columns = [](Eigen::MatrixXd const& m) {
        nlohmann::json runs = nlohmann::json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            runs.push_back(std::vector<double>(m.col(k).data(), m.col(k).data() + m.rows()));
        }
        return runs;
    };
    nlohmann::json selected = nlohmann::json::array();
    for (auto j : r.selected) {
        selected.push_back("x" + std::to_string(j + 1));
    }
    return {
        { "average_ranks", r.average_ranks },
        { "labels", r.clusters.labels },
        { "cluster_means", { r.clusters.means[0], r.clusters.means[1] } },
        { "selected", selected },
        { "degenerate", r.degenerate },
        { "num_chains", r.num_chains },
        { "cluster", name_of(r.algo) },
        { "seed", r.seed },
        { "vips", columns(r.vips) },
    };
}

RankModelReport rank_distribution_check(Eigen::MatrixXd const& ranks, std::set<std::size_t> const& s0)
{
    auto const p = static_cast<std::size_t>(ranks.rows());
    if (s0.empty() || s0.size() >= p || *s0.rbegin() >= p || ranks.cols() == 0) {
        throw std::invalid_argument("rank_distribution_check: S0 must be a nonempty proper subset of the features");
    }
    double rel = 0.0;
    double irr = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
        double const m = ranks.row(static_cast<Eigen::Index>(j)).mean();
        (s0.count(j) != 0 ? rel : irr) += m;
    }
    auto const p0 = static_cast<double>(s0.size());
    auto const pd = static_cast<double>(p);
    RankModelReport r;
    r.relevant_mean = rel / p0;
    r.irrelevant_mean = irr / (pd - p0);
    r.relevant_expected = (1.0 + p0) / 2.0;
    r.irrelevant_expected = (p0 + 1.0 + pd) / 2.0;
    r.relevant_deviation = std::abs(r.relevant_mean - r.relevant_expected) / r.relevant_expected;
    r.irrelevant_deviation = std::abs(r.irrelevant_mean - r.irrelevant_expected) / r.irrelevant_expected;
    return r;
}

nlohmann::json to_json(RankModelReport const& r)
{
    return {
        { "relevant_mean", r.relevant_mean },
        { "relevant_expected", r.relevant_expected },
        { "relevant_deviation", r.relevant_deviation },
        { "irrelevant_mean", r.irrelevant_mean },
        { "irrelevant_expected", r.irrelevant_expected },
        { "irrelevant_deviation", r.irrelevant_deviation },
    };
}

} // namespace pansr::panselect

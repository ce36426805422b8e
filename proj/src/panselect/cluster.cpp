#include "pansr/panselect/cluster.hpp"

#include "pansr/core/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

namespace pansr::panselect {

namespace {

void require_two(std::span<double const> values)
{
    if (values.size() < 2) {
        throw std::invalid_argument("two-cluster split needs at least two values");
    }
}

// Relabels so that group 0 has the smaller mean (or, on a tie, index 0).
TwoClusters finalize(std::span<double const> values, std::vector<int> labels)
{
    double sum[2] = { 0.0, 0.0 };
    double count[2] = { 0.0, 0.0 };
    for (std::size_t i = 0; i < values.size(); ++i) {
        sum[labels[i]] += values[i];
        count[labels[i]] += 1.0;
    }
    TwoClusters out;
    double const m0 = sum[0] / count[0];
    double const m1 = sum[1] / count[1];
    bool const swap = m1 < m0 || (m1 == m0 && labels[0] == 1);
    if (swap) {
        for (auto& l : labels) {
            l = 1 - l;
        }
    }
    out.means[0] = swap ? m1 : m0;
    out.means[1] = swap ? m0 : m1;
    out.degenerate = m0 == m1;
    out.labels = std::move(labels);
    return out;
}

// All values equal: the last index is split off, as the AHC tie-break would.
TwoClusters all_tied(std::size_t n)
{
    std::vector<int> labels(n, 0);
    labels.back() = 1;
    TwoClusters out;
    out.labels = std::move(labels);
    out.degenerate = true;
    return out;
}

bool constant(std::span<double const> values)
{
    auto const [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *lo == *hi;
}

} // namespace

std::string_view name_of(ClusterAlgo algo) noexcept
{
    switch (algo) {
    case ClusterAlgo::AHC:
        return "ahc";
    case ClusterAlgo::KMeans:
        return "kmeans";
    case ClusterAlgo::GMM:
        return "gmm";
    }
    return "ahc";
}

ClusterAlgo cluster_algo_from_name(std::string_view name)
{
    for (auto a : { ClusterAlgo::AHC, ClusterAlgo::KMeans, ClusterAlgo::GMM }) {
        if (name == name_of(a)) {
            return a;
        }
    }
    throw std::invalid_argument("unknown clustering algorithm: " + std::string(name));
}

TwoClusters ahc_two_cluster(std::span<double const> values)
{
    require_two(values);
    auto const n = values.size();
    // Work in value order so that equally close pairs are resolved by value,
    // not by column position. Equal values keep their index order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    // Slot s holds the cluster whose lowest sorted position is s.
    std::vector<double> dist(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            dist[a * n + b] = std::abs(values[order[a]] - values[order[b]]);
        }
    }
    std::vector<std::size_t> size(n, 1);
    std::vector<std::size_t> owner(n);
    std::vector<std::size_t> active(n);
    for (std::size_t s = 0; s < n; ++s) {
        owner[s] = s;
        active[s] = s;
    }
    while (active.size() > 2) {
        std::size_t best_a = 0;
        std::size_t best_b = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                double const d = dist[active[a] * n + active[b]];
                if (d < best) {
                    best = d;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        auto const keep = active[best_a];
        auto const gone = active[best_b];
        double const wk = static_cast<double>(size[keep]);
        double const wg = static_cast<double>(size[gone]);
        for (auto other : active) {
            if (other != keep && other != gone) {
                double const d = (wk * dist[keep * n + other] + wg * dist[gone * n + other]) / (wk + wg);
                dist[keep * n + other] = d;
                dist[other * n + keep] = d;
            }
        }
        size[keep] += size[gone];
        for (auto& o : owner) {
            if (o == gone) {
                o = keep;
            }
        }
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    }
    std::vector<int> labels(n);
    for (std::size_t s = 0; s < n; ++s) {
        labels[order[s]] = owner[s] == active[0] ? 0 : 1;
    }
    return finalize(values, std::move(labels));
}

TwoClusters kmeans_two_cluster(std::span<double const> values, std::uint64_t seed)
{
    require_two(values);
    if (constant(values)) {
        return all_tied(values.size());
    }
    Rng rng(seed);
    auto const n = values.size();
    double center[2];
    center[0] = values[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
    std::vector<double> weight(n);
    for (std::size_t i = 0; i < n; ++i) {
        weight[i] = (values[i] - center[0]) * (values[i] - center[0]);
    }
    center[1] = values[std::discrete_distribution<std::size_t>(weight.begin(), weight.end())(rng)];

    std::vector<int> labels(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        double sum[2] = { 0.0, 0.0 };
        double count[2] = { 0.0, 0.0 };
        for (std::size_t i = 0; i < n; ++i) {
            int const l = std::abs(values[i] - center[1]) < std::abs(values[i] - center[0]) ? 1 : 0;
            changed = changed || l != labels[i];
            labels[i] = l;
            sum[l] += values[i];
            count[l] += 1.0;
        }
        for (int c = 0; c < 2; ++c) {
            if (count[c] > 0.0) {
                center[c] = sum[c] / count[c];
            }
        }
        if (!changed) {
            break;
        }
    }
    return finalize(values, std::move(labels));
}

TwoClusters gmm_two_cluster(std::span<double const> values, std::uint64_t seed)
{
    auto start = kmeans_two_cluster(values, seed);
    if (start.degenerate) {
        return start;
    }
    auto const n = values.size();
    double mean_all = 0.0;
    for (double v : values) {
        mean_all += v;
    }
    mean_all /= static_cast<double>(n);
    double var_all = 0.0;
    for (double v : values) {
        var_all += (v - mean_all) * (v - mean_all);
    }
    var_all /= static_cast<double>(n);
    double const floor = 1e-6 * var_all + 1e-12;

    double mu[2] = { start.means[0], start.means[1] };
    double var[2] = { 0.0, 0.0 };
    double w[2] = { 0.0, 0.0 };
    for (std::size_t i = 0; i < n; ++i) {
        auto const l = start.labels[i];
        var[l] += (values[i] - mu[l]) * (values[i] - mu[l]);
        w[l] += 1.0;
    }
    for (int c = 0; c < 2; ++c) {
        var[c] = std::max(var[c] / w[c], floor);
        w[c] /= static_cast<double>(n);
    }

    std::vector<double> resp(n); // responsibility of component 1
    double previous = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter) {
        double loglik = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double lp[2];
            for (int c = 0; c < 2; ++c) {
                double const z = values[i] - mu[c];
                lp[c] = std::log(w[c]) - 0.5 * std::log(2.0 * std::numbers::pi * var[c]) - 0.5 * z * z / var[c];
            }
            double const top = std::max(lp[0], lp[1]);
            double const norm = top + std::log(std::exp(lp[0] - top) + std::exp(lp[1] - top));
            resp[i] = std::exp(lp[1] - norm);
            loglik += norm;
        }
        double r1 = 0.0;
        double s1 = 0.0;
        double s0 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            r1 += resp[i];
            s1 += resp[i] * values[i];
            s0 += (1.0 - resp[i]) * values[i];
        }
        double const r0 = static_cast<double>(n) - r1;
        if (r0 <= 0.0 || r1 <= 0.0) {
            break;
        }
        mu[0] = s0 / r0;
        mu[1] = s1 / r1;
        double v0 = 0.0;
        double v1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v0 += (1.0 - resp[i]) * (values[i] - mu[0]) * (values[i] - mu[0]);
            v1 += resp[i] * (values[i] - mu[1]) * (values[i] - mu[1]);
        }
        var[0] = std::max(v0 / r0, floor);
        var[1] = std::max(v1 / r1, floor);
        w[0] = r0 / static_cast<double>(n);
        w[1] = r1 / static_cast<double>(n);
        if (std::abs(loglik - previous) < 1e-10 * (1.0 + std::abs(loglik))) {
            break;
        }
        previous = loglik;
    }
    std::vector<int> labels(n);
    int count1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = resp[i] > 0.5 ? 1 : 0;
        count1 += labels[i];
    }
    if (count1 == 0 || count1 == static_cast<int>(n)) {
        return start; // one component swallowed everything
    }
    return finalize(values, std::move(labels));
}

TwoClusters two_cluster(ClusterAlgo algo, std::span<double const> values, std::uint64_t seed)
{
    switch (algo) {
    case ClusterAlgo::KMeans:
        return kmeans_two_cluster(values, seed);
    case ClusterAlgo::GMM:
        return gmm_two_cluster(values, seed);
    case ClusterAlgo::AHC:
        break;
    }
    return ahc_two_cluster(values);
}

} // namespace pansr::panselect

#include "random_graphs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace testutil {

using topoal::Adjacency;
using topoal::EdgeLength;
using topoal::Rng;
using topoal::SparseGraph;
using topoal::SpMat;

SparseGraph random_connected_graph(int n, int extra_edges, Rng& rng) {
    std::set<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v) {
        const int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(v)));
        edges.insert({std::min(u, v), std::max(u, v)});
    }
    int attempts = 0;
    while (static_cast<int>(edges.size()) < n - 1 + extra_edges && attempts < 50 * extra_edges) {
        ++attempts;
        const int a = rng.index(static_cast<std::size_t>(n));
        const int b = rng.index(static_cast<std::size_t>(n));
        if (a == b) continue;
        edges.insert({std::min(a, b), std::max(a, b)});
    }

    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& [a, b] : edges) {
        const double w = 0.5 + rng.uniform01();
        triplets.emplace_back(a, b, w);
        triplets.emplace_back(b, a, w);
    }
    SpMat w(n, n);
    w.setFromTriplets(triplets.begin(), triplets.end());
    return SparseGraph::from_weights(std::move(w));
}

Adjacency random_adjacency(int n, double p, Rng& rng) {
    std::vector<std::pair<int, int>> edges;
    std::vector<char> touched(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform01() < p) {
                edges.emplace_back(i, j);
                touched[static_cast<std::size_t>(i)] = touched[static_cast<std::size_t>(j)] = 1;
            }
    for (int v = 0; v < n; ++v) {
        if (touched[static_cast<std::size_t>(v)]) continue;
        int u = rng.index(static_cast<std::size_t>(n));
        while (u == v) u = rng.index(static_cast<std::size_t>(n));
        edges.emplace_back(std::min(u, v), std::max(u, v));
        touched[static_cast<std::size_t>(v)] = touched[static_cast<std::size_t>(u)] = 1;
    }
    return Adjacency::from_edges(n, edges);
}

std::vector<double> bellman_ford_multisource(const SparseGraph& g, std::span<const int> sources,
                                             EdgeLength lengths) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto edge_len = [&](double w) {
        switch (lengths) {
        case EdgeLength::unit: return 1.0;
        case EdgeLength::neg_log_weight: return -std::log(w);
        case EdgeLength::inverse_weight: return 1.0 / w;
        }
        return 1.0;
    };

    std::vector<double> best(static_cast<std::size_t>(g.n), inf);
    for (int s : sources) {
        std::vector<double> dist(static_cast<std::size_t>(g.n), inf);
        dist[static_cast<std::size_t>(s)] = 0.0;
        for (int round = 0; round < g.n; ++round) {
            bool changed = false;
            for (int v = 0; v < g.n; ++v) {
                if (dist[static_cast<std::size_t>(v)] == inf) continue;
                for (SpMat::InnerIterator it(g.weights, v); it; ++it) {
                    const double nd = dist[static_cast<std::size_t>(v)] + edge_len(it.value());
                    auto& du = dist[static_cast<std::size_t>(it.col())];
                    if (nd < du) {
                        du = nd;
                        changed = true;
                    }
                }
            }
            if (!changed) break;
        }
        for (int v = 0; v < g.n; ++v)
            best[static_cast<std::size_t>(v)] =
                std::min(best[static_cast<std::size_t>(v)], dist[static_cast<std::size_t>(v)]);
    }
    return best;
}

} // namespace testutil

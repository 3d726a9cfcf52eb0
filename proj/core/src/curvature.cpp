#include "topoal/curvature.hpp"

#include "topoal/errors.hpp"
#include "topoal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topoal {

namespace {

// Stamped membership marks, reused across calls to avoid clearing.
struct MarkSet {
    std::vector<unsigned> stamp;
    unsigned epoch = 0;

    void reset(int n) {
        if (stamp.size() < static_cast<std::size_t>(n)) stamp.assign(static_cast<std::size_t>(n), 0);
        ++epoch;
    }
    void add(int v) { stamp[static_cast<std::size_t>(v)] = epoch; }
    bool contains(int v) const { return stamp[static_cast<std::size_t>(v)] == epoch; }
};

struct PairScratch {
    MarkSet in_i;
    MarkSet in_j;
};

thread_local PairScratch scratch;

// Counts the nodes of one square side: k ranges over N1(a) \ (N1(b) ∪ {a,b});
// k participates iff it has a completing node w in (N1(k) ∩ N1(b)) \ N1(a)
// with w not in {a, b}. `in_a`/`in_b` mark N1(a)/N1(b).
int square_side(const Adjacency& adj, int a, int b, const MarkSet& in_a, const MarkSet& in_b,
                int& gamma_max) {
    int count = 0;
    for (int k : adj.neighbors_of(a)) {
        if (k == a || k == b || in_b.contains(k)) continue;
        int completions = 0;
        for (int w : adj.neighbors_of(k)) {
            if (w == a || w == b) continue;
            if (in_b.contains(w) && !in_a.contains(w)) ++completions;
        }
        if (completions > 0) {
            ++count;
            gamma_max = std::max(gamma_max, completions);
        }
    }
    return count;
}

} // namespace

NeighborhoodStats neighborhood_stats(const Adjacency& adj, int i, int j) {
    if (i == j) throw ParameterError("neighborhood_stats requires distinct nodes");
    if (i < 0 || j < 0 || i >= adj.n || j >= adj.n)
        throw ParameterError("neighborhood_stats node out of range");
    if (adj.degree(i) == 0 || adj.degree(j) == 0)
        throw std::domain_error("curvature undefined: node " +
                                std::to_string(adj.degree(i) == 0 ? i : j) + " is isolated");

    auto& s = scratch;
    s.in_i.reset(adj.n);
    s.in_j.reset(adj.n);
    for (int v : adj.neighbors_of(i)) s.in_i.add(v);
    for (int v : adj.neighbors_of(j)) s.in_j.add(v);

    NeighborhoodStats stats;
    for (int v : adj.neighbors_of(i))
        if (s.in_j.contains(v)) ++stats.tri;

    stats.sq_i = square_side(adj, i, j, s.in_i, s.in_j, stats.gamma_max);
    stats.sq_j = square_side(adj, j, i, s.in_j, s.in_i, stats.gamma_max);
    return stats;
}

double bfc_from_stats(const NeighborhoodStats& stats, int deg_i, int deg_j) {
    // Evaluated through max/min so the result is bitwise symmetric in (i, j).
    const double dmax = static_cast<double>(std::max(deg_i, deg_j));
    const double dmin = static_cast<double>(std::min(deg_i, deg_j));
    double ric = -2.0 + 2.0 / dmax + 2.0 / dmin + 2.0 * stats.tri / dmax + stats.tri / dmin;
    if (stats.gamma_max > 0)
        ric += (1.0 / stats.gamma_max) * (stats.sq_i + stats.sq_j) / dmax;
    return ric;
}

double bfc_pair(const Adjacency& adj, int i, int j) {
    const NeighborhoodStats stats = neighborhood_stats(adj, i, j);
    return bfc_from_stats(stats, adj.degree(i), adj.degree(j));
}

MinimaxPick bfc_minimax(const Adjacency& adj, std::span<const int> candidates,
                        std::span<const int> labeled, MinimaxCache& cache) {
    if (candidates.empty()) throw StateError("bfc_minimax: empty candidate set");
    if (labeled.empty()) throw StateError("bfc_minimax: empty labeled set");
    if (cache.best.size() != static_cast<std::size_t>(adj.n))
        throw StateError("bfc_minimax: cache size does not match the graph");
    if (cache.labeled_seen > labeled.size())
        throw StateError("bfc_minimax: labeled set shrank since the previous call");

    {
        MarkSet labeled_marks;
        labeled_marks.reset(adj.n);
        for (int v : labeled) labeled_marks.add(v);
        for (int c : candidates)
            if (labeled_marks.contains(c))
                throw StateError("bfc_minimax: candidates and labeled sets overlap");
    }

    const int count = static_cast<int>(candidates.size());
    for (std::size_t li = cache.labeled_seen; li < labeled.size(); ++li) {
        const int j = labeled[li];
        parallel_for(0, count, [&](int ci) {
            const int c = candidates[static_cast<std::size_t>(ci)];
            const double ric = bfc_pair(adj, c, j);
            double& best = cache.best[static_cast<std::size_t>(c)];
            if (ric > best) best = ric;
        });
    }
    cache.labeled_seen = labeled.size();

    // Sequential reduction keeps the lowest-index tie-break deterministic.
    MinimaxPick pick;
    pick.value = std::numeric_limits<double>::infinity();
    for (int c : candidates) {
        const double v = cache.best[static_cast<std::size_t>(c)];
        if (v < pick.value || (v == pick.value && c < pick.node)) {
            pick.value = v;
            pick.node = c;
        }
    }
    return pick;
}

std::vector<int> top_degree_pool(const SparseGraph& g, int r) {
    if (r < 1) throw ParameterError("reduction parameter must be >= 1");
    const int pool_size = static_cast<int>((static_cast<long long>(g.n) + r - 1) / r);

    std::vector<int> order(static_cast<std::size_t>(g.n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const int da = g.degrees[static_cast<std::size_t>(a)];
        const int db = g.degrees[static_cast<std::size_t>(b)];
        return da != db ? da > db : a < b;
    });
    order.resize(static_cast<std::size_t>(pool_size));
    std::sort(order.begin(), order.end());
    return order;
}

} // namespace topoal

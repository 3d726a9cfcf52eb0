#pragma once

#include "topoal/graph.hpp"

#include <limits>
#include <span>
#include <vector>

namespace topoal {

// Triangle and square counts around a node pair (i, j), computed on the
// binary adjacency only. For the square sets, a neighbor k of i (with
// k not in {i, j} and k not adjacent to j) participates iff some completing
// node w in N(k) ∩ N(j) exists with w outside N(i) ∪ {i, j}; gamma_max is
// the largest number of completing nodes over all participating k from
// either side, and 0 when there are no squares.
struct NeighborhoodStats {
    int tri = 0;
    int sq_i = 0;
    int sq_j = 0;
    int gamma_max = 0;
};

NeighborhoodStats neighborhood_stats(const Adjacency& adj, int i, int j);

// Balanced Forman Curvature between two nodes:
//
//   Ric(i,j) = -2 + 2/d_i + 2/d_j + 2|Δ|/max(d_i,d_j) + |Δ|/min(d_i,d_j)
//            + [γ_max > 0] (1/γ_max) (|□^i| + |□^j|) / max(d_i,d_j)
//
// Evaluated from the N1 sets whether or not the edge i~j exists, so pairs in
// different regions of the graph compare meaningfully. Symmetric in (i, j),
// always >= -2. Isolated endpoints make the curvature undefined
// (std::domain_error).
double bfc_pair(const Adjacency& adj, int i, int j);

double bfc_from_stats(const NeighborhoodStats& stats, int deg_i, int deg_j);

// Running per-candidate maxima for the incremental minimax scan: only
// columns for labeled nodes appended since the previous call are computed.
struct MinimaxCache {
    std::vector<double> best;
    std::size_t labeled_seen = 0;

    static MinimaxCache make(int n) {
        return MinimaxCache{std::vector<double>(static_cast<std::size_t>(n),
                                                -std::numeric_limits<double>::infinity()),
                            0};
    }
};

struct MinimaxPick {
    int node = -1;
    double value = 0.0;
};

// argmin over candidates of max over labeled of Ric(candidate, labeled).
// `labeled` must only grow by appending between calls on the same cache;
// candidates and labeled must be disjoint and nonempty. Ties break toward
// the lowest node index.
MinimaxPick bfc_minimax(const Adjacency& adj, std::span<const int> candidates,
                        std::span<const int> labeled, MinimaxCache& cache);

// The ceil(n/r) highest-degree nodes (ties toward the lowest index), sorted
// by node index.
std::vector<int> top_degree_pool(const SparseGraph& g, int r);

} // namespace topoal

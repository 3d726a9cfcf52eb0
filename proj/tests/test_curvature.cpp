#include "topoal/curvature.hpp"

#include "topoal/dataset.hpp"
#include "topoal/errors.hpp"
#include "bfc_oracle.hpp"
#include "random_graphs.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace topoal;

namespace {

Adjacency torus_grid(int side) {
    std::vector<std::pair<int, int>> edges;
    auto id = [side](int r, int c) { return ((r + side) % side) * side + (c + side) % side; };
    for (int r = 0; r < side; ++r)
        for (int c = 0; c < side; ++c) {
            edges.emplace_back(id(r, c), id(r, c + 1));
            edges.emplace_back(id(r, c), id(r + 1, c));
        }
    return Adjacency::from_edges(side * side, edges);
}

Adjacency triangle_bridge_triangle() {
    // Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
    return Adjacency::from_edges(
        6, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}, {2, 3}});
}

} // namespace

TEST_SUITE("curvature") {

TEST_CASE("neighborhood stats on canonical shapes") {
    SUBCASE("triangle") {
        const Adjacency k3 =
            Adjacency::from_edges(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}});
        const NeighborhoodStats s = neighborhood_stats(k3, 0, 1);
        CHECK(s.tri == 1);
        CHECK(s.sq_i == 0);
        CHECK(s.sq_j == 0);
        CHECK(s.gamma_max == 0);
    }
    SUBCASE("4-cycle") {
        const Adjacency c4 =
            Adjacency::from_edges(4, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {2, 3}, {3, 0}});
        const NeighborhoodStats s = neighborhood_stats(c4, 0, 1);
        CHECK(s.tri == 0);
        CHECK(s.sq_i == 1); // k = 3 completes through w = 2
        CHECK(s.sq_j == 1); // k = 2 completes through w = 3
        CHECK(s.gamma_max == 1);
    }
    SUBCASE("bare edge") {
        const Adjacency k2 = Adjacency::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}});
        const NeighborhoodStats s = neighborhood_stats(k2, 0, 1);
        CHECK(s.tri == 0);
        CHECK(s.sq_i + s.sq_j == 0);
        CHECK(s.gamma_max == 0);
    }
}

TEST_CASE("canonical curvature values") {
    const Adjacency k2 = Adjacency::from_edges(2, std::vector<std::pair<int, int>>{{0, 1}});
    CHECK(std::abs(bfc_pair(k2, 0, 1) - 2.0) <= 1e-12);

    const Adjacency k3 =
        Adjacency::from_edges(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}});
    CHECK(std::abs(bfc_pair(k3, 0, 1) - 1.5) <= 1e-12);

    const Adjacency torus = torus_grid(5);
    for (int v = 0; v < 25; ++v)
        for (int u : torus.neighbors_of(v))
            if (v < u) CHECK(std::abs(bfc_pair(torus, v, u)) <= 1e-12);

    const Adjacency bridge = triangle_bridge_triangle();
    CHECK(std::abs(bfc_pair(bridge, 2, 3) - (-2.0 / 3.0)) <= 1e-12);
}

TEST_CASE("isolated endpoints are a domain error") {
    SpMat w(3, 3);
    w.insert(0, 1) = 1.0;
    w.insert(1, 0) = 1.0;
    const Adjacency adj = Adjacency::from_structure(w);
    CHECK_THROWS_AS(neighborhood_stats(adj, 0, 2), std::domain_error);
    CHECK_THROWS_AS(bfc_pair(adj, 2, 0), std::domain_error);
}

TEST_CASE("exact symmetry on random pairs") {
    Rng rng(5);
    int checked = 0;
    while (checked < 1000) {
        const Adjacency adj = testutil::random_adjacency(40, 0.12, rng);
        for (int t = 0; t < 50 && checked < 1000; ++t) {
            const int i = rng.index(40);
            const int j = rng.index(40);
            if (i == j) continue;
            CHECK(bfc_pair(adj, i, j) == bfc_pair(adj, j, i));
            ++checked;
        }
    }
}

TEST_CASE("curvature never drops below -2") {
    Rng rng(6);
    for (int t = 0; t < 10; ++t) {
        const Adjacency adj = testutil::random_adjacency(30, 0.1 + 0.05 * t, rng);
        for (int i = 0; i < adj.n; ++i)
            for (int j = i + 1; j < adj.n; ++j) CHECK(bfc_pair(adj, i, j) >= -2.0);
    }
}

TEST_CASE("enumeration oracle equivalence on random graphs") {
    Rng rng(7);
    for (int seed = 0; seed < 20; ++seed) {
        const int n = 10 + static_cast<int>(rng.below(41)); // up to 50
        const double density = 0.05 + 0.25 * rng.uniform01();
        const Adjacency adj = testutil::random_adjacency(n, density, rng);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const NeighborhoodStats s = neighborhood_stats(adj, i, j);
                const oracle::Counts c = oracle::count_neighborhoods(adj, i, j);
                CHECK(s.tri == c.tri);
                CHECK(s.sq_i == c.sq_i);
                CHECK(s.sq_j == c.sq_j);
                CHECK(s.gamma_max == c.gamma_max);
                CHECK(std::abs(bfc_pair(adj, i, j) - oracle::bfc(adj, i, j)) <= 1e-12);
            }
    }
}

TEST_CASE("edgeless-neighborhood pairs reduce to the degree terms") {
    // Two far ends of a long path: no shared structure at all.
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < 10; ++i) edges.emplace_back(i, i + 1);
    const Adjacency path = Adjacency::from_edges(10, edges);
    const double ric = bfc_pair(path, 0, 9);
    CHECK(ric == doctest::Approx(-2.0 + 2.0 / 1 + 2.0 / 1));
    const double mid = bfc_pair(path, 2, 7);
    CHECK(mid == doctest::Approx(-2.0 + 2.0 / 2 + 2.0 / 2));
}

TEST_CASE("minimax returns the single candidate") {
    const Adjacency k3 =
        Adjacency::from_edges(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}});
    MinimaxCache cache = MinimaxCache::make(3);
    const int cands[] = {2};
    const int labeled[] = {0};
    const MinimaxPick pick = bfc_minimax(k3, cands, labeled, cache);
    CHECK(pick.node == 2);
}

TEST_CASE("minimax on blobs leaves the labeled cluster") {
    const Dataset d = make_blobs(150, 4, 0.15, 2);
    const SparseGraph g = build_knn_graph(d, 20, Metric::euclidean);

    const std::vector<int> labeled = {10}; // cluster 0
    std::vector<int> candidates;
    for (int v = 0; v < g.n; ++v)
        if (v != 10) candidates.push_back(v);

    MinimaxCache cache = MinimaxCache::make(g.n);
    const MinimaxPick pick = bfc_minimax(g.adj, candidates, labeled, cache);
    CHECK(d.cluster_ids[static_cast<std::size_t>(pick.node)] != 0);

    // Full pairwise scan oracle confirms the argmin.
    double best = 1e300;
    int best_node = -1;
    for (int c : candidates) {
        const double v = bfc_pair(g.adj, c, 10);
        if (v < best || (v == best && c < best_node)) {
            best = v;
            best_node = c;
        }
    }
    CHECK(pick.node == best_node);
    CHECK(pick.value == best);
}

TEST_CASE("incremental minimax equals recompute-from-scratch") {
    Rng rng(8);
    for (int t = 0; t < 5; ++t) {
        const int n = 30 + static_cast<int>(rng.below(71)); // up to 100
        const Adjacency adj = testutil::random_adjacency(n, 0.15, rng);

        std::vector<int> labeled = {rng.index(n)};
        std::vector<int> candidates;
        for (int v = 0; v < n; ++v)
            if (v != labeled[0]) candidates.push_back(v);

        MinimaxCache cache = MinimaxCache::make(n);
        for (int step = 0; step < 8 && candidates.size() > 1; ++step) {
            const MinimaxPick incremental = bfc_minimax(adj, candidates, labeled, cache);

            MinimaxCache fresh = MinimaxCache::make(n);
            const MinimaxPick scratch = bfc_minimax(adj, candidates, labeled, fresh);
            CHECK(incremental.node == scratch.node);
            CHECK(incremental.value == scratch.value);

            labeled.push_back(incremental.node);
            candidates.erase(
                std::find(candidates.begin(), candidates.end(), incremental.node));
        }
    }
}

TEST_CASE("minimax rejects empty or overlapping sets") {
    const Adjacency k3 =
        Adjacency::from_edges(3, std::vector<std::pair<int, int>>{{0, 1}, {1, 2}, {0, 2}});
    MinimaxCache cache = MinimaxCache::make(3);
    const int labeled[] = {0};
    CHECK_THROWS_AS(bfc_minimax(k3, {}, labeled, cache), StateError);
    const int overlap[] = {0, 1};
    CHECK_THROWS_AS(bfc_minimax(k3, overlap, labeled, cache), StateError);
}

TEST_CASE("top degree pool") {
    // Star graph: hub 0 plus 9 leaves.
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < 10; ++v) edges.emplace_back(0, v);
    SpMat w(10, 10);
    std::vector<Eigen::Triplet<double>> t;
    for (const auto& [a, b] : edges) {
        t.emplace_back(a, b, 1.0);
        t.emplace_back(b, a, 1.0);
    }
    w.setFromTriplets(t.begin(), t.end());
    const SparseGraph g = SparseGraph::from_weights(std::move(w));

    CHECK(top_degree_pool(g, 10) == std::vector<int>{0});
    CHECK(top_degree_pool(g, 1).size() == 10);
    for (int r = 1; r <= 12; ++r)
        CHECK(static_cast<int>(top_degree_pool(g, r).size()) == (10 + r - 1) / r);

    // Ties break toward the lowest index: all leaves have degree 1.
    CHECK(top_degree_pool(g, 5) == std::vector<int>{0, 1});
}

} // TEST_SUITE

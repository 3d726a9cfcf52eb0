#include "topoal/active.hpp"

#include "topoal/curvature.hpp"
#include "topoal/errors.hpp"
#include "random_graphs.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace topoal;

namespace {

SparseGraph unit_path(int n) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i + 1 < n; ++i) {
        t.emplace_back(i, i + 1, 1.0);
        t.emplace_back(i + 1, i, 1.0);
    }
    SpMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return SparseGraph::from_weights(std::move(m));
}

Solution solution_from(std::initializer_list<std::initializer_list<double>> rows) {
    Solution sol;
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.begin()->size());
    sol.scores.resize(r, c);
    int i = 0;
    for (const auto& row : rows) {
        int j = 0;
        for (double v : row) sol.scores(i, j++) = v;
        ++i;
    }
    return sol;
}

} // namespace

TEST_SUITE("active") {

TEST_CASE("margin uncertainty per row") {
    const Solution sol = solution_from({{1.0, 0.0, 0.0}, {0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}});
    const AcquisitionScores s = margin_uncertainty(sol);
    CHECK(s.scores[0] == doctest::Approx(1.0));
    CHECK(s.scores[1] == doctest::Approx(0.0));
    CHECK(s.scores[2] == doctest::Approx(0.2));
}

TEST_CASE("margin uncertainty needs two classes") {
    const Solution sol = solution_from({{1.0}, {0.3}});
    CHECK_THROWS_AS(margin_uncertainty(sol), ParameterError);
}

TEST_CASE("margin argmin is invariant under positive affine transforms of U") {
    Rng rng(1);
    Solution sol;
    sol.scores = Eigen::MatrixXd::Random(12, 4);
    const AcquisitionScores base = margin_uncertainty(sol);

    Solution transformed;
    transformed.scores = 3.5 * sol.scores.array() + 4.0;
    const AcquisitionScores moved = margin_uncertainty(transformed);

    // Row shifts cancel, positive scaling scales the margins.
    for (int i = 0; i < 12; ++i)
        CHECK(moved.scores[i] == doctest::Approx(3.5 * base.scores[i]).epsilon(1e-12));

    int argmin_base = 0, argmin_moved = 0;
    for (int i = 1; i < 12; ++i) {
        if (base.scores[i] < base.scores[argmin_base]) argmin_base = i;
        if (moved.scores[i] < moved.scores[argmin_moved]) argmin_moved = i;
    }
    CHECK(argmin_base == argmin_moved);
}

TEST_CASE("min norm per row") {
    const Solution sol = solution_from({{0.0, 0.0}, {1.0, 0.0}, {3.0, 4.0}});
    const AcquisitionScores s = min_norm(sol);
    CHECK(s.scores[0] == doctest::Approx(0.0));
    CHECK(s.scores[1] == doctest::Approx(1.0));
    CHECK(s.scores[2] == doctest::Approx(5.0));
}

TEST_CASE("laplace on the unit path: middle node has the smallest margin") {
    const SparseGraph g = unit_path(3);
    const LaplacianOperator op = laplacian(g);
    const LabelMatrix lm = LabelMatrix::make(3, 2, std::vector<int>{0, 2}, std::vector<int>{0, 1});
    const Solution sol = laplace_learn(op, lm);
    const AcquisitionScores s = margin_uncertainty(sol);
    CHECK(s.scores[1] < s.scores[0]);
    CHECK(s.scores[1] < s.scores[2]);
}

TEST_CASE("al_loop with zero budget trains once on the coreset") {
    Rng graph_rng(2);
    const SparseGraph g = testutil::random_connected_graph(20, 30, graph_rng);
    const LaplacianOperator op = laplacian(g);
    std::vector<int> truth(20, 0);
    for (int v = 10; v < 20; ++v) truth[static_cast<std::size_t>(v)] = 1;
    Oracle oracle(truth);

    auto clf = make_laplace_classifier(op);
    ALOptions opt;
    opt.budget = 0;
    Rng rng(3);
    const int initial[] = {0, 15};
    const ALState state = al_loop(*clf, 20, 2, initial, oracle, opt, rng);
    CHECK(state.history.size() == 1);
    CHECK(state.history[0].labels_count == 2);
    CHECK(oracle.queries() == 2);
}

TEST_CASE("al_loop never re-acquires and counts oracle queries") {
    Rng graph_rng(4);
    const SparseGraph g = testutil::random_connected_graph(40, 80, graph_rng);
    const LaplacianOperator op = laplacian(g);
    Rng label_rng(5);
    std::vector<int> truth(40);
    for (int v = 0; v < 40; ++v) truth[static_cast<std::size_t>(v)] = v < 2 ? v : label_rng.index(2);
    Oracle oracle(truth);

    auto clf = make_laplace_classifier(op);
    ALOptions opt;
    opt.budget = 25;
    Rng rng(6);
    const int initial[] = {0, 1};
    const ALState state = al_loop(*clf, 40, 2, initial, oracle, opt, rng);

    CHECK(state.history.size() == 26);
    const std::set<int> unique(state.labeled.begin(), state.labeled.end());
    CHECK(unique.size() == state.labeled.size());
    CHECK(state.labeled.size() == 27);
    CHECK(oracle.queries() == 2 + 25);
    for (std::size_t i = 1; i < state.history.size(); ++i)
        CHECK(state.history[i].labels_count == state.history[i - 1].labels_count + 1);
}

TEST_CASE("al_loop replay determinism") {
    Rng graph_rng(7);
    const SparseGraph g = testutil::random_connected_graph(30, 60, graph_rng);
    const LaplacianOperator op = laplacian(g);
    std::vector<int> truth(30);
    for (int v = 0; v < 30; ++v) truth[static_cast<std::size_t>(v)] = v % 2;

    auto run_once = [&]() {
        Oracle oracle(truth);
        auto clf = make_laplace_classifier(op);
        ALOptions opt;
        opt.budget = 10;
        opt.measure_time = false;
        Rng rng(11);
        const int initial[] = {0, 1};
        return al_loop(*clf, 30, 2, initial, oracle, opt, rng);
    };
    const ALState a = run_once();
    const ALState b = run_once();
    CHECK(a.labeled == b.labeled);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].accuracy == b.history[i].accuracy);
        CHECK(a.history[i].labels_count == b.history[i].labels_count);
    }
}

TEST_CASE("curvature tau schedule: boundary equality does not switch") {
    // Two far ends of a path with degree 1 = k: Ric = -2 + 4/k exactly.
    const SparseGraph g = unit_path(10);
    ALState state;
    state.labeled = {0};
    state.tau = 0.1;
    const double ric = curvature_tau_schedule(state, g.adj, 9, 1);
    CHECK(ric == doctest::Approx(-2.0 + 4.0 / 1.0));
    CHECK_FALSE(state.tau_frozen);
    CHECK(state.tau == 0.1);
}

TEST_CASE("curvature tau schedule: clique acquisition switches") {
    // K5: acquiring next to a labeled node inside a clique of size k+1.
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j) edges.emplace_back(i, j);
    SpMat w(5, 5);
    std::vector<Eigen::Triplet<double>> t;
    for (auto [a, b] : edges) {
        t.emplace_back(a, b, 1.0);
        t.emplace_back(b, a, 1.0);
    }
    w.setFromTriplets(t.begin(), t.end());
    const SparseGraph g = SparseGraph::from_weights(std::move(w));

    ALState state;
    state.labeled = {0};
    state.tau = 0.1;
    const double ric = curvature_tau_schedule(state, g.adj, 1, 4);
    CHECK(ric > -2.0 + 4.0 / 4.0);
    CHECK(state.tau_frozen);
    CHECK(state.tau == 0.0);

    // The switch is one-way: later low-curvature acquisitions keep tau at 0.
    state.labeled.push_back(1);
    curvature_tau_schedule(state, g.adj, 2, 4);
    CHECK(state.tau == 0.0);
    CHECK(state.tau_frozen);
}

} // TEST_SUITE

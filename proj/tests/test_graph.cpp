#include "topoal/graph.hpp"

#include "topoal/dataset.hpp"
#include "topoal/errors.hpp"
#include "random_graphs.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace topoal;

namespace {

Dataset points_dataset(std::initializer_list<std::pair<double, double>> pts) {
    Dataset d;
    d.points.resize(static_cast<Eigen::Index>(pts.size()), 2);
    Eigen::Index row = 0;
    for (const auto& [x, y] : pts) {
        d.points(row, 0) = x;
        d.points(row, 1) = y;
        ++row;
    }
    return d;
}

SparseGraph path_graph(int n, double w = 1.0) {
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i + 1 < n; ++i) {
        t.emplace_back(i, i + 1, w);
        t.emplace_back(i + 1, i, w);
    }
    SpMat m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    return SparseGraph::from_weights(std::move(m));
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_SUITE("graph") {

TEST_CASE("two distinct points, k=1: single edge of weight exp(-4)") {
    const Dataset d = points_dataset({{0.0, 0.0}, {1.0, 0.0}});
    const SparseGraph g = build_knn_graph(d, 1, Metric::euclidean);
    CHECK(g.n == 2);
    CHECK(g.weights.nonZeros() == 2);
    CHECK(g.weights.coeff(0, 1) == doctest::Approx(std::exp(-4.0)).epsilon(1e-14));
}

TEST_CASE("three collinear points at 0, 1, 3 with k=1") {
    const Dataset d = points_dataset({{0.0, 0.0}, {1.0, 0.0}, {3.0, 0.0}});
    const SparseGraph g = build_knn_graph(d, 1, Metric::euclidean);
    const double e4 = std::exp(-4.0);
    CHECK(g.weights.coeff(0, 1) == doctest::Approx(e4).epsilon(1e-14));
    CHECK(g.weights.coeff(1, 2) == doctest::Approx(e4 / 2.0).epsilon(1e-14));
    CHECK(g.weights.coeff(0, 2) == 0.0);
}

TEST_CASE("blobs at k=25: every degree at least k") {
    const Dataset d = make_blobs(300, 8, 0.17, 0);
    const SparseGraph g = build_knn_graph(d, 25, Metric::euclidean);
    for (int v = 0; v < g.n; ++v) CHECK(g.degrees[static_cast<std::size_t>(v)] >= 25);
}

TEST_CASE("kNN rejects k >= n") {
    const Dataset d = points_dataset({{0.0, 0.0}, {1.0, 0.0}});
    CHECK_THROWS_AS(build_knn_graph(d, 2, Metric::euclidean), ParameterError);
}

TEST_CASE("duplicate points get weight 1") {
    const Dataset d = points_dataset({{0.0, 0.0}, {0.0, 0.0}, {5.0, 5.0}});
    const SparseGraph g = build_knn_graph(d, 1, Metric::euclidean);
    CHECK(g.weights.coeff(0, 1) == 1.0);
}

TEST_CASE("angular metric matches euclidean on prenormalized data") {
    Dataset d = points_dataset({{2.0, 0.0}, {0.0, 3.0}, {-4.0, 0.0}, {1.0, 1.0}});
    const SparseGraph ga = build_knn_graph(d, 2, Metric::angular);
    for (Eigen::Index i = 0; i < d.points.rows(); ++i) d.points.row(i).normalize();
    const SparseGraph ge = build_knn_graph(d, 2, Metric::euclidean);
    CHECK(SpMat(ga.weights - ge.weights).norm() == doctest::Approx(0.0));
}

TEST_CASE("weight matrix is bitwise symmetric") {
    const Dataset d = make_blobs(50, 4, 0.2, 3);
    const SparseGraph g = build_knn_graph(d, 7, Metric::euclidean);
    for (int i = 0; i < g.n; ++i)
        for (SpMat::InnerIterator it(g.weights, i); it; ++it)
            CHECK(g.weights.coeff(static_cast<int>(it.col()), i) == it.value());
}

TEST_CASE("laplacian of a single unit edge") {
    const SparseGraph g = path_graph(2);
    const LaplacianOperator op = laplacian(g);
    const Eigen::MatrixXd m = Eigen::MatrixXd(op.matrix());
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == -1.0);
    CHECK(m(1, 0) == -1.0);
    CHECK(m(1, 1) == 1.0);
    CHECK(op.provenance() == Provenance::base);
}

TEST_CASE("laplacian of the empty graph is zero") {
    SpMat w(3, 3);
    const SparseGraph g = SparseGraph::from_weights(std::move(w));
    CHECK(laplacian(g).matrix().nonZeros() == 3); // explicit zero diagonal rows
    CHECK(Eigen::MatrixXd(laplacian(g).matrix()).norm() == 0.0);
}

TEST_CASE("path laplacian has zero row sums and middle degree 2") {
    const SparseGraph g = path_graph(3);
    const Eigen::MatrixXd m = Eigen::MatrixXd(laplacian(g).matrix());
    CHECK(m(1, 1) == 2.0);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(m.row(i).sum()) <= 1e-12);
}

TEST_CASE("laplacian row sums vanish on weighted random graphs") {
    Rng rng(11);
    for (int t = 0; t < 5; ++t) {
        const SparseGraph g = testutil::random_connected_graph(40, 60, rng);
        const Eigen::MatrixXd m = Eigen::MatrixXd(laplacian(g).matrix());
        for (int i = 0; i < g.n; ++i) {
            const double scale = std::max(1.0, m(i, i));
            CHECK(std::abs(m.row(i).sum()) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("laplacian is PSD under random Rayleigh quotients") {
    Rng rng(12);
    const SparseGraph g = testutil::random_connected_graph(60, 90, rng);
    const LaplacianOperator op = laplacian(g);
    for (int t = 0; t < 50; ++t) {
        Eigen::MatrixXd x(g.n, 1);
        for (int i = 0; i < g.n; ++i) x(i, 0) = rng.normal();
        Eigen::MatrixXd y;
        op.apply(x, y);
        const double rayleigh = (x.col(0).dot(y.col(0))) / x.col(0).squaredNorm();
        CHECK(rayleigh >= -1e-10);
    }
}

TEST_CASE("localized weights: full set is identity, empty set is zero") {
    Rng rng(13);
    const SparseGraph g = testutil::random_connected_graph(30, 40, rng);
    std::vector<int> all(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) all[static_cast<std::size_t>(i)] = i;
    CHECK(SpMat(localized_weights(g, all) - g.weights).norm() == 0.0);
    CHECK(localized_weights(g, {}).nonZeros() == 0);
}

TEST_CASE("localized weights on a path keep only edges touching the set") {
    const SparseGraph g = path_graph(3);
    const int s[] = {0};
    const SpMat w = localized_weights(g, s);
    CHECK(w.coeff(0, 1) == 1.0);
    CHECK(w.coeff(1, 0) == 1.0);
    CHECK(w.coeff(1, 2) == 0.0);
    CHECK(w.coeff(2, 1) == 0.0);
}

TEST_CASE("localized weights are entrywise bounded by W and exact on the set") {
    Rng rng(14);
    const SparseGraph g = testutil::random_connected_graph(25, 30, rng);
    const int s[] = {3, 7, 11};
    const SpMat w = localized_weights(g, s);
    for (int i = 0; i < g.n; ++i)
        for (SpMat::InnerIterator it(w, i); it; ++it) {
            CHECK(it.value() <= g.weights.coeff(i, static_cast<int>(it.col())));
            CHECK(it.value() >= 0.0);
        }
    for (int i : s)
        for (SpMat::InnerIterator it(g.weights, i); it; ++it)
            CHECK(w.coeff(i, static_cast<int>(it.col())) == it.value());
}

TEST_CASE("localized laplacian power: p=1 with all nodes equals the laplacian") {
    Rng rng(15);
    const SparseGraph g = testutil::random_connected_graph(20, 25, rng);
    std::vector<int> all(static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) all[static_cast<std::size_t>(i)] = i;
    const SpMat diff = SpMat(localized_laplacian_power(g, all, 1).matrix() -
                             laplacian(g).matrix());
    CHECK(diff.norm() == 0.0);
}

TEST_CASE("localized laplacian power on a path with the middle node") {
    // Both edges touch node 1, so (L^S)^2 equals the squared full laplacian.
    const SparseGraph g = path_graph(3);
    const int s[] = {1};
    const Eigen::MatrixXd lhs = Eigen::MatrixXd(localized_laplacian_power(g, s, 2).matrix());
    const Eigen::MatrixXd full = Eigen::MatrixXd(laplacian(g).matrix());
    CHECK((lhs - full * full).norm() <= 1e-14);
}

TEST_CASE("localized laplacian powers annihilate constants") {
    Rng rng(16);
    const SparseGraph g = testutil::random_connected_graph(30, 45, rng);
    const int s[] = {2, 9};
    const LaplacianOperator op = localized_laplacian_power(g, s, 2);
    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(g.n, 1);
    Eigen::MatrixXd y;
    op.apply(ones, y);
    CHECK(y.norm() <= 1e-12);
}

TEST_CASE("operator power: squared edge laplacian") {
    const SparseGraph g = path_graph(2);
    const Eigen::MatrixXd m2 = Eigen::MatrixXd(operator_power(laplacian(g), 2).matrix());
    CHECK(m2(0, 0) == 2.0);
    CHECK(m2(0, 1) == -2.0);
    CHECK(m2(1, 1) == 2.0);
}

TEST_CASE("operator power matches dense eigenvalue powers") {
    Rng rng(17);
    const SparseGraph g = testutil::random_connected_graph(5, 4, rng);
    const LaplacianOperator op = laplacian(g);
    for (int p : {1, 2, 3}) {
        const Eigen::MatrixXd mp = Eigen::MatrixXd(operator_power(op, p).matrix());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> base(Eigen::MatrixXd(op.matrix()));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> powered(mp);
        for (int e = 0; e < 5; ++e) {
            const double expected = std::pow(base.eigenvalues()[e], p);
            CHECK(powered.eigenvalues()[e] == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("operator power enforces the nnz budget") {
    Rng rng(18);
    const SparseGraph g = testutil::random_connected_graph(50, 200, rng);
    CHECK_THROWS_AS(operator_power(laplacian(g), 4, 100), ResourceError);
}

TEST_CASE("dijkstra basics") {
    const SparseGraph g = path_graph(3);
    const int src[] = {0};
    const auto dist = dijkstra_multisource(g, src);
    CHECK(dist[0] == 0.0);
    CHECK(dist[1] == 1.0);
    CHECK(dist[2] == 2.0);
}

TEST_CASE("disconnected nodes are unreachable") {
    SpMat w(3, 3);
    w.insert(0, 1) = 1.0;
    w.insert(1, 0) = 1.0;
    const SparseGraph g = SparseGraph::from_weights(std::move(w));
    const int src[] = {0};
    const auto dist = dijkstra_multisource(g, src);
    CHECK(std::isinf(dist[2]));
}

TEST_CASE("multisource dijkstra equals min over single sources (oracle)") {
    Rng rng(19);
    for (int t = 0; t < 6; ++t) {
        const SparseGraph g = testutil::random_connected_graph(50, 70, rng);
        std::vector<int> sources;
        const int count = 1 + rng.index(4);
        for (int s = 0; s < count; ++s) sources.push_back(rng.index(50));
        for (EdgeLength mode : {EdgeLength::unit, EdgeLength::inverse_weight}) {
            const auto dist = dijkstra_multisource(g, sources, mode);
            const auto expected = testutil::bellman_ford_multisource(g, sources, mode);
            for (int v = 0; v < g.n; ++v)
                CHECK(dist[static_cast<std::size_t>(v)] ==
                      doctest::Approx(expected[static_cast<std::size_t>(v)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("dijkstra ball uses the strict radius") {
    const SparseGraph g = path_graph(5);
    CHECK(dijkstra_ball(g, 0, 1.0) == std::vector<int>{0});
    CHECK(dijkstra_ball(g, 0, 2.0) == std::vector<int>{0, 1});
    CHECK(dijkstra_ball(g, 2, 2.0) == std::vector<int>{1, 2, 3});
}

TEST_CASE("graph save/load round-trips weights") {
    Rng rng(20);
    const SparseGraph g = testutil::random_connected_graph(30, 40, rng);
    const std::string path = temp_path("topoal_graph_roundtrip.txt");
    save_graph(g, path);
    const SparseGraph loaded = load_graph(path);
    REQUIRE(loaded.n == g.n);
    REQUIRE(loaded.weights.nonZeros() == g.weights.nonZeros());
    for (int i = 0; i < g.n; ++i)
        for (SpMat::InnerIterator it(g.weights, i); it; ++it) {
            const double lw = loaded.weights.coeff(i, static_cast<int>(it.col()));
            CHECK(std::abs(lw - it.value()) <= 1e-15 * std::abs(it.value()));
        }
    std::remove(path.c_str());
}

TEST_CASE("from_weights rejects asymmetric and self-loop matrices") {
    SpMat w(2, 2);
    w.insert(0, 1) = 1.0;
    CHECK_THROWS_AS(SparseGraph::from_weights(w), ParameterError);

    SpMat w2(2, 2);
    w2.insert(0, 0) = 1.0;
    CHECK_THROWS_AS(SparseGraph::from_weights(w2), ParameterError);
}

} // TEST_SUITE

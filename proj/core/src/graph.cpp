#include "topoal/graph.hpp"

#include "topoal/errors.hpp"
#include "topoal/format.hpp"
#include "topoal/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

namespace topoal {

bool Adjacency::has_edge(int i, int j) const {
    const auto nb = neighbors_of(i);
    return std::binary_search(nb.begin(), nb.end(), j);
}

Adjacency Adjacency::from_edges(int n, std::span<const std::pair<int, int>> edges) {
    std::vector<std::pair<int, int>> directed;
    directed.reserve(edges.size() * 2);
    for (const auto& [a, b] : edges) {
        if (a == b) throw ParameterError("adjacency cannot contain self loops");
        if (a < 0 || b < 0 || a >= n || b >= n)
            throw ParameterError("adjacency edge endpoint out of range");
        directed.emplace_back(a, b);
        directed.emplace_back(b, a);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

    Adjacency adj;
    adj.n = n;
    adj.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    adj.neighbors.reserve(directed.size());
    for (const auto& [a, b] : directed) {
        ++adj.offsets[static_cast<std::size_t>(a) + 1];
        adj.neighbors.push_back(b);
    }
    for (int i = 0; i < n; ++i) adj.offsets[static_cast<std::size_t>(i) + 1] += adj.offsets[i];
    return adj;
}

Adjacency Adjacency::from_structure(const SpMat& w) {
    Adjacency adj;
    adj.n = static_cast<int>(w.rows());
    adj.offsets.assign(static_cast<std::size_t>(adj.n) + 1, 0);
    adj.neighbors.reserve(static_cast<std::size_t>(w.nonZeros()));
    for (int i = 0; i < adj.n; ++i) {
        for (SpMat::InnerIterator it(w, i); it; ++it) {
            if (it.value() != 0.0 && it.col() != i) adj.neighbors.push_back(static_cast<int>(it.col()));
        }
        adj.offsets[static_cast<std::size_t>(i) + 1] = static_cast<int>(adj.neighbors.size());
    }
    return adj;
}

SparseGraph SparseGraph::from_weights(SpMat w) {
    if (w.rows() != w.cols()) throw ParameterError("weight matrix must be square");
    w.prune(0.0, 0.0);
    w.makeCompressed();

    const int n = static_cast<int>(w.rows());
    for (int i = 0; i < n; ++i) {
        for (SpMat::InnerIterator it(w, i); it; ++it) {
            if (it.col() == i && it.value() != 0.0)
                throw ParameterError("weight matrix has a nonzero diagonal entry");
            if (it.value() < 0.0) throw ParameterError("weights must be nonnegative");
            if (!std::isfinite(it.value())) throw ParameterError("weights must be finite");
            if (w.coeff(static_cast<int>(it.col()), i) != it.value())
                throw ParameterError("weight matrix is not exactly symmetric");
        }
    }

    SparseGraph g;
    g.n = n;
    g.weights = std::move(w);
    g.adj = Adjacency::from_structure(g.weights);
    g.degrees.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) g.degrees[static_cast<std::size_t>(i)] = g.adj.degree(i);
    return g;
}

SparseGraph build_knn_graph(const Dataset& data, int k, Metric metric) {
    data.validate();
    const int n = data.n();
    if (k < 1) throw ParameterError("k must be positive");
    if (k >= n) throw ParameterError("k = " + std::to_string(k) +
                                     " must be smaller than the point count " + std::to_string(n));

    Eigen::MatrixXd pts = data.points;
    if (metric == Metric::angular) {
        for (Eigen::Index i = 0; i < pts.rows(); ++i) {
            const double norm = pts.row(i).norm();
            if (norm > 0.0) pts.row(i) /= norm;
        }
    }

    // Directed kNN edges per query point: k smallest by (distance, index).
    std::vector<std::vector<std::pair<int, double>>> out_edges(static_cast<std::size_t>(n));
    parallel_for(0, n, [&](int i) {
        std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n - 1));
        int slot = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double d2 = (pts.row(i) - pts.row(j)).squaredNorm();
            dist[static_cast<std::size_t>(slot++)] = {d2, j};
        }
        std::nth_element(dist.begin(), dist.begin() + (k - 1), dist.end());
        std::sort(dist.begin(), dist.begin() + k);

        const double dk2 = dist[static_cast<std::size_t>(k - 1)].first;
        auto& edges = out_edges[static_cast<std::size_t>(i)];
        edges.resize(static_cast<std::size_t>(k));
        for (int m = 0; m < k; ++m) {
            const auto [d2, j] = dist[static_cast<std::size_t>(m)];
            // dk2 == 0 means the k nearest neighbors are exact duplicates;
            // the kernel limit there is 1.
            const double w = dk2 == 0.0 ? 1.0 : std::exp(-4.0 * d2 / dk2);
            edges[static_cast<std::size_t>(m)] = {j, w};
        }
    });

    // Symmetrize: each unordered pair gets (w_ij + w_ji)/2, assigned to both
    // triangle entries so W is bitwise symmetric.
    std::vector<std::pair<std::pair<int, int>, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    for (int i = 0; i < n; ++i)
        for (const auto& [j, w] : out_edges[static_cast<std::size_t>(i)])
            pairs.push_back({{std::min(i, j), std::max(i, j)}, w});
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(pairs.size() * 2);
    std::size_t p = 0;
    while (p < pairs.size()) {
        const auto key = pairs[p].first;
        double sum = 0.0;
        while (p < pairs.size() && pairs[p].first == key) sum += pairs[p++].second;
        const double w = sum / 2.0;
        triplets.emplace_back(key.first, key.second, w);
        triplets.emplace_back(key.second, key.first, w);
    }

    SpMat w(n, n);
    w.setFromTriplets(triplets.begin(), triplets.end());
    return SparseGraph::from_weights(std::move(w));
}

LaplacianOperator LaplacianOperator::from_matrix(SpMat m, Provenance provenance) {
    if (m.rows() != m.cols()) throw ParameterError("operator matrix must be square");
    LaplacianOperator op;
    op.explicit_ = true;
    op.n_ = static_cast<int>(m.rows());
    op.provenance_ = provenance;
    op.matrix_ = std::move(m);
    op.matrix_.makeCompressed();
    return op;
}

LaplacianOperator LaplacianOperator::from_terms(std::vector<Term> terms) {
    if (terms.empty()) throw ParameterError("matrix-free operator needs at least one term");
    LaplacianOperator op;
    op.explicit_ = false;
    op.n_ = static_cast<int>(terms.front().laplacian.rows());
    op.provenance_ = Provenance::multiscale;
    for (const auto& t : terms) {
        if (static_cast<int>(t.laplacian.rows()) != op.n_ ||
            static_cast<int>(t.laplacian.cols()) != op.n_)
            throw ParameterError("matrix-free terms must share the same size");
        if (t.power < 1) throw ParameterError("term powers must be positive");
        if (t.weight <= 0) throw ParameterError("term weights must be positive");
    }
    op.terms_ = std::move(terms);
    return op;
}

const SpMat& LaplacianOperator::matrix() const {
    if (!explicit_) throw StateError("operator is matrix-free; no explicit matrix available");
    return matrix_;
}

void LaplacianOperator::apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& y) const {
    if (explicit_) {
        y.noalias() = matrix_ * x;
        return;
    }
    y.setZero(x.rows(), x.cols());
    Eigen::MatrixXd tmp;
    for (const auto& t : terms_) {
        tmp = x;
        for (int p = 0; p < t.power; ++p) tmp = t.laplacian * tmp;
        y += t.weight * tmp;
    }
}

Eigen::VectorXd LaplacianOperator::diagonal() const {
    if (explicit_) return matrix_.diagonal();
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n_);
    for (const auto& t : terms_) {
        if (t.power == 1) {
            diag += t.weight * t.laplacian.diagonal();
        } else if (t.power == 2) {
            // (L^2)_ii = sum_j L_ij^2 for symmetric L.
            for (int i = 0; i < n_; ++i) {
                double s = 0.0;
                for (SpMat::InnerIterator it(t.laplacian, i); it; ++it)
                    s += it.value() * it.value();
                diag[i] += t.weight * s;
            }
        } else {
            return Eigen::VectorXd(); // not cheaply available
        }
    }
    return diag;
}

namespace {

std::vector<int> components_of_structures(int n, std::span<const SpMat* const> mats) {
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    std::vector<int> stack;
    int next = 0;
    for (int s = 0; s < n; ++s) {
        if (label[static_cast<std::size_t>(s)] != -1) continue;
        label[static_cast<std::size_t>(s)] = next;
        stack.assign(1, s);
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (const SpMat* m : mats) {
                for (SpMat::InnerIterator it(*m, v); it; ++it) {
                    const int u = static_cast<int>(it.col());
                    if (u == v || it.value() == 0.0) continue;
                    if (label[static_cast<std::size_t>(u)] == -1) {
                        label[static_cast<std::size_t>(u)] = next;
                        stack.push_back(u);
                    }
                }
            }
        }
        ++next;
    }
    return label;
}

} // namespace

std::vector<int> LaplacianOperator::component_labels() const {
    std::vector<const SpMat*> mats;
    if (explicit_) {
        mats.push_back(&matrix_);
    } else {
        for (const auto& t : terms_) mats.push_back(&t.laplacian);
    }
    return components_of_structures(n_, mats);
}

LaplacianOperator laplacian(const SparseGraph& g) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(g.weights.nonZeros()) + static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        double row_sum = 0.0;
        for (SpMat::InnerIterator it(g.weights, i); it; ++it) {
            row_sum += it.value();
            triplets.emplace_back(i, static_cast<int>(it.col()), -it.value());
        }
        triplets.emplace_back(i, i, row_sum);
    }
    SpMat m(g.n, g.n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return LaplacianOperator::from_matrix(std::move(m), Provenance::base);
}

SpMat localized_weights(const SparseGraph& g, std::span<const int> nodes) {
    std::vector<char> in_set(static_cast<std::size_t>(g.n), 0);
    for (int v : nodes) {
        if (v < 0 || v >= g.n) throw ParameterError("localized_weights node out of range");
        in_set[static_cast<std::size_t>(v)] = 1;
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (int i = 0; i < g.n; ++i) {
        for (SpMat::InnerIterator it(g.weights, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            if (in_set[static_cast<std::size_t>(i)] || in_set[static_cast<std::size_t>(j)])
                triplets.emplace_back(i, j, it.value());
        }
    }
    SpMat w(g.n, g.n);
    w.setFromTriplets(triplets.begin(), triplets.end());
    return w;
}

namespace {

SpMat laplacian_of(const SpMat& w) {
    const int n = static_cast<int>(w.rows());
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(w.nonZeros()) + static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (SpMat::InnerIterator it(w, i); it; ++it) {
            row_sum += it.value();
            triplets.emplace_back(i, static_cast<int>(it.col()), -it.value());
        }
        if (row_sum != 0.0) triplets.emplace_back(i, i, row_sum);
    }
    SpMat m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

SpMat sparse_power(const SpMat& m, int power, std::size_t nnz_budget) {
    SpMat result = m;
    for (int p = 1; p < power; ++p) {
        SpMat next = (result * m).pruned();
        if (static_cast<std::size_t>(next.nonZeros()) > nnz_budget)
            throw ResourceError("operator power exceeded the nnz budget of " +
                                std::to_string(nnz_budget) + " (got " +
                                std::to_string(next.nonZeros()) + " nonzeros)");
        result = std::move(next);
    }
    result.makeCompressed();
    return result;
}

} // namespace

LaplacianOperator localized_laplacian_power(const SparseGraph& g, std::span<const int> nodes,
                                            int power) {
    if (power < 1) throw ParameterError("power must be >= 1");
    const SpMat local = laplacian_of(localized_weights(g, nodes));
    return LaplacianOperator::from_matrix(sparse_power(local, power, kDefaultNnzBudget),
                                          power == 1 ? Provenance::base : Provenance::multiscale);
}

LaplacianOperator operator_power(const LaplacianOperator& op, int power, std::size_t nnz_budget) {
    if (power < 1) throw ParameterError("power must be >= 1");
    if (power == 1) return op;
    return LaplacianOperator::from_matrix(sparse_power(op.matrix(), power, nnz_budget),
                                          Provenance::multiscale);
}

namespace {

double edge_length_of(double weight, EdgeLength mode) {
    switch (mode) {
    case EdgeLength::unit:
        return 1.0;
    case EdgeLength::neg_log_weight: {
        if (weight > 1.0)
            throw ParameterError("neg_log edge lengths require weights <= 1");
        return -std::log(weight);
    }
    case EdgeLength::inverse_weight:
        return 1.0 / weight;
    }
    return 1.0;
}

// Dijkstra with an optional expansion cutoff: nodes at distance >= cutoff are
// neither finalized nor expanded.
std::vector<double> dijkstra_impl(const SparseGraph& g, std::span<const int> sources,
                                  EdgeLength lengths, double cutoff) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<std::size_t>(g.n), inf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int s : sources) {
        if (s < 0 || s >= g.n) throw ParameterError("dijkstra source out of range");
        if (dist[static_cast<std::size_t>(s)] != 0.0) {
            dist[static_cast<std::size_t>(s)] = 0.0;
            heap.emplace(0.0, s);
        }
    }
    while (!heap.empty()) {
        const auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[static_cast<std::size_t>(v)]) continue;
        if (d >= cutoff) continue;
        for (SpMat::InnerIterator it(g.weights, v); it; ++it) {
            const int u = static_cast<int>(it.col());
            const double nd = d + edge_length_of(it.value(), lengths);
            if (nd < dist[static_cast<std::size_t>(u)]) {
                dist[static_cast<std::size_t>(u)] = nd;
                heap.emplace(nd, u);
            }
        }
    }
    return dist;
}

} // namespace

std::vector<double> dijkstra_multisource(const SparseGraph& g, std::span<const int> sources,
                                         EdgeLength lengths) {
    if (sources.empty()) throw ParameterError("dijkstra requires at least one source");
    return dijkstra_impl(g, sources, lengths, std::numeric_limits<double>::infinity());
}

std::vector<int> dijkstra_ball(const SparseGraph& g, int source, double radius,
                               EdgeLength lengths) {
    const int src[1] = {source};
    const auto dist = dijkstra_impl(g, src, lengths, radius);
    std::vector<int> ball;
    for (int v = 0; v < g.n; ++v)
        if (dist[static_cast<std::size_t>(v)] < radius) ball.push_back(v);
    return ball;
}

void save_graph(const SparseGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write graph file: " + path);

    std::vector<std::pair<std::pair<int, int>, double>> upper;
    for (int i = 0; i < g.n; ++i)
        for (SpMat::InnerIterator it(g.weights, i); it; ++it)
            if (i < it.col()) upper.push_back({{i, static_cast<int>(it.col())}, it.value()});

    out << g.n << ' ' << upper.size() << '\n';
    for (const auto& [key, w] : upper)
        out << key.first << ' ' << key.second << ' ' << format_double(w) << '\n';
    if (!out) throw IoError("failed writing graph file: " + path);
}

SparseGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open graph file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "missing header line");
    long long n = 0, nnz = 0;
    {
        std::istringstream hs(line);
        if (!(hs >> n >> nnz) || n < 1 || nnz < 0)
            throw ParseError(path, 1, "header must be 'n nnz'");
    }
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(nnz) * 2);
    for (long long e = 0; e < nnz; ++e) {
        if (!std::getline(in, line))
            throw ParseError(path, 2 + e, "expected " + std::to_string(nnz) + " edge lines");
        std::istringstream es(line);
        long long i = 0, j = 0;
        std::string wtok;
        if (!(es >> i >> j >> wtok)) throw ParseError(path, 2 + e, "edge line must be 'i j w'");
        double w = 0;
        if (!parse_double(wtok, w)) throw ParseError(path, 2 + e, "invalid weight '" + wtok + "'");
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw ParseError(path, 2 + e, "edge endpoint out of range");
        if (i == j) throw ParseError(path, 2 + e, "self loops are not allowed");
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
        triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), w);
    }
    SpMat w(static_cast<int>(n), static_cast<int>(n));
    w.setFromTriplets(triplets.begin(), triplets.end());
    return SparseGraph::from_weights(std::move(w));
}

} // namespace topoal

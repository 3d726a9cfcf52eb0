#pragma once

#include "topoal/dataset.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace topoal {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Metric { euclidean, angular };

// Binary adjacency in CSR form. Neighbor lists are sorted ascending; no
// self loops.
struct Adjacency {
    int n = 0;
    std::vector<int> offsets;   // size n+1
    std::vector<int> neighbors; // size 2|E|

    int degree(int i) const { return offsets[i + 1] - offsets[i]; }
    std::span<const int> neighbors_of(int i) const {
        return {neighbors.data() + offsets[i],
                static_cast<std::size_t>(offsets[i + 1] - offsets[i])};
    }
    bool has_edge(int i, int j) const;

    static Adjacency from_edges(int n, std::span<const std::pair<int, int>> edges);
    static Adjacency from_structure(const SpMat& w);
};

// Symmetric weighted similarity graph. Immutable after construction and safe
// to share read-only across threads.
struct SparseGraph {
    int n = 0;
    SpMat weights;             // symmetric, nonnegative, zero diagonal
    Adjacency adj;             // structure of `weights`
    std::vector<int> degrees;  // binary degrees, adj row sizes

    // Validates exact symmetry, zero diagonal, nonnegativity; prunes
    // explicit zeros.
    static SparseGraph from_weights(SpMat w);
};

// Exact brute-force kNN graph with the self-tuning Gaussian kernel
// exp(-4 |x_i - x_j|^2 / d_k(x_i)^2), where d_k(x_i) is the distance from
// x_i to its k-th nearest neighbor (self excluded). Directed kNN edges are
// symmetrized by W <- (W + W^T)/2. The angular metric measures Euclidean
// distance between unit-normalized vectors. Exact duplicates with
// d_k(x_i) = 0 receive weight 1.
SparseGraph build_knn_graph(const Dataset& data, int k, Metric metric = Metric::euclidean);

enum class Provenance { base, multiscale, rewired };

// Symmetric positive semi-definite operator used by every classifier.
// Either an explicit sparse matrix or a matrix-free sum of Laplacian powers
// (for scales too large to densify).
class LaplacianOperator {
public:
    struct Term {
        double weight;
        SpMat laplacian;
        int power;
    };

    LaplacianOperator() = default;

    static LaplacianOperator from_matrix(SpMat m, Provenance provenance);
    static LaplacianOperator from_terms(std::vector<Term> terms);

    int size() const { return n_; }
    Provenance provenance() const { return provenance_; }
    bool is_explicit() const { return explicit_; }
    const SpMat& matrix() const;             // StateError when matrix-free
    const std::vector<Term>& terms() const { return terms_; }

    // y = M x, column block at a time.
    void apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& y) const;

    // Exact diagonal, or an empty vector when it is not cheaply available
    // (matrix-free terms with power > 2).
    Eigen::VectorXd diagonal() const;

    // Connected components of the operator's symmetric sparsity structure
    // (union of term structures when matrix-free).
    std::vector<int> component_labels() const;

private:
    bool explicit_ = true;
    int n_ = 0;
    Provenance provenance_ = Provenance::base;
    SpMat matrix_;
    std::vector<Term> terms_;
};

// Unnormalized graph Laplacian L = D - W.
LaplacianOperator laplacian(const SparseGraph& g);

// Weight matrix restricted to edges adjacent to `nodes`: entries (i, j)
// survive iff i or j is in the set.
SpMat localized_weights(const SparseGraph& g, std::span<const int> nodes);

// (L^S)^p for the Laplacian of the localized weights W^S.
LaplacianOperator localized_laplacian_power(const SparseGraph& g, std::span<const int> nodes,
                                            int power);

inline constexpr std::size_t kDefaultNnzBudget = std::size_t{1} << 28;

// M^p by repeated sparse products. Powers densify; the nnz budget bounds the
// memory and overruns raise ResourceError.
LaplacianOperator operator_power(const LaplacianOperator& op, int power,
                                 std::size_t nnz_budget = kDefaultNnzBudget);

enum class EdgeLength { unit, neg_log_weight, inverse_weight };

// Shortest-path distance from the nearest source; unreachable nodes get +inf.
std::vector<double> dijkstra_multisource(const SparseGraph& g, std::span<const int> sources,
                                         EdgeLength lengths = EdgeLength::unit);

// Nodes strictly inside the radius ball around `source` (d(source, y) < radius),
// sorted ascending. The search stops expanding at the radius.
std::vector<int> dijkstra_ball(const SparseGraph& g, int source, double radius,
                               EdgeLength lengths = EdgeLength::unit);

// Text graph format: header "n nnz", then one line "i j w" per stored
// upper-triangular nonzero (0-based, decimal weight). Round-trips exactly.
void save_graph(const SparseGraph& g, const std::string& path);
SparseGraph load_graph(const std::string& path);

} // namespace topoal

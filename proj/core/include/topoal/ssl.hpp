#pragma once

#include "topoal/graph.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace topoal {

// Hard label constraints: one-hot rows at labeled nodes, zero elsewhere.
struct LabelMatrix {
    int n = 0;
    int num_classes = 0;
    std::vector<int> labeled;      // insertion order, distinct
    std::vector<int> classes;      // class of each labeled node, aligned
    std::vector<char> is_labeled;  // size n

    static LabelMatrix make(int n, int num_classes, std::span<const int> nodes,
                            std::span<const int> node_classes);
    void add(int node, int cls);
    Eigen::MatrixXd onehot() const;
};

struct Solution {
    Eigen::MatrixXd scores; // n x K
    double solver_residual = 0.0;
    std::vector<std::string> warnings;
};

// argmax per row, ties toward the lowest class index.
std::vector<int> predict(const Solution& sol);

struct SolveReport {
    double residual = 0.0; // max relative residual over the right-hand sides
    int iterations = 0;    // max iteration count over the right-hand sides
};

using ApplyFn = std::function<void(const Eigen::MatrixXd&, Eigen::MatrixXd&)>;

// Diagonally preconditioned conjugate gradients, one right-hand side column
// at a time. `diag` may be empty (no preconditioning). Stops at relative
// residual <= tol or after max_iter iterations (default 10n); the reached
// residual is reported either way. Non-finite iterates raise NumericalError.
SolveReport solve_spd(const ApplyFn& apply, int n, const Eigen::VectorXd& diag,
                      const Eigen::MatrixXd& rhs, Eigen::MatrixXd& x, double tol = 1e-8,
                      int max_iter = -1);

// Harmonic extension of the labels: unlabeled rows solve
// L_UU U_U = -L_UL S_L; labeled rows are copied from the one-hot targets.
// Connected components without a label get uniform 1/K rows and a warning.
Solution laplace_learn(const LaplacianOperator& op, const LabelMatrix& labels, double tol = 1e-8);

struct ReweightFunction {
    Eigen::VectorXd gamma; // strictly positive
};

// Solves the graph Poisson equation L g = b with b_i = [i labeled] - |L|/n
// (recentered per component on disconnected graphs), takes the
// per-component zero-mean solution, and shifts it positive with a 1% range
// floor. A constant solution maps to gamma = 1.
ReweightFunction poisson_reweight(const SparseGraph& g, std::span<const int> labeled,
                                  double tol = 1e-8);

// Poisson-reweighted Laplace learning with decay strength tau: minimizes
// sum_ij gamma_i gamma_j w_ij |v_i - v_j|^2 + tau sum_U |v_i|^2 under hard
// constraints, i.e. ((L_gamma)_UU + (tau/2) I) U_U = -(L_gamma)_UL S_L.
// tau = 0 reduces exactly to laplace_learn on the reweighted graph.
Solution pwll_learn(const SparseGraph& g, const ReweightFunction& reweight,
                    const LabelMatrix& labels, double tau, double tol = 1e-8);

struct MultiscaleConfig {
    int dense_cap = 20000;                        // materialize powers up to this n
    std::size_t nnz_budget = kDefaultNnzBudget;   // guard for materialized powers
};

// sum_k weight_k L_k^{power_k} over graphs at scales k_1 > ... > k_q.
// Materialized as one sparse matrix up to the dense cap, matrix-free above.
LaplacianOperator multiscale_operator(std::span<const SparseGraph> graphs,
                                      std::span<const int> powers,
                                      std::span<const double> weights,
                                      const MultiscaleConfig& cfg = {});

// Parameters of the localized update terms for scales 2..q.
struct RewiringParams {
    std::vector<int> powers;
    std::vector<double> weights;
};

// Additively rewired Laplacian: lambda_1 L_1^{p_1} plus accumulated
// localized powers at acquired nodes.
struct RewiredOperator {
    LaplacianOperator op;
    RewiringParams params;
};

RewiredOperator make_rewired_operator(const SparseGraph& base, double lambda1, int p1,
                                      RewiringParams params);

// L <- L + sum_{k=2..q} lambda_k (L_k^{{node}})^{p_k}. Sparsity grows only
// within the p_k-hop neighborhood of the node in the fine graphs.
void rewire_update(RewiredOperator& state, std::span<const SparseGraph> fine_graphs, int node);

// Geometric tau schedule: tau0 * mu^step with mu = (1e-9 / tau0)^(1 / 2K),
// zero from step 2K on.
double tau_decay(double tau0, int num_classes, int step);

} // namespace topoal

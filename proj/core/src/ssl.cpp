#include "topoal/ssl.hpp"

#include "topoal/errors.hpp"
#include "topoal/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace topoal {

LabelMatrix LabelMatrix::make(int n, int num_classes, std::span<const int> nodes,
                              std::span<const int> node_classes) {
    if (num_classes < 1) throw ParameterError("label matrix needs at least one class");
    if (nodes.size() != node_classes.size())
        throw ParameterError("labeled nodes and classes must align");
    LabelMatrix lm;
    lm.n = n;
    lm.num_classes = num_classes;
    lm.is_labeled.assign(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < nodes.size(); ++i) lm.add(nodes[i], node_classes[i]);
    return lm;
}

void LabelMatrix::add(int node, int cls) {
    if (node < 0 || node >= n) throw ParameterError("labeled node out of range");
    if (cls < 0 || cls >= num_classes) throw ParameterError("label class out of range");
    if (is_labeled[static_cast<std::size_t>(node)])
        throw ParameterError("node " + std::to_string(node) + " labeled twice");
    is_labeled[static_cast<std::size_t>(node)] = 1;
    labeled.push_back(node);
    classes.push_back(cls);
}

Eigen::MatrixXd LabelMatrix::onehot() const {
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, num_classes);
    for (std::size_t i = 0; i < labeled.size(); ++i)
        s(labeled[i], classes[i]) = 1.0;
    return s;
}

std::vector<int> predict(const Solution& sol) {
    std::vector<int> out(static_cast<std::size_t>(sol.scores.rows()));
    for (Eigen::Index i = 0; i < sol.scores.rows(); ++i) {
        int best = 0;
        double best_val = sol.scores(i, 0);
        for (Eigen::Index k = 1; k < sol.scores.cols(); ++k) {
            if (sol.scores(i, k) > best_val) {
                best_val = sol.scores(i, k);
                best = static_cast<int>(k);
            }
        }
        out[static_cast<std::size_t>(i)] = best;
    }
    return out;
}

SolveReport solve_spd(const ApplyFn& apply, int n, const Eigen::VectorXd& diag,
                      const Eigen::MatrixXd& rhs, Eigen::MatrixXd& x, double tol,
                      int max_iter) {
    if (rhs.rows() != n) throw ParameterError("solve_spd: rhs row count mismatch");
    if (max_iter < 0) max_iter = 10 * n;

    const bool preconditioned = diag.size() == n;
    Eigen::VectorXd inv_diag;
    if (preconditioned) {
        inv_diag.resize(n);
        for (int i = 0; i < n; ++i) inv_diag[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
    }

    const int cols = static_cast<int>(rhs.cols());
    x.setZero(n, cols);
    std::vector<double> residuals(static_cast<std::size_t>(cols), 0.0);
    std::vector<int> iteration_counts(static_cast<std::size_t>(cols), 0);

    parallel_for(0, cols, [&](int c) {
        const Eigen::VectorXd b = rhs.col(c);
        const double b_norm = b.norm();
        if (b_norm == 0.0) return; // x = 0 is exact

        Eigen::VectorXd xc = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd r = b;
        Eigen::VectorXd z = preconditioned ? inv_diag.cwiseProduct(r).eval() : r;
        Eigen::VectorXd p = z;
        Eigen::MatrixXd ap_block(n, 1);
        Eigen::MatrixXd ap_out(n, 1);
        double rz = r.dot(z);
        const double stop = tol * b_norm;

        int it = 0;
        double r_norm = r.norm();
        while (r_norm > stop && it < max_iter) {
            ap_block.col(0) = p;
            apply(ap_block, ap_out);
            const Eigen::VectorXd ap = ap_out.col(0);
            const double p_ap = p.dot(ap);
            if (!(p_ap > 0.0)) break; // null-space direction or breakdown
            const double alpha = rz / p_ap;
            xc += alpha * p;
            r -= alpha * ap;
            if (!r.allFinite())
                throw NumericalError("solve_spd: non-finite residual at iteration " +
                                     std::to_string(it));
            z = preconditioned ? inv_diag.cwiseProduct(r).eval() : r;
            const double rz_next = r.dot(z);
            p = z + (rz_next / rz) * p;
            rz = rz_next;
            r_norm = r.norm();
            ++it;
        }
        x.col(c) = xc;
        residuals[static_cast<std::size_t>(c)] = r_norm / b_norm;
        iteration_counts[static_cast<std::size_t>(c)] = it;
    });

    SolveReport report;
    for (int c = 0; c < cols; ++c) {
        report.residual = std::max(report.residual, residuals[static_cast<std::size_t>(c)]);
        report.iterations = std::max(report.iterations, iteration_counts[static_cast<std::size_t>(c)]);
    }
    return report;
}

namespace {

// Apply of `op` restricted to the index set plus a diagonal shift:
// y = (M_II + shift I) x through embed / apply / restrict.
ApplyFn restricted_apply(const LaplacianOperator& op, const std::vector<int>& index_set,
                         double shift) {
    const int n = op.size();
    return [&op, &index_set, shift, n](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) {
        Eigen::MatrixXd full = Eigen::MatrixXd::Zero(n, x.cols());
        for (std::size_t r = 0; r < index_set.size(); ++r)
            full.row(index_set[r]) = x.row(static_cast<Eigen::Index>(r));
        Eigen::MatrixXd applied;
        op.apply(full, applied);
        y.resize(static_cast<Eigen::Index>(index_set.size()), x.cols());
        for (std::size_t r = 0; r < index_set.size(); ++r)
            y.row(static_cast<Eigen::Index>(r)) = applied.row(index_set[r]);
        if (shift != 0.0) y += shift * x;
    };
}

Solution constrained_solve(const LaplacianOperator& op, const LabelMatrix& labels, double shift,
                           double tol) {
    if (labels.labeled.empty()) throw ParameterError("at least one labeled node is required");
    if (labels.n != op.size()) throw ParameterError("label matrix size does not match operator");

    const int n = op.size();
    const int num_classes = labels.num_classes;
    Solution sol;
    sol.scores = Eigen::MatrixXd::Zero(n, num_classes);

    const Eigen::MatrixXd onehot = labels.onehot();
    for (std::size_t i = 0; i < labels.labeled.size(); ++i)
        sol.scores.row(labels.labeled[i]) = onehot.row(labels.labeled[i]);

    // Solve only where a label can reach; components without any labeled
    // node stay singular under shift = 0 and get uniform scores instead.
    std::vector<char> component_labeled;
    std::vector<int> comp;
    bool has_unreached = false;
    comp = op.component_labels();
    int num_components = 0;
    for (int c : comp) num_components = std::max(num_components, c + 1);
    component_labeled.assign(static_cast<std::size_t>(num_components), 0);
    for (int v : labels.labeled) component_labeled[static_cast<std::size_t>(comp[v])] = 1;

    std::vector<int> unknown;
    unknown.reserve(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
        if (labels.is_labeled[static_cast<std::size_t>(v)]) continue;
        if (!component_labeled[static_cast<std::size_t>(comp[v])] && shift == 0.0) {
            sol.scores.row(v).setConstant(1.0 / num_classes);
            has_unreached = true;
            continue;
        }
        unknown.push_back(v);
    }
    if (has_unreached)
        sol.warnings.push_back("graph has connected components without labeled nodes; "
                               "their rows were set uniform");
    if (unknown.empty()) return sol;

    // RHS = -(M S)_U; embedding the one-hot rows makes the product equal
    // M_UL S_L on the unknown rows.
    Eigen::MatrixXd applied;
    op.apply(onehot, applied);
    Eigen::MatrixXd rhs(static_cast<Eigen::Index>(unknown.size()), num_classes);
    for (std::size_t r = 0; r < unknown.size(); ++r)
        rhs.row(static_cast<Eigen::Index>(r)) = -applied.row(unknown[r]);

    Eigen::VectorXd diag = op.diagonal();
    Eigen::VectorXd sub_diag;
    if (diag.size() == op.size()) {
        sub_diag.resize(static_cast<Eigen::Index>(unknown.size()));
        for (std::size_t r = 0; r < unknown.size(); ++r)
            sub_diag[static_cast<Eigen::Index>(r)] = diag[unknown[r]] + shift;
    }

    Eigen::MatrixXd solution;
    const SolveReport report = solve_spd(restricted_apply(op, unknown, shift),
                                         static_cast<int>(unknown.size()), sub_diag, rhs,
                                         solution, tol);
    sol.solver_residual = report.residual;
    for (std::size_t r = 0; r < unknown.size(); ++r)
        sol.scores.row(unknown[r]) = solution.row(static_cast<Eigen::Index>(r));
    if (!sol.scores.allFinite()) throw NumericalError("classifier produced non-finite scores");
    return sol;
}

} // namespace

Solution laplace_learn(const LaplacianOperator& op, const LabelMatrix& labels, double tol) {
    return constrained_solve(op, labels, 0.0, tol);
}

ReweightFunction poisson_reweight(const SparseGraph& g, std::span<const int> labeled,
                                  double tol) {
    if (labeled.empty()) throw ParameterError("poisson_reweight requires labeled nodes");
    const int n = g.n;

    Eigen::VectorXd b = Eigen::VectorXd::Constant(n, -static_cast<double>(labeled.size()) / n);
    for (int v : labeled) {
        if (v < 0 || v >= n) throw ParameterError("labeled node out of range");
        b[v] += 1.0;
    }

    const LaplacianOperator op = laplacian(g);
    const std::vector<int> comp = op.component_labels();
    int num_components = 0;
    for (int c : comp) num_components = std::max(num_components, c + 1);

    // The equation is solvable iff the source sums to zero on every
    // component; recenter per component (a no-op on connected graphs).
    std::vector<double> comp_sum(static_cast<std::size_t>(num_components), 0.0);
    std::vector<int> comp_size(static_cast<std::size_t>(num_components), 0);
    for (int v = 0; v < n; ++v) {
        comp_sum[static_cast<std::size_t>(comp[v])] += b[v];
        ++comp_size[static_cast<std::size_t>(comp[v])];
    }
    for (int v = 0; v < n; ++v)
        b[v] -= comp_sum[static_cast<std::size_t>(comp[v])] /
                comp_size[static_cast<std::size_t>(comp[v])];

    Eigen::MatrixXd rhs = b;
    Eigen::MatrixXd solution;
    ApplyFn apply = [&op](const Eigen::MatrixXd& x, Eigen::MatrixXd& y) { op.apply(x, y); };
    solve_spd(apply, n, op.diagonal(), rhs, solution, tol);

    Eigen::VectorXd gamma0 = solution.col(0);
    // Zero mean per component (the solution is defined up to a constant).
    std::vector<double> mean(static_cast<std::size_t>(num_components), 0.0);
    for (int v = 0; v < n; ++v) mean[static_cast<std::size_t>(comp[v])] += gamma0[v];
    for (int c = 0; c < num_components; ++c)
        mean[static_cast<std::size_t>(c)] /= comp_size[static_cast<std::size_t>(c)];
    for (int v = 0; v < n; ++v) gamma0[v] -= mean[static_cast<std::size_t>(comp[v])];

    const double lo = gamma0.minCoeff();
    const double hi = gamma0.maxCoeff();
    const double range = hi - lo;
    ReweightFunction rw;
    if (range == 0.0) {
        rw.gamma = Eigen::VectorXd::Ones(n);
    } else {
        rw.gamma = (gamma0.array() - lo + 0.01 * range).matrix();
    }
    return rw;
}

Solution pwll_learn(const SparseGraph& g, const ReweightFunction& reweight,
                    const LabelMatrix& labels, double tau, double tol) {
    if (tau < 0) throw ParameterError("tau must be nonnegative");
    if (reweight.gamma.size() != g.n) throw ParameterError("reweight size does not match graph");
    for (int v = 0; v < g.n; ++v)
        if (!(reweight.gamma[v] > 0.0)) throw ParameterError("reweight values must be positive");

    // Reweighted graph: w'_ij = gamma_i gamma_j w_ij.
    SpMat scaled = g.weights;
    for (int i = 0; i < g.n; ++i)
        for (SpMat::InnerIterator it(scaled, i); it; ++it)
            it.valueRef() *= reweight.gamma[i] * reweight.gamma[static_cast<int>(it.col())];

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(scaled.nonZeros()) + static_cast<std::size_t>(g.n));
    for (int i = 0; i < g.n; ++i) {
        double row_sum = 0.0;
        for (SpMat::InnerIterator it(scaled, i); it; ++it) {
            row_sum += it.value();
            triplets.emplace_back(i, static_cast<int>(it.col()), -it.value());
        }
        triplets.emplace_back(i, i, row_sum);
    }
    SpMat lap(g.n, g.n);
    lap.setFromTriplets(triplets.begin(), triplets.end());
    const LaplacianOperator op = LaplacianOperator::from_matrix(std::move(lap), Provenance::base);

    // The factor 2 of the Dirichlet form cancels against tau/2, so tau = 0
    // reduces exactly to Laplace learning on the reweighted graph.
    return constrained_solve(op, labels, tau / 2.0, tol);
}

LaplacianOperator multiscale_operator(std::span<const SparseGraph> graphs,
                                      std::span<const int> powers,
                                      std::span<const double> weights,
                                      const MultiscaleConfig& cfg) {
    if (graphs.empty()) throw ParameterError("multiscale_operator needs at least one graph");
    if (graphs.size() != powers.size() || graphs.size() != weights.size())
        throw ParameterError("multiscale_operator requires aligned graphs, powers, weights");
    const int n = graphs.front().n;
    for (const auto& g : graphs)
        if (g.n != n) throw ParameterError("multiscale graphs must share the node set");
    for (double w : weights)
        if (!(w > 0)) throw ParameterError("multiscale weights must be positive");
    for (int p : powers)
        if (p < 1) throw ParameterError("multiscale powers must be >= 1");

    std::vector<LaplacianOperator::Term> terms;
    terms.reserve(graphs.size());
    for (std::size_t k = 0; k < graphs.size(); ++k)
        terms.push_back({weights[k], laplacian(graphs[k]).matrix(), powers[k]});

    if (n > cfg.dense_cap) return LaplacianOperator::from_terms(std::move(terms));

    SpMat sum(n, n);
    for (const auto& t : terms) {
        SpMat powered = t.laplacian;
        for (int p = 1; p < t.power; ++p) {
            powered = (powered * t.laplacian).pruned();
            if (static_cast<std::size_t>(powered.nonZeros()) > cfg.nnz_budget)
                throw ResourceError("multiscale operator exceeded the nnz budget");
        }
        sum = sum + SpMat(t.weight * powered);
    }
    return LaplacianOperator::from_matrix(std::move(sum), Provenance::multiscale);
}

RewiredOperator make_rewired_operator(const SparseGraph& base, double lambda1, int p1,
                                      RewiringParams params) {
    if (!(lambda1 > 0)) throw ParameterError("lambda1 must be positive");
    if (p1 < 1) throw ParameterError("p1 must be >= 1");
    if (params.powers.size() != params.weights.size())
        throw ParameterError("rewiring powers and weights must align");

    SpMat m = operator_power(laplacian(base), p1).matrix();
    if (lambda1 != 1.0) m = SpMat(lambda1 * m);
    RewiredOperator state;
    state.op = LaplacianOperator::from_matrix(std::move(m), Provenance::rewired);
    state.params = std::move(params);
    return state;
}

void rewire_update(RewiredOperator& state, std::span<const SparseGraph> fine_graphs, int node) {
    if (fine_graphs.size() != state.params.powers.size())
        throw ParameterError("rewire_update: fine graph count does not match the parameters");
    if (node < 0 || node >= state.op.size()) throw ParameterError("rewire_update: node out of range");
    if (fine_graphs.empty()) return; // q = 1: nothing to add

    const int single[1] = {node};
    SpMat m = state.op.matrix();
    for (std::size_t k = 0; k < fine_graphs.size(); ++k) {
        const LaplacianOperator term =
            localized_laplacian_power(fine_graphs[k], single, state.params.powers[k]);
        m = m + SpMat(state.params.weights[k] * term.matrix());
    }
    state.op = LaplacianOperator::from_matrix(std::move(m), Provenance::rewired);
}

double tau_decay(double tau0, int num_classes, int step) {
    if (!(tau0 > 0)) throw ParameterError("tau0 must be positive");
    if (num_classes < 1) throw ParameterError("decay parameter K must be positive");
    if (step < 0) throw ParameterError("step must be nonnegative");
    if (step >= 2 * num_classes) return 0.0;
    const double mu = std::pow(1e-9 / tau0, 1.0 / (2.0 * num_classes));
    return tau0 * std::pow(mu, step);
}

} // namespace topoal

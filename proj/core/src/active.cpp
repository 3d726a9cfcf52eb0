#include "topoal/active.hpp"

#include "topoal/curvature.hpp"
#include "topoal/errors.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace topoal {

AcquisitionScores margin_uncertainty(const Solution& sol) {
    if (sol.scores.cols() < 2)
        throw ParameterError("margin uncertainty needs at least two classes");
    AcquisitionScores out;
    out.scores.resize(sol.scores.rows());
    for (Eigen::Index i = 0; i < sol.scores.rows(); ++i) {
        double top = -std::numeric_limits<double>::infinity();
        double second = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < sol.scores.cols(); ++k) {
            const double v = sol.scores(i, k);
            if (v > top) {
                second = top;
                top = v;
            } else if (v > second) {
                second = v;
            }
        }
        out.scores[i] = top - second;
    }
    return out;
}

AcquisitionScores min_norm(const Solution& sol) {
    AcquisitionScores out;
    out.scores = sol.scores.rowwise().norm();
    return out;
}

namespace {

class LaplaceClassifier final : public Classifier {
public:
    LaplaceClassifier(const LaplacianOperator& op, double tol) : op_(op), tol_(tol) {}
    Solution train(const LabelMatrix& labels) override { return laplace_learn(op_, labels, tol_); }

private:
    const LaplacianOperator& op_;
    double tol_;
};

class PwllClassifier final : public Classifier {
public:
    PwllClassifier(const SparseGraph& g, double tol) : g_(g), tol_(tol) {}
    Solution train(const LabelMatrix& labels) override {
        const ReweightFunction gamma = poisson_reweight(g_, labels.labeled, tol_);
        return pwll_learn(g_, gamma, labels, tau_, tol_);
    }
    void set_tau(double tau) override { tau_ = tau; }

private:
    const SparseGraph& g_;
    double tol_;
    double tau_ = 0.0;
};

class HypergraphClassifier final : public Classifier {
public:
    HypergraphClassifier(LaplacianOperator op, double tol) : op_(std::move(op)), tol_(tol) {}
    Solution train(const LabelMatrix& labels) override { return laplace_learn(op_, labels, tol_); }

private:
    LaplacianOperator op_;
    double tol_;
};

class RewiredClassifier final : public Classifier {
public:
    RewiredClassifier(RewiredOperator state, std::vector<SparseGraph> fine_graphs,
                      bool random_target, double tol)
        : state_(std::move(state)),
          fine_graphs_(std::move(fine_graphs)),
          random_target_(random_target),
          tol_(tol) {}

    Solution train(const LabelMatrix& labels) override {
        return laplace_learn(state_.op, labels, tol_);
    }

    void after_acquire(int node, Rng& rng) override {
        const int target =
            random_target_ ? rng.index(static_cast<std::size_t>(state_.op.size())) : node;
        rewire_update(state_, fine_graphs_, target);
    }

private:
    RewiredOperator state_;
    std::vector<SparseGraph> fine_graphs_;
    bool random_target_;
    double tol_;
};

double accuracy_outside(const std::vector<int>& predicted, const std::vector<int>& truth,
                        const std::vector<char>& labeled_mask) {
    long correct = 0;
    long total = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if (labeled_mask[i]) continue;
        ++total;
        if (predicted[i] == truth[i]) ++correct;
    }
    return total == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(total);
}

} // namespace

std::unique_ptr<Classifier> make_laplace_classifier(const LaplacianOperator& op, double tol) {
    return std::make_unique<LaplaceClassifier>(op, tol);
}

std::unique_ptr<Classifier> make_pwll_classifier(const SparseGraph& g, double tol) {
    return std::make_unique<PwllClassifier>(g, tol);
}

std::unique_ptr<Classifier> make_hypergraph_classifier(LaplacianOperator op, double tol) {
    return std::make_unique<HypergraphClassifier>(std::move(op), tol);
}

std::unique_ptr<Classifier> make_rewired_classifier(RewiredOperator state,
                                                    std::vector<SparseGraph> fine_graphs,
                                                    bool random_target, double tol) {
    return std::make_unique<RewiredClassifier>(std::move(state), std::move(fine_graphs),
                                               random_target, tol);
}

double curvature_tau_schedule(ALState& state, const Adjacency& adj, int acquired, int knn_k) {
    if (state.labeled.empty()) throw StateError("curvature schedule needs labeled nodes");
    if (knn_k < 1) throw ParameterError("curvature schedule needs k >= 1");

    double max_ric = -std::numeric_limits<double>::infinity();
    for (int j : state.labeled) max_ric = std::max(max_ric, bfc_pair(adj, acquired, j));

    // Same expression shape as the curvature formula so the boundary case
    // (disjoint neighborhoods, both degrees exactly k) compares equal rather
    // than one rounding ulp above.
    const double kd = static_cast<double>(knn_k);
    const double threshold = -2.0 + 2.0 / kd + 2.0 / kd;
    if (!state.tau_frozen && max_ric > threshold) {
        state.tau = 0.0;
        state.tau_frozen = true;
    }
    return max_ric;
}

ALState al_loop(Classifier& clf, int n, int num_classes, std::span<const int> initial_labeled,
                Oracle& oracle, const ALOptions& opt, Rng& rng) {
    if (initial_labeled.empty()) throw ParameterError("al_loop requires an initial labeled set");
    if (opt.budget < 0) throw ParameterError("al_loop budget must be nonnegative");
    if (opt.schedule == TauSchedule::curvature && (!opt.curvature_adj || opt.knn_k < 1))
        throw ParameterError("curvature schedule needs the adjacency and k");
    if (opt.schedule == TauSchedule::geometric_decay && opt.decay_classes < 1)
        throw ParameterError("geometric decay schedule needs K >= 1");

    ALState state;
    state.tau = opt.tau0;

    LabelMatrix labels = LabelMatrix::make(n, num_classes, {}, {});
    std::vector<char> labeled_mask(static_cast<std::size_t>(n), 0);
    for (int v : initial_labeled) {
        labels.add(v, oracle.query(v));
        labeled_mask[static_cast<std::size_t>(v)] = 1;
        state.labeled.push_back(v);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    using Clock = std::chrono::steady_clock;

    for (int iter = 0; iter <= opt.budget; ++iter) {
        if (opt.schedule == TauSchedule::geometric_decay)
            state.tau = tau_decay(opt.tau0, opt.decay_classes, iter);
        clf.set_tau(state.tau);

        const auto t0 = Clock::now();
        Solution sol = clf.train(labels);
        for (const auto& w : sol.warnings) state.warnings.push_back(w);

        IterationRecord rec;
        rec.iteration = iter;
        rec.labels_count = static_cast<int>(state.labeled.size());
        rec.tau = state.tau;
        rec.curvature = nan;
        rec.acq_value = nan;

        const bool last = iter == opt.budget ||
                          static_cast<int>(state.labeled.size()) >= n;
        int acquired = -1;
        if (!last) {
            const AcquisitionScores acq = opt.acquisition == Acquisition::margin
                                              ? margin_uncertainty(sol)
                                              : min_norm(sol);
            double best = std::numeric_limits<double>::infinity();
            for (int v = 0; v < n; ++v) {
                if (labeled_mask[static_cast<std::size_t>(v)]) continue;
                const double s = acq.scores[v];
                if (!std::isfinite(s))
                    throw NumericalError("non-finite acquisition score at node " +
                                         std::to_string(v));
                if (s < best) {
                    best = s;
                    acquired = v;
                }
            }
            rec.acq_value = best;
        }
        const auto t1 = Clock::now();
        rec.wall_ms = opt.measure_time
                          ? std::chrono::duration<double, std::milli>(t1 - t0).count()
                          : 0.0;
        rec.accuracy = accuracy_outside(predict(sol), oracle.truth(), labeled_mask);

        if (last) {
            state.history.push_back(rec);
            if (iter < opt.budget)
                state.warnings.push_back("unlabeled pool exhausted before the budget");
            break;
        }

        if (opt.schedule == TauSchedule::curvature)
            rec.curvature = curvature_tau_schedule(state, *opt.curvature_adj, acquired, opt.knn_k);

        state.history.push_back(rec);

        labels.add(acquired, oracle.query(acquired));
        labeled_mask[static_cast<std::size_t>(acquired)] = 1;
        state.labeled.push_back(acquired);
        clf.after_acquire(acquired, rng);
    }
    return state;
}

} // namespace topoal

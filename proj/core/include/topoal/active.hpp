#pragma once

#include "topoal/dataset.hpp"
#include "topoal/graph.hpp"
#include "topoal/rng.hpp"
#include "topoal/ssl.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace topoal {

struct AcquisitionScores {
    Eigen::VectorXd scores; // meaningful on unlabeled indices
};

// Gap between the top and second classifier score per row. The loop acquires
// the argmin, i.e. the most uncertain node. Requires K >= 2.
AcquisitionScores margin_uncertainty(const Solution& sol);

// Euclidean norm per row; with a decay term active, small norms mark nodes
// far from the labeled set, so acquiring the argmin explores.
AcquisitionScores min_norm(const Solution& sol);

enum class Acquisition { margin, min_norm };
enum class TauSchedule { fixed, geometric_decay, curvature };

struct IterationRecord {
    int iteration = 0;
    int labels_count = 0;
    double accuracy = 0.0;
    double acq_value = 0.0; // NaN on the final record (nothing acquired)
    double tau = 0.0;
    double curvature = 0.0; // NaN unless the curvature switch was evaluated
    double wall_ms = 0.0;
};

struct ALState {
    std::vector<int> labeled;
    double tau = 0.0;
    bool tau_frozen = false;
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;
};

// Classifier interface driven by the AL loop. Implementations own their
// operators; `after_acquire` lets the rewiring variants update them.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual Solution train(const LabelMatrix& labels) = 0;
    virtual void after_acquire(int node, Rng& rng) { (void)node, (void)rng; }
    virtual void set_tau(double tau) { (void)tau; }
};

std::unique_ptr<Classifier> make_laplace_classifier(const LaplacianOperator& op,
                                                    double tol = 1e-8);
std::unique_ptr<Classifier> make_pwll_classifier(const SparseGraph& g, double tol = 1e-8);
std::unique_ptr<Classifier> make_hypergraph_classifier(LaplacianOperator op, double tol = 1e-8);

// Localized rewiring around either the acquired node or a uniformly random
// node (the control variant).
std::unique_ptr<Classifier> make_rewired_classifier(RewiredOperator state,
                                                    std::vector<SparseGraph> fine_graphs,
                                                    bool random_target, double tol = 1e-8);

// One-way exploration/exploitation switch: computes the max BFC between the
// acquisition and the labeled set and zeroes tau once it exceeds -2 + 4/k.
// Returns the computed curvature.
double curvature_tau_schedule(ALState& state, const Adjacency& adj, int acquired, int knn_k);

struct ALOptions {
    int budget = 0;
    Acquisition acquisition = Acquisition::margin;
    TauSchedule schedule = TauSchedule::fixed;
    double tau0 = 0.0;      // initial tau for PWLL variants
    int decay_classes = 0;  // K of the geometric schedule
    const Adjacency* curvature_adj = nullptr; // adjacency for the curvature switch
    int knn_k = 0;                            // k of the threshold -2 + 4/k
    double solver_tol = 1e-8;
    bool measure_time = true; // false zeroes wall_ms for reproducible output
};

// Sequential active learning: train, score, acquire the argmin over the
// unlabeled pool (ties toward the lowest index), query the oracle, update.
// Produces budget+1 records; accuracy is measured over all nodes outside the
// current labeled set.
ALState al_loop(Classifier& clf, int n, int num_classes, std::span<const int> initial_labeled,
                Oracle& oracle, const ALOptions& opt, Rng& rng);

} // namespace topoal

#pragma once

#include "topoal/graph.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace topoal {

struct StoppingConfig {
    enum class Signal { differences, raw };

    int window = 20;
    double z_thresh = 3.0;
    Signal signal = Signal::differences;
};

// Ordered selection produced by a coreset method. `curvature_history` holds
// one minimax value per acquisition after the first (curvature coreset only).
// `stop_index` is the position in `nodes` of the acquisition that fired the
// stopping condition. `fallback_picks` counts draws taken from the unseen
// set when the candidate annulus was empty (DAC only).
struct CoresetResult {
    std::vector<int> nodes;
    std::vector<double> curvature_history;
    bool stopped_early = false;
    std::optional<int> stop_index;
    int fallback_picks = 0;

    std::string to_json() const;
    static CoresetResult from_json(const std::string& text);
};

// Rolling-window z-score anomaly check over a sample stream. A sample
// triggers once the window is full and |sample - mean| / std exceeds the
// threshold; the window includes the new sample, and a zero-std window never
// triggers.
class OnlineZScore {
public:
    OnlineZScore(int window, double z_thresh);

    bool push(double sample);

private:
    int window_;
    double z_thresh_;
    std::deque<double> samples_;
};

// Scans the history (first differences by default) and reports whether the
// anomaly check fires anywhere.
bool zscore_stop(std::span<const double> history, const StoppingConfig& cfg);

// Greedy minimax-curvature selection. The first node is uniform over all
// nodes; each later node minimizes the running max of Ric against the
// selected set, over the (optionally degree-reduced) unlabeled pool. With a
// stopping config, the triggering acquisition is still kept.
// reduction = 1 keeps the full pool.
CoresetResult curvature_coreset(const SparseGraph& g, int budget, int reduction = 1,
                                const std::optional<StoppingConfig>& stop = std::nullopt,
                                std::uint64_t seed = 0);

// Annulus coverage selection on shortest-path balls B_r(x) = {y : d(x,y) < r}:
// candidates lie within R of the selection but outside every r-ball; picks
// fall back to the unseen set when no candidates exist. Terminates when the
// r-balls cover every node.
CoresetResult dac_coreset(const SparseGraph& g, double r_inner, double r_outer,
                          std::uint64_t seed = 0, EdgeLength lengths = EdgeLength::unit);

CoresetResult random_coreset(int n, int budget, std::uint64_t seed = 0);

} // namespace topoal

#include "topoal/coreset.hpp"

#include "topoal/curvature.hpp"
#include "topoal/errors.hpp"
#include "topoal/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace topoal {

std::string CoresetResult::to_json() const {
    nlohmann::json j;
    j["nodes"] = nodes;
    j["history"] = curvature_history;
    j["stopped_early"] = stopped_early;
    j["stop_index"] = stop_index ? nlohmann::json(*stop_index) : nlohmann::json(nullptr);
    return j.dump();
}

CoresetResult CoresetResult::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    CoresetResult r;
    r.nodes = j.at("nodes").get<std::vector<int>>();
    r.curvature_history = j.at("history").get<std::vector<double>>();
    r.stopped_early = j.at("stopped_early").get<bool>();
    if (!j.at("stop_index").is_null()) r.stop_index = j.at("stop_index").get<int>();
    return r;
}

OnlineZScore::OnlineZScore(int window, double z_thresh) : window_(window), z_thresh_(z_thresh) {
    if (window < 2) throw ParameterError("z-score window must be >= 2");
    if (z_thresh <= 0) throw ParameterError("z-score threshold must be positive");
}

bool OnlineZScore::push(double sample) {
    samples_.push_back(sample);
    if (static_cast<int>(samples_.size()) > window_) samples_.pop_front();
    if (static_cast<int>(samples_.size()) < window_) return false;

    double mean = 0.0;
    for (double v : samples_) mean += v;
    mean /= window_;
    double var = 0.0;
    for (double v : samples_) var += (v - mean) * (v - mean);
    var /= window_;
    const double sd = std::sqrt(var);
    if (sd == 0.0) return false;
    return std::abs(sample - mean) / sd > z_thresh_;
}

bool zscore_stop(std::span<const double> history, const StoppingConfig& cfg) {
    OnlineZScore detector(cfg.window, cfg.z_thresh);
    if (cfg.signal == StoppingConfig::Signal::raw) {
        for (double v : history)
            if (detector.push(v)) return true;
    } else {
        for (std::size_t t = 1; t < history.size(); ++t)
            if (detector.push(history[t] - history[t - 1])) return true;
    }
    return false;
}

CoresetResult curvature_coreset(const SparseGraph& g, int budget, int reduction,
                                const std::optional<StoppingConfig>& stop, std::uint64_t seed) {
    if (budget < 1) throw ParameterError("coreset budget must be positive");
    if (budget > g.n) throw ParameterError("coreset budget exceeds the node count");
    if (reduction < 1) throw ParameterError("reduction parameter must be >= 1");
    const int pool_size = static_cast<int>((static_cast<long long>(g.n) + reduction - 1) / reduction);
    if (budget > pool_size + 1)
        throw ParameterError("budget " + std::to_string(budget) +
                             " exceeds the reduced pool size " + std::to_string(pool_size) + " + 1");

    Rng rng(seed);
    CoresetResult result;
    const int first = rng.index(static_cast<std::size_t>(g.n));
    result.nodes.push_back(first);
    if (budget == 1) return result;

    std::vector<int> candidates = top_degree_pool(g, reduction);
    candidates.erase(std::remove(candidates.begin(), candidates.end(), first), candidates.end());
    if (budget - 1 > static_cast<int>(candidates.size()))
        throw ParameterError("budget exceeds the candidate pool after the initial draw");

    MinimaxCache cache = MinimaxCache::make(g.n);
    std::optional<OnlineZScore> detector;
    if (stop) detector.emplace(stop->window, stop->z_thresh);
    double prev_value = 0.0;

    while (static_cast<int>(result.nodes.size()) < budget) {
        const MinimaxPick pick = bfc_minimax(g.adj, candidates, result.nodes, cache);
        result.curvature_history.push_back(pick.value);

        bool triggered = false;
        if (detector) {
            if (stop->signal == StoppingConfig::Signal::raw) {
                triggered = detector->push(pick.value);
            } else if (result.curvature_history.size() >= 2) {
                triggered = detector->push(pick.value - prev_value);
            }
            prev_value = pick.value;
        }

        result.nodes.push_back(pick.node);
        candidates.erase(std::lower_bound(candidates.begin(), candidates.end(), pick.node));

        if (triggered) {
            result.stopped_early = true;
            result.stop_index = static_cast<int>(result.nodes.size()) - 1;
            break;
        }
    }
    return result;
}

CoresetResult dac_coreset(const SparseGraph& g, double r_inner, double r_outer,
                          std::uint64_t seed, EdgeLength lengths) {
    if (!(r_inner > 0) || !(r_outer > 0)) throw ParameterError("DAC radii must be positive");
    if (!(r_inner < r_outer)) throw ParameterError("DAC requires r < R");

    Rng rng(seed);
    CoresetResult result;

    std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
    int seen_count = 0;
    std::vector<int> candidates; // sorted, disjoint from seen

    auto absorb_pick = [&](int x) {
        result.nodes.push_back(x);

        const std::vector<int> inner = dijkstra_ball(g, x, r_inner, lengths);
        for (int v : inner) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++seen_count;
            }
        }

        // candidates <- (candidates ∪ B_R(x)) \ seen, kept sorted
        const std::vector<int> outer = dijkstra_ball(g, x, r_outer, lengths);
        std::vector<int> merged;
        merged.reserve(candidates.size() + outer.size());
        std::merge(candidates.begin(), candidates.end(), outer.begin(), outer.end(),
                   std::back_inserter(merged));
        merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
        candidates.clear();
        for (int v : merged)
            if (!seen[static_cast<std::size_t>(v)]) candidates.push_back(v);
    };

    const int first = rng.index(static_cast<std::size_t>(g.n));
    absorb_pick(first);

    while (seen_count < g.n) {
        int pick;
        if (!candidates.empty()) {
            pick = candidates[static_cast<std::size_t>(rng.index(candidates.size()))];
        } else {
            // Unseen mass unreachable through the annuli: draw uniformly
            // from the unseen set.
            std::vector<int> unseen;
            unseen.reserve(static_cast<std::size_t>(g.n - seen_count));
            for (int v = 0; v < g.n; ++v)
                if (!seen[static_cast<std::size_t>(v)]) unseen.push_back(v);
            pick = unseen[static_cast<std::size_t>(rng.index(unseen.size()))];
            ++result.fallback_picks;
        }
        absorb_pick(pick);
    }
    return result;
}

CoresetResult random_coreset(int n, int budget, std::uint64_t seed) {
    if (budget < 0) throw ParameterError("coreset budget must be nonnegative");
    if (budget > n) throw ParameterError("coreset budget exceeds the node count");
    Rng rng(seed);
    CoresetResult result;
    result.nodes = rng.sample_without_replacement(n, budget);
    return result;
}

} // namespace topoal

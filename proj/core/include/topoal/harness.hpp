#pragma once

#include "topoal/active.hpp"
#include "topoal/coreset.hpp"
#include "topoal/dataset.hpp"
#include "topoal/graph.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace topoal {

// Flat key-value configuration with dotted keys ("graph.k = 25"). '#' starts
// a comment; CLI flags override file keys via set(). Typed getters record
// which keys were consumed so unknown keys can be rejected.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_string(const std::string& text, const std::string& origin = "<string>");

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    long long get_int(const std::string& key, long long fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<long long> get_int_list(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;

    // Keys present but never read; nonempty output usually means a typo.
    std::vector<std::string> unused_keys() const;
    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    mutable std::set<std::string> consumed_;
};

enum class CoresetMethod { cc, dac, random, per_class };
enum class ClassifierMethod { laplace, pwll, hypergraph, rewired_al, rewired_random };

struct ExperimentConfig {
    std::string name = "experiment";

    // dataset
    std::string dataset_kind = "blobs"; // blobs | box | file
    std::uint64_t dataset_seed = 0;
    int blobs_per_cluster = 300;
    int blobs_clusters = 8;
    double blobs_sigma = 0.17;
    int box_side = 65;
    double box_boundary = 0.3;
    std::string points_path;
    std::string labels_path;
    int file_classes = 0;
    std::string points_format = "text"; // text | binary
    int relabel_mod = 0;                // 0 = off

    // graph
    int graph_k = 25;
    Metric metric = Metric::euclidean;

    // multiscale scales (hypergraph / rewired); first entry must equal graph_k
    std::vector<int> scale_k;
    std::vector<int> scale_p;
    std::vector<double> scale_lambda;
    int dense_cap = 20000;

    // coreset
    CoresetMethod coreset_method = CoresetMethod::random;
    int coreset_budget = 0; // 0 with per_class means one per class
    int coreset_reduction = 1;
    bool stop_enabled = false;
    StoppingConfig stop;
    double dac_r = 2.0;
    double dac_R = 4.0;
    EdgeLength dac_lengths = EdgeLength::unit;

    // classifier + acquisition
    ClassifierMethod classifier = ClassifierMethod::laplace;
    double tau0 = 0.1;
    TauSchedule schedule = TauSchedule::fixed;
    int decay_classes = 0;
    Acquisition acquisition = Acquisition::margin;
    double solver_tol = 1e-8;

    // loop
    int al_budget = 0;
    int trials = 1;
    std::uint64_t base_seed = 0;

    // output
    bool deterministic_timing = false;

    // bench axis (presets comparing several methods)
    std::string bench_axis;
    std::vector<std::string> bench_methods;

    static ExperimentConfig from_kv(const KeyValueConfig& kv);
};

struct RunRecord {
    int trial = 0;
    int iteration = 0;
    int labels = 0;
    double accuracy = 0.0;
    double acq_value = 0.0; // NaN = missing
    double tau = 0.0;
    double curvature = 0.0; // NaN = missing
    double wall_ms = 0.0;
};

struct MethodSummary {
    std::string method;
    std::vector<int> labels;          // distinct label counts, ascending
    std::vector<double> mean_accuracy;
    std::vector<double> std_accuracy; // population std over trials
    double total_wall_ms = 0.0;
    int trials = 0;
    std::vector<int> incomplete_trials;
    std::vector<double> clusters_covered; // mean clusters covered by coreset step
};

struct ExperimentOutput {
    std::string method;
    std::vector<RunRecord> records;        // sorted by (trial, iteration)
    std::vector<CoresetResult> coresets;   // one per trial
    MethodSummary summary;
    std::vector<std::string> errors;       // per-trial failures (trial kept out)
};

// Runs `trials` independent trials (seed = base_seed + trial) on a worker
// pool and aggregates deterministically.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Multi-method comparison sharing one dataset and graph stack: the bench
// axis key takes each method value in turn.
std::vector<ExperimentOutput> run_bench(const ExperimentConfig& base);

std::string records_to_csv(std::span<const RunRecord> records);
void write_csv(std::span<const RunRecord> records, const std::string& path);
std::vector<RunRecord> parse_csv(const std::string& text);
std::vector<RunRecord> read_csv(const std::string& path);

MethodSummary summarize_records(const std::string& method, std::span<const RunRecord> records);
std::string summaries_to_json(std::span<const MethodSummary> summaries);

// Built-in presets (also shipped as files under presets/). Returns the
// config text, or nullopt for unknown names.
std::optional<std::string> builtin_preset(const std::string& name);
std::vector<std::string> builtin_preset_names();

} // namespace topoal

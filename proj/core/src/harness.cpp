#include "topoal/harness.hpp"

#include "topoal/errors.hpp"
#include "topoal/format.hpp"
#include "topoal/parallel.hpp"
#include "topoal/rng.hpp"
#include "topoal/ssl.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace topoal {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(s);
    while (std::getline(in, token, sep)) out.push_back(trim(token));
    return out;
}

} // namespace

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_string(buffer.str(), path);
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::string& origin) {
    KeyValueConfig kv;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError(origin + ":" + std::to_string(lineno) +
                                 ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParameterError(origin + ":" + std::to_string(lineno) + ": empty key");
        kv.values_[key] = value;
    }
    return kv;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
    values_[key] = value;
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string KeyValueConfig::require_string(const std::string& key) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) throw ParameterError("missing required config key '" + key + "'");
    return it->second;
}

long long KeyValueConfig::get_int(const std::string& key, long long fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    long long v = 0;
    if (!parse_int(it->second, v))
        throw ParameterError("config key '" + key + "' is not an integer: " + it->second);
    return v;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    double v = 0;
    if (!parse_double(it->second, v))
        throw ParameterError("config key '" + key + "' is not a number: " + it->second);
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    consumed_.insert(key);
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ParameterError("config key '" + key + "' is not a boolean: " + it->second);
}

std::vector<long long> KeyValueConfig::get_int_list(const std::string& key) const {
    consumed_.insert(key);
    std::vector<long long> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& tok : split(it->second, ',')) {
        long long v = 0;
        if (!parse_int(tok, v))
            throw ParameterError("config key '" + key + "' has a non-integer entry: " + tok);
        out.push_back(v);
    }
    return out;
}

std::vector<double> KeyValueConfig::get_double_list(const std::string& key) const {
    consumed_.insert(key);
    std::vector<double> out;
    const auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (const auto& tok : split(it->second, ',')) {
        double v = 0;
        if (!parse_double(tok, v))
            throw ParameterError("config key '" + key + "' has a non-numeric entry: " + tok);
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : values_)
        if (!consumed_.count(k)) out.push_back(k);
    return out;
}

namespace {

Metric parse_metric(const std::string& s) {
    if (s == "euclidean") return Metric::euclidean;
    if (s == "angular") return Metric::angular;
    throw ParameterError("unknown metric '" + s + "' (euclidean | angular)");
}

CoresetMethod parse_coreset_method(const std::string& s) {
    if (s == "cc") return CoresetMethod::cc;
    if (s == "dac") return CoresetMethod::dac;
    if (s == "random") return CoresetMethod::random;
    if (s == "per_class") return CoresetMethod::per_class;
    throw ParameterError("unknown coreset method '" + s + "' (cc | dac | random | per_class)");
}

ClassifierMethod parse_classifier_method(const std::string& s) {
    if (s == "laplace") return ClassifierMethod::laplace;
    if (s == "pwll") return ClassifierMethod::pwll;
    if (s == "hypergraph") return ClassifierMethod::hypergraph;
    if (s == "rewired_al") return ClassifierMethod::rewired_al;
    if (s == "rewired_random") return ClassifierMethod::rewired_random;
    throw ParameterError("unknown classifier '" + s +
                         "' (laplace | pwll | hypergraph | rewired_al | rewired_random)");
}

EdgeLength parse_edge_length(const std::string& s) {
    if (s == "unit") return EdgeLength::unit;
    if (s == "neg_log") return EdgeLength::neg_log_weight;
    if (s == "inverse") return EdgeLength::inverse_weight;
    throw ParameterError("unknown edge length mode '" + s + "' (unit | neg_log | inverse)");
}

} // namespace

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
    ExperimentConfig cfg;
    cfg.name = kv.get_string("name", cfg.name);

    cfg.dataset_kind = kv.get_string("dataset.kind", cfg.dataset_kind);
    cfg.dataset_seed = static_cast<std::uint64_t>(kv.get_int("dataset.seed", 0));
    cfg.blobs_per_cluster = static_cast<int>(kv.get_int("dataset.blobs.per_cluster", 300));
    cfg.blobs_clusters = static_cast<int>(kv.get_int("dataset.blobs.clusters", 8));
    cfg.blobs_sigma = kv.get_double("dataset.blobs.sigma", 0.17);
    cfg.box_side = static_cast<int>(kv.get_int("dataset.box.side", 65));
    cfg.box_boundary = kv.get_double("dataset.box.boundary", 0.3);
    cfg.points_path = kv.get_string("dataset.points", "");
    cfg.labels_path = kv.get_string("dataset.labels", "");
    cfg.file_classes = static_cast<int>(kv.get_int("dataset.classes", 0));
    cfg.points_format = kv.get_string("dataset.points_format", "text");
    cfg.relabel_mod = static_cast<int>(kv.get_int("dataset.relabel_mod", 0));
    if (cfg.dataset_kind != "blobs" && cfg.dataset_kind != "box" && cfg.dataset_kind != "file")
        throw ParameterError("unknown dataset.kind '" + cfg.dataset_kind +
                             "' (blobs | box | file)");
    if (cfg.dataset_kind == "file" && (cfg.points_path.empty() || cfg.labels_path.empty()))
        throw ParameterError("dataset.kind = file requires dataset.points and dataset.labels");

    cfg.graph_k = static_cast<int>(kv.get_int("graph.k", 25));
    cfg.metric = parse_metric(kv.get_string("graph.metric", "euclidean"));

    for (long long k : kv.get_int_list("multiscale.k")) cfg.scale_k.push_back(static_cast<int>(k));
    for (long long p : kv.get_int_list("multiscale.p")) cfg.scale_p.push_back(static_cast<int>(p));
    cfg.scale_lambda = kv.get_double_list("multiscale.lambda");
    cfg.dense_cap = static_cast<int>(kv.get_int("multiscale.dense_cap", 20000));
    if (!cfg.scale_k.empty()) {
        if (cfg.scale_k.size() != cfg.scale_p.size() || cfg.scale_k.size() != cfg.scale_lambda.size())
            throw ParameterError("multiscale.k/p/lambda must have the same length");
        if (cfg.scale_k.front() != cfg.graph_k)
            throw ParameterError("multiscale.k must start at graph.k");
        for (std::size_t i = 1; i < cfg.scale_k.size(); ++i) {
            if (cfg.scale_k[i] >= cfg.scale_k[i - 1])
                throw ParameterError("multiscale.k must be strictly decreasing");
            if (cfg.scale_p[i] < cfg.scale_p[i - 1])
                throw ParameterError("multiscale.p must be nondecreasing");
        }
    }

    cfg.coreset_method = parse_coreset_method(kv.get_string("coreset.method", "random"));
    cfg.coreset_budget = static_cast<int>(kv.get_int("coreset.budget", 0));
    cfg.coreset_reduction = static_cast<int>(kv.get_int("coreset.r", 1));
    cfg.stop_enabled = kv.get_bool("coreset.stop.enabled", false);
    cfg.stop.window = static_cast<int>(kv.get_int("coreset.stop.window", 20));
    cfg.stop.z_thresh = kv.get_double("coreset.stop.z", 3.0);
    const std::string signal = kv.get_string("coreset.stop.signal", "differences");
    if (signal == "differences") cfg.stop.signal = StoppingConfig::Signal::differences;
    else if (signal == "raw") cfg.stop.signal = StoppingConfig::Signal::raw;
    else throw ParameterError("unknown stop signal '" + signal + "' (differences | raw)");
    cfg.dac_r = kv.get_double("coreset.dac.r", 2.0);
    cfg.dac_R = kv.get_double("coreset.dac.R", 4.0);
    cfg.dac_lengths = parse_edge_length(kv.get_string("coreset.dac.lengths", "unit"));

    cfg.classifier = parse_classifier_method(kv.get_string("classifier.method", "laplace"));
    cfg.tau0 = kv.get_double("classifier.pwll.tau0", 0.1);
    const std::string schedule = kv.get_string("classifier.pwll.schedule", "fixed");
    if (schedule == "fixed") cfg.schedule = TauSchedule::fixed;
    else if (schedule == "decay") cfg.schedule = TauSchedule::geometric_decay;
    else if (schedule == "curvature") cfg.schedule = TauSchedule::curvature;
    else throw ParameterError("unknown schedule '" + schedule + "' (fixed | decay | curvature)");
    cfg.decay_classes = static_cast<int>(kv.get_int("classifier.pwll.decay_K", 0));
    cfg.solver_tol = kv.get_double("solver.tol", 1e-8);

    const std::string acq = kv.get_string("al.acquisition", "margin");
    if (acq == "margin") cfg.acquisition = Acquisition::margin;
    else if (acq == "min_norm") cfg.acquisition = Acquisition::min_norm;
    else throw ParameterError("unknown acquisition '" + acq + "' (margin | min_norm)");
    cfg.al_budget = static_cast<int>(kv.get_int("al.budget", 0));
    cfg.trials = static_cast<int>(kv.get_int("trials", 1));
    cfg.base_seed = static_cast<std::uint64_t>(kv.get_int("base_seed", 0));
    cfg.deterministic_timing = kv.get_bool("output.deterministic_timing", false);

    cfg.bench_axis = kv.get_string("bench.axis", "");
    for (const auto& m : split(kv.get_string("bench.methods", ""), ','))
        if (!m.empty()) cfg.bench_methods.push_back(m);

    if (cfg.trials < 1) throw ParameterError("trials must be >= 1");
    if (cfg.al_budget < 0) throw ParameterError("al.budget must be nonnegative");

    const auto unused = kv.unused_keys();
    if (!unused.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unused) msg += " " + k;
        throw ParameterError(msg);
    }
    return cfg;
}

namespace {

Dataset build_dataset(const ExperimentConfig& cfg) {
    Dataset data;
    if (cfg.dataset_kind == "blobs") {
        data = make_blobs(cfg.blobs_per_cluster, cfg.blobs_clusters, cfg.blobs_sigma,
                          cfg.dataset_seed);
        if (cfg.relabel_mod > 0) {
            // The cluster id is the original class for synthetic blobs.
            data.labels = data.cluster_ids;
            data.num_classes = cfg.blobs_clusters;
            modulo_relabel(data, cfg.relabel_mod);
        }
    } else if (cfg.dataset_kind == "box") {
        data = make_box(cfg.box_side, cfg.box_boundary);
        if (cfg.relabel_mod > 0) modulo_relabel(data, cfg.relabel_mod);
    } else {
        const PointsFormat fmt =
            cfg.points_format == "binary" ? PointsFormat::binary : PointsFormat::text;
        data = load_embeddings(cfg.points_path, cfg.labels_path, cfg.file_classes, fmt);
        if (cfg.relabel_mod > 0) modulo_relabel(data, cfg.relabel_mod);
    }
    data.validate();
    return data;
}

struct Context {
    Dataset data;
    SparseGraph base_graph;                 // at graph.k
    std::vector<SparseGraph> scale_graphs;  // multiscale stack; [0] equals base scale
    LaplacianOperator base_op;
    std::optional<LaplacianOperator> hyper_op;
};

bool method_needs_scales(ClassifierMethod m) {
    return m == ClassifierMethod::hypergraph || m == ClassifierMethod::rewired_al ||
           m == ClassifierMethod::rewired_random;
}

Context build_context(const ExperimentConfig& cfg, bool need_scales, bool need_hyper) {
    Context ctx;
    ctx.data = build_dataset(cfg);
    ctx.base_graph = build_knn_graph(ctx.data, cfg.graph_k, cfg.metric);
    ctx.base_op = laplacian(ctx.base_graph);

    if (need_scales) {
        if (cfg.scale_k.empty())
            throw ParameterError("classifier requires multiscale.k/p/lambda");
        ctx.scale_graphs.reserve(cfg.scale_k.size());
        for (std::size_t i = 0; i < cfg.scale_k.size(); ++i) {
            if (cfg.scale_k[i] == cfg.graph_k)
                ctx.scale_graphs.push_back(ctx.base_graph);
            else
                ctx.scale_graphs.push_back(build_knn_graph(ctx.data, cfg.scale_k[i], cfg.metric));
        }
    }
    if (need_hyper) {
        MultiscaleConfig mcfg;
        mcfg.dense_cap = cfg.dense_cap;
        ctx.hyper_op = multiscale_operator(ctx.scale_graphs, cfg.scale_p, cfg.scale_lambda, mcfg);
    }
    return ctx;
}

CoresetResult build_coreset(const Context& ctx, const ExperimentConfig& cfg,
                            std::uint64_t seed) {
    const int n = ctx.data.n();
    switch (cfg.coreset_method) {
    case CoresetMethod::cc: {
        const std::optional<StoppingConfig> stop =
            cfg.stop_enabled ? std::optional<StoppingConfig>(cfg.stop) : std::nullopt;
        int budget = cfg.coreset_budget;
        if (budget == 0 && cfg.stop_enabled) {
            const int pool =
                static_cast<int>((static_cast<long long>(n) + cfg.coreset_reduction - 1) /
                                 cfg.coreset_reduction);
            budget = std::min(n, pool + 1);
        }
        return curvature_coreset(ctx.base_graph, budget, cfg.coreset_reduction, stop, seed);
    }
    case CoresetMethod::dac:
        return dac_coreset(ctx.base_graph, cfg.dac_r, cfg.dac_R, seed, cfg.dac_lengths);
    case CoresetMethod::random:
        return random_coreset(n, cfg.coreset_budget, seed);
    case CoresetMethod::per_class: {
        // One uniformly random representative per class.
        Rng rng(seed);
        CoresetResult result;
        for (int c = 0; c < ctx.data.num_classes; ++c) {
            std::vector<int> members;
            for (int v = 0; v < n; ++v)
                if (ctx.data.labels[static_cast<std::size_t>(v)] == c) members.push_back(v);
            if (members.empty())
                throw ParameterError("class " + std::to_string(c) + " has no members");
            result.nodes.push_back(members[static_cast<std::size_t>(rng.index(members.size()))]);
        }
        return result;
    }
    }
    throw StateError("unreachable coreset method");
}

std::unique_ptr<Classifier> build_classifier(const Context& ctx, const ExperimentConfig& cfg) {
    switch (cfg.classifier) {
    case ClassifierMethod::laplace:
        return make_laplace_classifier(ctx.base_op, cfg.solver_tol);
    case ClassifierMethod::pwll:
        return make_pwll_classifier(ctx.base_graph, cfg.solver_tol);
    case ClassifierMethod::hypergraph:
        return make_laplace_classifier(*ctx.hyper_op, cfg.solver_tol);
    case ClassifierMethod::rewired_al:
    case ClassifierMethod::rewired_random: {
        RewiringParams params;
        for (std::size_t i = 1; i < cfg.scale_p.size(); ++i) {
            params.powers.push_back(cfg.scale_p[i]);
            params.weights.push_back(cfg.scale_lambda[i]);
        }
        RewiredOperator state = make_rewired_operator(ctx.scale_graphs.front(),
                                                      cfg.scale_lambda.front(),
                                                      cfg.scale_p.front(), std::move(params));
        std::vector<SparseGraph> fine(ctx.scale_graphs.begin() + 1, ctx.scale_graphs.end());
        return make_rewired_classifier(std::move(state), std::move(fine),
                                       cfg.classifier == ClassifierMethod::rewired_random,
                                       cfg.solver_tol);
    }
    }
    throw StateError("unreachable classifier method");
}

struct TrialRun {
    std::vector<RunRecord> records;
    CoresetResult coreset;
};

TrialRun run_trial(const Context& ctx, const ExperimentConfig& cfg, int trial) {
    const std::uint64_t trial_seed = cfg.base_seed + static_cast<std::uint64_t>(trial);

    TrialRun out;
    out.coreset = build_coreset(ctx, cfg, trial_seed);

    Oracle oracle(ctx.data.labels);
    auto clf = build_classifier(ctx, cfg);

    ALOptions opt;
    opt.budget = cfg.al_budget;
    opt.acquisition = cfg.acquisition;
    opt.solver_tol = cfg.solver_tol;
    opt.measure_time = !cfg.deterministic_timing;
    if (cfg.classifier == ClassifierMethod::pwll) {
        opt.schedule = cfg.schedule;
        opt.tau0 = cfg.tau0;
        opt.decay_classes = cfg.decay_classes > 0 ? cfg.decay_classes : ctx.data.num_classes;
        opt.curvature_adj = &ctx.base_graph.adj;
        opt.knn_k = cfg.graph_k;
    }

    Rng al_rng(trial_seed ^ 0x9e3779b97f4a7c15ull);
    const ALState state = al_loop(*clf, ctx.data.n(), ctx.data.num_classes, out.coreset.nodes,
                                  oracle, opt, al_rng);

    out.records.reserve(state.history.size());
    for (const auto& rec : state.history)
        out.records.push_back({trial, rec.iteration, rec.labels_count, rec.accuracy,
                               rec.acq_value, rec.tau, rec.curvature, rec.wall_ms});
    return out;
}

std::vector<double> clusters_covered_curve(const std::vector<CoresetResult>& coresets,
                                           const std::vector<int>& cluster_ids) {
    if (cluster_ids.empty() || coresets.empty()) return {};
    std::size_t max_len = 0;
    for (const auto& c : coresets) max_len = std::max(max_len, c.nodes.size());

    std::vector<double> mean(max_len, 0.0);
    int counted = 0;
    for (const auto& c : coresets) {
        if (c.nodes.empty()) continue;
        ++counted;
        std::set<int> seen;
        std::vector<int> curve;
        curve.reserve(c.nodes.size());
        for (int v : c.nodes) {
            seen.insert(cluster_ids[static_cast<std::size_t>(v)]);
            curve.push_back(static_cast<int>(seen.size()));
        }
        for (std::size_t s = 0; s < max_len; ++s)
            mean[s] += curve[std::min(s, curve.size() - 1)];
    }
    if (counted == 0) return {};
    for (double& v : mean) v /= counted;
    return mean;
}

ExperimentOutput run_with_context(const Context& ctx, const ExperimentConfig& cfg) {
    ExperimentOutput out;
    out.method = cfg.name;

    std::vector<std::optional<TrialRun>> trials(static_cast<std::size_t>(cfg.trials));
    std::vector<std::string> trial_errors(static_cast<std::size_t>(cfg.trials));
    parallel_for(0, cfg.trials, [&](int t) {
        try {
            trials[static_cast<std::size_t>(t)] = run_trial(ctx, cfg, t);
        } catch (const std::exception& e) {
            trial_errors[static_cast<std::size_t>(t)] = e.what();
        }
    });

    for (int t = 0; t < cfg.trials; ++t) {
        if (trials[static_cast<std::size_t>(t)]) {
            auto& run = *trials[static_cast<std::size_t>(t)];
            out.records.insert(out.records.end(), run.records.begin(), run.records.end());
            out.coresets.push_back(std::move(run.coreset));
        } else {
            out.errors.push_back("trial " + std::to_string(t) + ": " +
                                 trial_errors[static_cast<std::size_t>(t)]);
            out.summary.incomplete_trials.push_back(t);
        }
    }
    std::sort(out.records.begin(), out.records.end(), [](const RunRecord& a, const RunRecord& b) {
        return a.trial != b.trial ? a.trial < b.trial : a.iteration < b.iteration;
    });

    const auto incomplete = out.summary.incomplete_trials;
    out.summary = summarize_records(cfg.name, out.records);
    out.summary.incomplete_trials = incomplete;
    out.summary.clusters_covered = clusters_covered_curve(out.coresets, ctx.data.cluster_ids);
    return out;
}

ExperimentConfig with_axis_value(const ExperimentConfig& base, const std::string& axis,
                                 const std::string& value) {
    ExperimentConfig cfg = base;
    cfg.bench_axis.clear();
    cfg.bench_methods.clear();
    cfg.name = value;
    if (axis == "coreset.method")
        cfg.coreset_method = parse_coreset_method(value);
    else if (axis == "classifier.method")
        cfg.classifier = parse_classifier_method(value);
    else
        throw ParameterError("unsupported bench.axis '" + axis +
                             "' (coreset.method | classifier.method)");
    return cfg;
}

} // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    const bool scales = method_needs_scales(cfg.classifier);
    const Context ctx = build_context(cfg, scales, cfg.classifier == ClassifierMethod::hypergraph);
    return run_with_context(ctx, cfg);
}

std::vector<ExperimentOutput> run_bench(const ExperimentConfig& base) {
    if (base.bench_axis.empty() || base.bench_methods.empty())
        throw ParameterError("bench requires bench.axis and bench.methods");

    std::vector<ExperimentConfig> variants;
    bool scales = false;
    bool hyper = false;
    for (const auto& value : base.bench_methods) {
        variants.push_back(with_axis_value(base, base.bench_axis, value));
        scales = scales || method_needs_scales(variants.back().classifier);
        hyper = hyper || variants.back().classifier == ClassifierMethod::hypergraph;
    }

    const Context ctx = build_context(base, scales, hyper);
    std::vector<ExperimentOutput> outputs;
    outputs.reserve(variants.size());
    for (const auto& cfg : variants) outputs.push_back(run_with_context(ctx, cfg));
    return outputs;
}

namespace {

std::string field_or_empty(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

double field_or_nan(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0;
    if (!parse_double(s, v)) throw ParseError("<csv>", 0, "invalid numeric field '" + s + "'");
    return v;
}

} // namespace

std::string records_to_csv(std::span<const RunRecord> records) {
    std::string out = "trial,iteration,labels,accuracy,acq_value,tau,curvature,wall_ms\n";
    for (const auto& r : records) {
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(r.iteration);
        out += ',';
        out += std::to_string(r.labels);
        out += ',';
        out += format_double(r.accuracy);
        out += ',';
        out += field_or_empty(r.acq_value);
        out += ',';
        out += format_double(r.tau);
        out += ',';
        out += field_or_empty(r.curvature);
        out += ',';
        out += format_double(r.wall_ms);
        out += '\n';
    }
    return out;
}

void write_csv(std::span<const RunRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write CSV file: " + path);
    out << records_to_csv(records);
    if (!out) throw IoError("failed writing CSV file: " + path);
}

std::vector<RunRecord> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("<csv>", 1, "missing header");
    if (trim(line) != "trial,iteration,labels,accuracy,acq_value,tau,curvature,wall_ms")
        throw ParseError("<csv>", 1, "unexpected header: " + line);

    std::vector<RunRecord> records;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != 8)
            throw ParseError("<csv>", lineno, "expected 8 fields, got " +
                                                  std::to_string(fields.size()));
        RunRecord r;
        long long iv = 0;
        if (!parse_int(fields[0], iv)) throw ParseError("<csv>", lineno, "bad trial");
        r.trial = static_cast<int>(iv);
        if (!parse_int(fields[1], iv)) throw ParseError("<csv>", lineno, "bad iteration");
        r.iteration = static_cast<int>(iv);
        if (!parse_int(fields[2], iv)) throw ParseError("<csv>", lineno, "bad labels");
        r.labels = static_cast<int>(iv);
        r.accuracy = field_or_nan(fields[3]);
        r.acq_value = field_or_nan(fields[4]);
        r.tau = field_or_nan(fields[5]);
        r.curvature = field_or_nan(fields[6]);
        r.wall_ms = field_or_nan(fields[7]);
        records.push_back(r);
    }
    return records;
}

std::vector<RunRecord> read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open CSV file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_csv(buffer.str());
}

MethodSummary summarize_records(const std::string& method, std::span<const RunRecord> records) {
    MethodSummary s;
    s.method = method;

    std::map<int, std::vector<double>> by_labels;
    std::set<int> trials;
    for (const auto& r : records) {
        by_labels[r.labels].push_back(r.accuracy);
        trials.insert(r.trial);
        s.total_wall_ms += r.wall_ms;
    }
    s.trials = static_cast<int>(trials.size());
    for (const auto& [labels, accs] : by_labels) {
        double mean = 0;
        for (double a : accs) mean += a;
        mean /= static_cast<double>(accs.size());
        double var = 0;
        for (double a : accs) var += (a - mean) * (a - mean);
        var /= static_cast<double>(accs.size());
        s.labels.push_back(labels);
        s.mean_accuracy.push_back(mean);
        s.std_accuracy.push_back(std::sqrt(var));
    }
    return s;
}

std::string summaries_to_json(std::span<const MethodSummary> summaries) {
    nlohmann::json root;
    for (const auto& s : summaries) {
        nlohmann::json m;
        m["labels"] = s.labels;
        m["mean_accuracy"] = s.mean_accuracy;
        m["std_accuracy"] = s.std_accuracy;
        m["total_wall_ms"] = s.total_wall_ms;
        m["trials"] = s.trials;
        m["incomplete_trials"] = s.incomplete_trials;
        if (!s.clusters_covered.empty()) m["clusters_covered"] = s.clusters_covered;
        root["methods"][s.method] = m;
    }
    return root.dump(2) + "\n";
}

namespace {

constexpr const char* kCoresetBench = R"(# Coreset comparison on the eight-blob benchmark: curvature selection
# against annulus coverage and uniform random picks, then margin-driven
# active learning with Laplace learning on a k = 25 graph.
name = coreset-bench
dataset.kind = blobs
dataset.seed = 1
graph.k = 25
graph.metric = euclidean
coreset.method = cc
coreset.budget = 20
coreset.r = 1
coreset.dac.r = 2
coreset.dac.R = 4
classifier.method = laplace
al.acquisition = margin
al.budget = 30
trials = 10
base_seed = 100
bench.axis = coreset.method
bench.methods = cc,dac,random
)";

constexpr const char* kRewireBench = R"(# Rewiring comparison on a four-class blob mixture: plain Laplace learning,
# the materialized two-scale operator, and localized rewiring around
# acquired or random nodes. Scales k = (50, 30), powers (1, 2), weights
# (1, 4); every trial starts from one label per class.
name = rewire-bench
dataset.kind = blobs
dataset.blobs.clusters = 8
dataset.blobs.per_cluster = 300
dataset.blobs.sigma = 0.3
dataset.relabel_mod = 4
dataset.seed = 1
graph.k = 50
graph.metric = euclidean
multiscale.k = 50,30
multiscale.p = 1,2
multiscale.lambda = 1,4
coreset.method = per_class
classifier.method = rewired_al
al.acquisition = margin
al.budget = 100
trials = 100
base_seed = 100
bench.axis = classifier.method
bench.methods = laplace,hypergraph,rewired_al,rewired_random
)";

} // namespace

std::optional<std::string> builtin_preset(const std::string& name) {
    if (name == "coreset-bench") return std::string(kCoresetBench);
    if (name == "rewire-bench") return std::string(kRewireBench);
    return std::nullopt;
}

std::vector<std::string> builtin_preset_names() { return {"coreset-bench", "rewire-bench"}; }

} // namespace topoal

// Command line entry point: graph construction, coreset selection, active
// learning experiments, benchmark presets, curvature queries, and CSV
// re-aggregation.

#include "topoal/coreset.hpp"
#include "topoal/curvature.hpp"
#include "topoal/errors.hpp"
#include "topoal/format.hpp"
#include "topoal/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace topoal;

namespace {

struct ConfigArgs {
    std::string config_path;
    std::vector<std::string> overrides;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
    cmd->add_option("--config", args.config_path, "Key-value config file");
    cmd->add_option("--set", args.overrides,
                    "Override a config key, e.g. --set graph.k=25 (repeatable)");
}

KeyValueConfig assemble(const ConfigArgs& args) {
    KeyValueConfig kv = args.config_path.empty() ? KeyValueConfig()
                                                 : KeyValueConfig::parse_file(args.config_path);
    for (const auto& ov : args.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParameterError("--set expects key=value, got '" + ov + "'");
        kv.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    return kv;
}

Dataset dataset_from_config(const ExperimentConfig& cfg) {
    // Mirrors the harness dataset assembly for the standalone subcommands.
    if (cfg.dataset_kind == "blobs") {
        Dataset d = make_blobs(cfg.blobs_per_cluster, cfg.blobs_clusters, cfg.blobs_sigma,
                               cfg.dataset_seed);
        if (cfg.relabel_mod > 0) {
            d.labels = d.cluster_ids;
            d.num_classes = cfg.blobs_clusters;
            modulo_relabel(d, cfg.relabel_mod);
        }
        return d;
    }
    if (cfg.dataset_kind == "box") {
        Dataset d = make_box(cfg.box_side, cfg.box_boundary);
        if (cfg.relabel_mod > 0) modulo_relabel(d, cfg.relabel_mod);
        return d;
    }
    const PointsFormat fmt =
        cfg.points_format == "binary" ? PointsFormat::binary : PointsFormat::text;
    Dataset d = load_embeddings(cfg.points_path, cfg.labels_path, cfg.file_classes, fmt);
    if (cfg.relabel_mod > 0) modulo_relabel(d, cfg.relabel_mod);
    return d;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("failed writing " + path);
}

void emit_experiment_outputs(const std::vector<ExperimentOutput>& outputs,
                             const std::string& out_dir) {
    std::vector<MethodSummary> summaries;
    for (const auto& output : outputs) summaries.push_back(output.summary);
    const std::string summary_json = summaries_to_json(summaries);

    if (out_dir.empty()) {
        std::cout << summary_json;
        return;
    }
    fs::create_directories(out_dir);
    for (const auto& output : outputs)
        write_csv(output.records, (fs::path(out_dir) / (output.method + ".csv")).string());
    write_text((fs::path(out_dir) / "summary.json").string(), summary_json);
    for (const auto& output : outputs)
        for (const auto& err : output.errors)
            std::cerr << "warning: " << output.method << " " << err << "\n";
    std::cout << "wrote " << outputs.size() << " method(s) to " << out_dir << "\n";
}

int run_graph_build(const ConfigArgs& args, const std::string& out_path) {
    KeyValueConfig kv = assemble(args);
    const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
    const Dataset data = dataset_from_config(cfg);
    const SparseGraph g = build_knn_graph(data, cfg.graph_k, cfg.metric);
    save_graph(g, out_path);
    std::cout << "graph: n=" << g.n << " stored_edges=" << g.weights.nonZeros() / 2 << " -> "
              << out_path << "\n";
    return 0;
}

int run_coreset(const ConfigArgs& args, const std::string& out_path) {
    KeyValueConfig kv = assemble(args);
    const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
    const Dataset data = dataset_from_config(cfg);
    const SparseGraph g = build_knn_graph(data, cfg.graph_k, cfg.metric);

    CoresetResult result;
    switch (cfg.coreset_method) {
    case CoresetMethod::cc: {
        const std::optional<StoppingConfig> stop =
            cfg.stop_enabled ? std::optional<StoppingConfig>(cfg.stop) : std::nullopt;
        int budget = cfg.coreset_budget;
        if (budget == 0 && cfg.stop_enabled) budget = g.n;
        result = curvature_coreset(g, budget, cfg.coreset_reduction, stop, cfg.base_seed);
        break;
    }
    case CoresetMethod::dac:
        result = dac_coreset(g, cfg.dac_r, cfg.dac_R, cfg.base_seed, cfg.dac_lengths);
        break;
    case CoresetMethod::random:
        result = random_coreset(g.n, cfg.coreset_budget, cfg.base_seed);
        break;
    case CoresetMethod::per_class:
        throw ParameterError("per_class is only available inside 'al run'");
    }

    const std::string json = result.to_json() + "\n";
    if (out_path.empty())
        std::cout << json;
    else
        write_text(out_path, json);
    return 0;
}

int run_al(const ConfigArgs& args, const std::string& out_dir) {
    KeyValueConfig kv = assemble(args);
    const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
    std::vector<ExperimentOutput> outputs;
    if (!cfg.bench_axis.empty())
        outputs = run_bench(cfg);
    else
        outputs.push_back(run_experiment(cfg));
    emit_experiment_outputs(outputs, out_dir);
    return 0;
}

int run_bench_preset(const std::string& preset, const ConfigArgs& args,
                     const std::string& out_dir) {
    KeyValueConfig kv;
    if (fs::exists(preset)) {
        kv = KeyValueConfig::parse_file(preset);
    } else if (auto text = builtin_preset(preset)) {
        kv = KeyValueConfig::parse_string(*text, preset);
    } else {
        std::string names;
        for (const auto& n : builtin_preset_names()) names += " " + n;
        throw ParameterError("unknown preset '" + preset + "'; available:" + names);
    }
    for (const auto& ov : args.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ParameterError("--set expects key=value, got '" + ov + "'");
        kv.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
    emit_experiment_outputs(run_bench(cfg), out_dir);
    return 0;
}

int run_bfc_pair(const std::string& graph_path, const ConfigArgs& args, int i, int j) {
    SparseGraph g;
    if (!graph_path.empty()) {
        g = load_graph(graph_path);
    } else {
        KeyValueConfig kv = assemble(args);
        const ExperimentConfig cfg = ExperimentConfig::from_kv(kv);
        g = build_knn_graph(dataset_from_config(cfg), cfg.graph_k, cfg.metric);
    }
    std::cout << format_double(bfc_pair(g.adj, i, j)) << "\n";
    return 0;
}

int run_report(const std::vector<std::string>& csv_paths, const std::string& out_path) {
    std::vector<MethodSummary> summaries;
    for (const auto& path : csv_paths) {
        const auto records = read_csv(path);
        summaries.push_back(summarize_records(fs::path(path).stem().string(), records));
    }
    const std::string json = summaries_to_json(summaries);
    if (out_path.empty())
        std::cout << json;
    else
        write_text(out_path, json);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"topology-aware active learning on similarity graphs"};
    app.require_subcommand(1);

    ConfigArgs graph_args, coreset_args, al_args, bench_args, bfc_args;
    std::string graph_out, coreset_out, al_out, bench_out, report_out;
    std::string bench_preset, bfc_graph;
    int bfc_i = 0, bfc_j = 0;
    std::vector<std::string> report_csvs;

    auto* graph_cmd = app.add_subcommand("graph", "Graph utilities");
    graph_cmd->require_subcommand(1);
    auto* graph_build = graph_cmd->add_subcommand("build", "Build a kNN graph and export it");
    add_config_options(graph_build, graph_args);
    graph_build->add_option("--out", graph_out, "Output graph file")->required();

    auto* coreset_cmd = app.add_subcommand("coreset", "Coreset selection");
    coreset_cmd->require_subcommand(1);
    auto* coreset_run = coreset_cmd->add_subcommand("run", "Run one coreset selection");
    add_config_options(coreset_run, coreset_args);
    coreset_run->add_option("--out", coreset_out, "Output JSON file (stdout when omitted)");

    auto* al_cmd = app.add_subcommand("al", "Active learning experiments");
    al_cmd->require_subcommand(1);
    auto* al_run = al_cmd->add_subcommand("run", "Run the configured experiment");
    add_config_options(al_run, al_args);
    al_run->add_option("--out", al_out, "Output directory for CSV + summary.json");

    auto* bench_cmd = app.add_subcommand("bench", "Run a named benchmark preset");
    bench_cmd->add_option("preset", bench_preset, "Preset name or config path")->required();
    bench_cmd->add_option("--set", bench_args.overrides, "Override a config key (repeatable)");
    bench_cmd->add_option("--out", bench_out, "Output directory for CSV + summary.json");

    auto* bfc_cmd = app.add_subcommand("bfc", "Balanced Forman curvature queries");
    bfc_cmd->require_subcommand(1);
    auto* bfc_pair_cmd = bfc_cmd->add_subcommand("pair", "Curvature between two nodes");
    add_config_options(bfc_pair_cmd, bfc_args);
    bfc_pair_cmd->add_option("--graph", bfc_graph, "Graph file to load (skips construction)");
    bfc_pair_cmd->add_option("--i", bfc_i, "First node")->required();
    bfc_pair_cmd->add_option("--j", bfc_j, "Second node")->required();

    auto* report_cmd = app.add_subcommand("report", "Recompute a summary from CSV files");
    report_cmd->add_option("--csv", report_csvs, "Input CSV file (repeatable)")->required();
    report_cmd->add_option("--out", report_out, "Output JSON file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (graph_build->parsed()) return run_graph_build(graph_args, graph_out);
        if (coreset_run->parsed()) return run_coreset(coreset_args, coreset_out);
        if (al_run->parsed()) return run_al(al_args, al_out);
        if (bench_cmd->parsed()) return run_bench_preset(bench_preset, bench_args, bench_out);
        if (bfc_pair_cmd->parsed()) return run_bfc_pair(bfc_graph, bfc_args, bfc_i, bfc_j);
        if (report_cmd->parsed()) return run_report(report_csvs, report_out);
        std::cerr << "error: missing subcommand\n";
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

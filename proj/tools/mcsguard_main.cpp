#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mcsguard/csv.hpp"
#include "mcsguard/errors.hpp"
#include "mcsguard/io.hpp"
#include "mcsguard/pipeline.hpp"
#include "mcsguard/report.hpp"
#include "mcsguard/taskgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mcsguard;

namespace {

struct GlobalOptions {
    std::uint64_t seed = 7;
    bool seed_explicit = false;
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "text";
};

void print_summary(const std::string& format, const json& summary) {
    if (format == "json") {
        std::cout << dump_json(summary);
        return;
    }
    const std::string sep = format == "csv" ? "," : ": ";
    for (const auto& [key, value] : summary.items()) {
        if (value.is_object()) {
            for (const auto& [inner_key, inner] : value.items())
                std::cout << key << (format == "csv" ? "_" : ".") << inner_key << sep
                          << (inner.is_string() ? inner.get<std::string>() : inner.dump()) << "\n";
        } else {
            std::cout << key << sep
                      << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
        }
    }
}

json load_config_file(const std::string& path) {
    const std::string text = read_file(path);
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError("config file " + path + " is not valid JSON: " + e.what());
    }
}

std::vector<std::size_t> parse_feature_list(const std::string& text) {
    std::vector<std::size_t> features;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            const unsigned long value = std::stoul(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            features.push_back(value);
        } catch (const std::exception&) {
            throw ConfigError("--features expects comma-separated indices, got '" + token + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return features;
}

std::pair<int, int> parse_grid(const std::string& text) {
    const std::size_t x = text.find('x');
    if (x == std::string::npos) throw ConfigError("--sofm-grid expects RxC, got '" + text + "'");
    try {
        const int rows = std::stoi(text.substr(0, x));
        const int cols = std::stoi(text.substr(x + 1));
        if (rows < 1 || cols < 1) throw std::invalid_argument(text);
        return {rows, cols};
    } catch (const std::exception&) {
        throw ConfigError("--sofm-grid expects RxC with positive sizes, got '" + text + "'");
    }
}

std::string path_in(const std::string& dir, const std::string& name) {
    if (!dir.empty() && !fs::exists(dir)) fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

json class_summary(const Dataset& dataset) {
    long legit = 0, fake = 0;
    json per_day = json::object();
    for (const TaskRecord& r : dataset.records) {
        (r.legitimacy == 1 ? legit : fake)++;
        const std::string key = std::to_string(r.day);
        per_day[key] = per_day.value(key, 0) + 1;
    }
    return {{"records", dataset.size()},
            {"legitimate", legit},
            {"fake", fake},
            {"per_day", per_day}};
}

// ---------------------------------------------------------------- generate

struct GenerateOptions {
    std::optional<std::int64_t> total;
    std::optional<double> fake_fraction;
    std::optional<int> days;
    std::optional<double> grid_cell;
    std::string out_path;
};

int cmd_generate(const GlobalOptions& global, const GenerateOptions& opts) {
    GenerationConfig config = default_generation_config();
    std::uint64_t master_seed = global.seed;
    if (!global.config_path.empty()) {
        ExperimentConfig wrapper;
        wrapper.generation = config;
        wrapper.master_seed = master_seed;
        apply_config_json(wrapper, load_config_file(global.config_path));
        config = wrapper.generation;
        if (!global.seed_explicit) master_seed = wrapper.master_seed;
    }
    if (opts.total) config.total_tasks = *opts.total;
    if (opts.fake_fraction) config.fake_fraction = *opts.fake_fraction;
    if (opts.days) config.num_days = *opts.days;
    if (opts.grid_cell) config.grid_cell_m = *opts.grid_cell;
    config.rng_seed = derive_dataset_seed(master_seed);

    const Dataset dataset = generate_campaign(config);
    const std::string out_path =
        opts.out_path.empty() ? path_in(global.out_dir, "campaign.csv") : opts.out_path;
    atomic_write_file(out_path, dataset_to_csv(dataset));

    json summary = class_summary(dataset);
    summary["path"] = out_path;
    print_summary(global.format, summary);
    return 0;
}

// --------------------------------------------------------------------- run

struct RunOptions {
    std::string data_path;
    std::string variant = "all";
    std::string features;
    std::optional<std::size_t> runs;
    std::string sofm_grid;
    GenerateOptions generation;
};

int cmd_run(const GlobalOptions& global, const RunOptions& opts) {
    json config_json = json::object();
    if (!global.config_path.empty()) config_json = load_config_file(global.config_path);

    ExperimentConfig config;
    config.generation = default_generation_config();

    // The neighborhood default follows the grid; resolve the grid first
    // so an explicit sigma0 from the config file still wins.
    int rows = config.sofm_rows, cols = config.sofm_cols;
    if (config_json.contains("sofm")) {
        rows = config_json["sofm"].value("rows", rows);
        cols = config_json["sofm"].value("cols", cols);
    }
    if (!opts.sofm_grid.empty()) std::tie(rows, cols) = parse_grid(opts.sofm_grid);
    config.sofm_rows = rows;
    config.sofm_cols = cols;
    config.sofm.sigma0 = std::max(1.0, static_cast<double>(std::max(rows, cols)) / 2.0);

    config.master_seed = global.seed;
    apply_config_json(config, config_json);
    config.sofm_rows = rows;
    config.sofm_cols = cols;
    if (global.seed_explicit || !config_json.contains("master_seed"))
        config.master_seed = global.seed;
    if (opts.runs) config.n_runs = *opts.runs;
    if (!opts.features.empty()) config.feature_override = parse_feature_list(opts.features);
    if (opts.generation.total) config.generation.total_tasks = *opts.generation.total;
    if (opts.generation.fake_fraction)
        config.generation.fake_fraction = *opts.generation.fake_fraction;
    if (opts.generation.days) config.generation.num_days = *opts.generation.days;
    if (opts.generation.grid_cell) config.generation.grid_cell_m = *opts.generation.grid_cell;

    if (opts.variant != "all" && opts.variant != "baseline" && opts.variant != "prec" &&
        opts.variant != "combined")
        throw ConfigError("--variant must be one of all|baseline|prec|combined");

    ExperimentResult result;
    bool generated = false;
    if (!opts.data_path.empty()) {
        Dataset dataset = dataset_from_csv(read_file(opts.data_path));
        result = run_full_experiment(config, std::move(dataset));
    } else {
        result = run_full_experiment(config);
        generated = true;
    }

    json echo = experiment_config_to_json(config);
    if (!generated) echo["generation"] = nullptr;  // dataset came from --data
    const bool want_all = opts.variant == "all";
    const bool want_baseline = want_all || opts.variant == "baseline";
    const bool want_prec = want_all || opts.variant == "prec";
    const bool want_combined = want_all || opts.variant == "combined";

    if (generated)
        atomic_write_file(path_in(global.out_dir, "campaign.csv"), dataset_to_csv(result.dataset));
    atomic_write_file(path_in(global.out_dir, "ranking.json"),
                      dump_json(ranking_to_json(result.ranking, result.selected_features)));

    TrainParams echo_params = config.train;
    if (want_baseline) {
        atomic_write_file(path_in(global.out_dir, "report_deepnn.json"),
                          dump_json(report_to_json(result.baseline, echo)));
        atomic_write_file(path_in(global.out_dir, "model_deepnn.json"),
                          dump_json(network_to_json(result.best_baseline_network, echo_params)));
    }
    if (want_prec || want_combined) {
        atomic_write_file(path_in(global.out_dir, "sofm.json"), dump_json(sofm_to_json(result.sofm)));
        atomic_write_file(path_in(global.out_dir, "contingency.csv"),
                          contingency_csv(result.sofm, result.train_table, result.test_table));
        atomic_write_file(path_in(global.out_dir, "model_precdeepnn.json"),
                          dump_json(network_to_json(result.best_prec_network, echo_params)));
    }
    if (want_prec)
        atomic_write_file(path_in(global.out_dir, "report_precdeepnn.json"),
                          dump_json(report_to_json(result.prec, echo)));
    if (want_combined)
        atomic_write_file(path_in(global.out_dir, "report_precdeepnnprecl.json"),
                          dump_json(report_to_json(result.combined, echo)));
    if (want_all)
        atomic_write_file(path_in(global.out_dir, "accuracy_comparison.svg"),
                          accuracy_chart_svg({result.baseline, result.prec, result.combined}));

    json summary;
    if (want_baseline) summary["deepnn_mean_accuracy"] = result.baseline.mean_accuracy;
    if (want_prec) summary["precdeepnn_mean_accuracy"] = result.prec.mean_accuracy;
    if (want_combined) {
        summary["precdeepnnprecl_mean_accuracy"] = result.combined.mean_accuracy;
        summary["precl_leakage"] = result.precl_test_leakage;
    }
    summary["train_records"] = result.baseline.dataset.train_size;
    summary["test_records"] = result.baseline.dataset.test_size;
    summary["selected_features"] = result.selected_features;
    summary["out_dir"] = global.out_dir;
    print_summary(global.format, summary);
    return 0;
}

// ----------------------------------------------------------------- inspect

int cmd_inspect(const GlobalOptions& global, const std::string& path,
                const std::string& reserialize_path) {
    const std::string text = read_file(path);
    json summary;
    std::string canonical;

    if (text.rfind("id,day,", 0) == 0) {
        const Dataset dataset = dataset_from_csv(text);
        summary = class_summary(dataset);
        summary["kind"] = "dataset";
        canonical = dataset_to_csv(dataset);
    } else {
        json j;
        try {
            j = json::parse(text);
        } catch (const std::exception& e) {
            throw ParseError(path + " is neither a dataset CSV nor valid JSON: " + e.what());
        }
        if (j.contains("variant") && j.contains("runs")) {
            summary["kind"] = "report";
            summary["variant"] = j["variant"];
            summary["runs"] = j["runs"].size();
            summary["mean_accuracy"] = j.value("mean_accuracy", 0.0);
            summary["std_accuracy"] = j.value("std_accuracy", 0.0);
            summary["precl_leakage"] = j.value("precl_leakage", 0);
            if (j.contains("dataset")) summary["dataset"] = j["dataset"];
        } else if (j.contains("layer_sizes")) {
            const SavedNetwork saved = network_from_json(j);
            std::size_t parameters = 0;
            for (std::size_t l = 0; l < saved.network.num_weight_layers(); ++l)
                parameters += saved.network.weights[l].size() + saved.network.biases[l].size();
            summary["kind"] = "network";
            summary["layer_sizes"] = saved.network.layer_sizes;
            summary["parameters"] = parameters;
            summary["hidden_activation"] = saved.network.hidden_activation;
            summary["output_activation"] = saved.network.output_activation;
            summary["seed"] = saved.params.rng_seed;
        } else if (j.contains("rows") && j.contains("weights")) {
            const SofmMap map = sofm_from_json(j);
            summary["kind"] = "sofm";
            summary["grid"] = std::to_string(map.rows) + "x" + std::to_string(map.cols);
            summary["dim"] = map.dim;
            summary["trained"] = map.trained;
            summary["seed"] = map.params.rng_seed;
            if (map.labeled) {
                json marks = json::array();
                long legit_only = 0;
                for (ClusterMark mark : map.marks) {
                    const bool pure = mark == ClusterMark::legitimate_only;
                    marks.push_back(pure ? "legitimate_only" : "mixed");
                    if (pure) ++legit_only;
                }
                summary["cluster_marks"] = marks;
                summary["legitimate_only_clusters"] = legit_only;
            } else {
                summary["cluster_marks"] = nullptr;
            }
        } else if (j.contains("order") && j.contains("weights")) {
            summary["kind"] = "ranking";
            summary["features"] = j["weights"].size();
            summary["order"] = j["order"];
            summary["selected"] = j.value("selected", json::array());
        } else {
            throw ParseError(path + ": unrecognized artifact (expected a dataset CSV, report, "
                                    "network, sofm or ranking file)");
        }
        canonical = dump_json(j);
    }

    if (!reserialize_path.empty()) atomic_write_file(reserialize_path, canonical);
    print_summary(global.format, summary);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fake-task detection pipeline for simulated mobile crowdsensing campaigns"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions global;
    auto* seed_opt =
        app.add_option("--seed", global.seed, "Master seed; every random stream derives from it");
    app.add_option("--config", global.config_path, "JSON config file (flags take precedence)");
    app.add_option("--out-dir", global.out_dir, "Directory for emitted artifacts");
    app.add_option("--format", global.format, "Summary format")
        ->check(CLI::IsMember({"json", "csv", "text"}));

    auto* generate = app.add_subcommand("generate", "Generate a campaign dataset CSV");
    GenerateOptions generate_opts;
    std::int64_t total_arg = 0;
    double fake_fraction_arg = 0.0;
    int days_arg = 0;
    double grid_cell_arg = 0.0;
    auto* total_opt = generate->add_option("--total", total_arg, "Total number of tasks");
    auto* fake_opt =
        generate->add_option("--fake-fraction", fake_fraction_arg, "Fake share in (0,1)");
    auto* days_opt = generate->add_option("--days", days_arg, "Campaign length in days");
    auto* cell_opt = generate->add_option("--grid-cell", grid_cell_arg, "Grid cell size in meters");
    generate->add_option("--out", generate_opts.out_path, "Output CSV path");

    auto* run = app.add_subcommand("run", "Run the detection experiments end to end");
    RunOptions run_opts;
    run->add_option("--data", run_opts.data_path, "Existing dataset CSV (skips generation)");
    run->add_option("--variant", run_opts.variant, "all|baseline|prec|combined");
    run->add_option("--features", run_opts.features, "Comma-separated feature indices to pin");
    std::size_t runs_arg = 0;
    auto* runs_opt = run->add_option("--runs", runs_arg, "Training repetitions (default 10)");
    run->add_option("--sofm-grid", run_opts.sofm_grid, "SOFM grid as RxC (default 4x4)");
    std::int64_t run_total_arg = 0;
    double run_fake_arg = 0.0;
    int run_days_arg = 0;
    double run_cell_arg = 0.0;
    auto* run_total_opt = run->add_option("--total", run_total_arg, "Total tasks when generating");
    auto* run_fake_opt = run->add_option("--fake-fraction", run_fake_arg, "Fake share in (0,1)");
    auto* run_days_opt = run->add_option("--days", run_days_arg, "Campaign length in days");
    auto* run_cell_opt = run->add_option("--grid-cell", run_cell_arg, "Grid cell size in meters");

    auto* inspect = app.add_subcommand("inspect", "Summarize a saved artifact");
    std::string inspect_path;
    std::string reserialize_path;
    inspect->add_option("file", inspect_path, "Artifact to inspect")->required();
    inspect->add_option("--reserialize", reserialize_path,
                        "Write the canonical re-serialization to this path");

    CLI11_PARSE(app, argc, argv);
    global.seed_explicit = seed_opt->count() > 0;

    try {
        if (generate->parsed()) {
            if (total_opt->count()) generate_opts.total = total_arg;
            if (fake_opt->count()) generate_opts.fake_fraction = fake_fraction_arg;
            if (days_opt->count()) generate_opts.days = days_arg;
            if (cell_opt->count()) generate_opts.grid_cell = grid_cell_arg;
            return cmd_generate(global, generate_opts);
        }
        if (run->parsed()) {
            if (runs_opt->count()) run_opts.runs = runs_arg;
            if (run_total_opt->count()) run_opts.generation.total = run_total_arg;
            if (run_fake_opt->count()) run_opts.generation.fake_fraction = run_fake_arg;
            if (run_days_opt->count()) run_opts.generation.days = run_days_arg;
            if (run_cell_opt->count()) run_opts.generation.grid_cell = run_cell_arg;
            return cmd_run(global, run_opts);
        }
        if (inspect->parsed()) return cmd_inspect(global, inspect_path, reserialize_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

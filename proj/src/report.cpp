#include "mcsguard/report.hpp"

#include <cmath>
#include <cstdio>

#include "mcsguard/errors.hpp"

namespace mcsguard {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field: ") + key);
    return *it;
}

template <typename T>
T field(const json& j, const char* key) {
    try {
        return require(j, key).get<T>();
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError(std::string("field has the wrong type: ") + key);
    }
}

std::string format_fixed(double value, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

}  // namespace

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

json sofm_to_json(const SofmMap& map) {
    json j;
    j["rows"] = map.rows;
    j["cols"] = map.cols;
    j["dim"] = map.dim;
    j["weights"] = map.weights;
    j["trained"] = map.trained;
    if (map.labeled) {
        std::vector<std::string> marks;
        for (ClusterMark mark : map.marks)
            marks.push_back(mark == ClusterMark::legitimate_only ? "legitimate_only" : "mixed");
        j["cluster_marks"] = marks;
    } else {
        j["cluster_marks"] = nullptr;
    }
    j["params"] = {{"epochs", map.params.epochs},
                   {"alpha0", map.params.alpha0},
                   {"sigma0", map.params.sigma0},
                   {"alpha_floor", map.params.alpha_floor},
                   {"sigma_floor", map.params.sigma_floor},
                   {"decay", map.params.decay},
                   {"seed", map.params.rng_seed}};
    return j;
}

SofmMap sofm_from_json(const json& j) {
    SofmMap map;
    map.rows = field<int>(j, "rows");
    map.cols = field<int>(j, "cols");
    map.dim = field<std::size_t>(j, "dim");
    map.weights = field<std::vector<std::vector<double>>>(j, "weights");
    map.trained = field<bool>(j, "trained");
    if (map.rows < 1 || map.cols < 1) throw ParseError("field out of range: rows/cols");
    if (map.weights.size() != static_cast<std::size_t>(map.rows) * static_cast<std::size_t>(map.cols))
        throw ParseError("field inconsistent: weights (neuron count does not match grid)");
    for (const auto& w : map.weights)
        if (w.size() != map.dim) throw ParseError("field inconsistent: weights (vector length)");

    const json& marks = require(j, "cluster_marks");
    if (!marks.is_null()) {
        for (const auto& mark : field<std::vector<std::string>>(j, "cluster_marks")) {
            if (mark == "legitimate_only")
                map.marks.push_back(ClusterMark::legitimate_only);
            else if (mark == "mixed")
                map.marks.push_back(ClusterMark::mixed);
            else
                throw ParseError("field has an unknown value: cluster_marks");
        }
        if (map.marks.size() != map.weights.size())
            throw ParseError("field inconsistent: cluster_marks (count does not match neurons)");
        map.labeled = true;
    }

    const json& params = require(j, "params");
    map.params.epochs = field<int>(params, "epochs");
    map.params.alpha0 = field<double>(params, "alpha0");
    map.params.sigma0 = field<double>(params, "sigma0");
    map.params.alpha_floor = field<double>(params, "alpha_floor");
    map.params.sigma_floor = field<double>(params, "sigma_floor");
    map.params.decay = field<std::string>(params, "decay");
    map.params.rng_seed = field<std::uint64_t>(params, "seed");
    return map;
}

json network_to_json(const MlpNetwork& network, const TrainParams& params) {
    json j;
    j["layer_sizes"] = network.layer_sizes;
    j["weights"] = network.weights;
    j["biases"] = network.biases;
    j["hidden_activation"] = network.hidden_activation;
    j["output_activation"] = network.output_activation;
    j["params"] = {{"epochs", params.epochs},
                   {"batch_size", params.batch_size},
                   {"learning_rate", params.learning_rate},
                   {"momentum", params.momentum},
                   {"patience", params.patience},
                   {"seed", params.rng_seed}};
    return j;
}

SavedNetwork network_from_json(const json& j) {
    SavedNetwork saved;
    saved.network.layer_sizes = field<std::vector<std::size_t>>(j, "layer_sizes");
    saved.network.weights = field<std::vector<std::vector<double>>>(j, "weights");
    saved.network.biases = field<std::vector<std::vector<double>>>(j, "biases");
    saved.network.hidden_activation = field<std::string>(j, "hidden_activation");
    saved.network.output_activation = field<std::string>(j, "output_activation");

    const auto& sizes = saved.network.layer_sizes;
    if (sizes.size() < 2) throw ParseError("field out of range: layer_sizes");
    if (saved.network.weights.size() != sizes.size() - 1 ||
        saved.network.biases.size() != sizes.size() - 1)
        throw ParseError("field inconsistent: weights/biases layer count");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        if (saved.network.weights[l].size() != sizes[l] * sizes[l + 1])
            throw ParseError("field inconsistent: weights (layer " + std::to_string(l) + ")");
        if (saved.network.biases[l].size() != sizes[l + 1])
            throw ParseError("field inconsistent: biases (layer " + std::to_string(l) + ")");
    }

    const json& params = require(j, "params");
    saved.params.epochs = field<int>(params, "epochs");
    saved.params.batch_size = field<std::size_t>(params, "batch_size");
    saved.params.learning_rate = field<double>(params, "learning_rate");
    saved.params.momentum = field<double>(params, "momentum");
    saved.params.patience = field<int>(params, "patience");
    saved.params.rng_seed = field<std::uint64_t>(params, "seed");
    return saved;
}

json ranking_to_json(const FeatureRanking& ranking, const std::vector<std::size_t>& selected) {
    return {{"weights", ranking.weights}, {"order", ranking.order}, {"selected", selected}};
}

json experiment_config_to_json(const ExperimentConfig& config) {
    json zones = json::array();
    for (const AttackZone& zone : config.generation.attack_zones)
        zones.push_back({{"center_lat", zone.center_lat},
                         {"center_lon", zone.center_lon},
                         {"radius_m", zone.radius_m}});
    json j;
    j["generation"] = {{"total_tasks", config.generation.total_tasks},
                       {"fake_fraction", config.generation.fake_fraction},
                       {"num_days", config.generation.num_days},
                       {"bounding_box",
                        {{"lat_min", config.generation.bounding_box.lat_min},
                         {"lat_max", config.generation.bounding_box.lat_max},
                         {"lon_min", config.generation.bounding_box.lon_min},
                         {"lon_max", config.generation.bounding_box.lon_max}}},
                       {"grid_cell_m", config.generation.grid_cell_m},
                       {"attack_zones", zones}};
    j["train_fraction"] = config.train_fraction;
    j["relieff_k"] = config.relieff_k;
    j["relieff_sample_count"] = config.relieff_sample_count;
    j["n_features"] = config.n_features;
    j["feature_override"] =
        config.feature_override.has_value() ? json(*config.feature_override) : json(nullptr);
    j["sofm"] = {{"rows", config.sofm_rows},
                 {"cols", config.sofm_cols},
                 {"epochs", config.sofm.epochs},
                 {"alpha0", config.sofm.alpha0},
                 {"sigma0", config.sofm.sigma0},
                 {"alpha_floor", config.sofm.alpha_floor},
                 {"sigma_floor", config.sofm.sigma_floor},
                 {"decay", config.sofm.decay}};
    j["purity_threshold"] = config.purity_threshold;
    j["train"] = {{"epochs", config.train.epochs},
                  {"batch_size", config.train.batch_size},
                  {"learning_rate", config.train.learning_rate},
                  {"momentum", config.train.momentum},
                  {"patience", config.train.patience}};
    j["n_runs"] = config.n_runs;
    j["threshold"] = config.threshold;
    j["master_seed"] = config.master_seed;
    return j;
}

void apply_config_json(ExperimentConfig& config, const json& j) {
    try {
        if (j.contains("generation")) {
            const json& g = j["generation"];
            GenerationConfig& gen = config.generation;
            gen.total_tasks = g.value("total_tasks", gen.total_tasks);
            gen.fake_fraction = g.value("fake_fraction", gen.fake_fraction);
            gen.num_days = g.value("num_days", gen.num_days);
            if (g.contains("bounding_box")) {
                const json& box = g["bounding_box"];
                gen.bounding_box.lat_min = box.value("lat_min", gen.bounding_box.lat_min);
                gen.bounding_box.lat_max = box.value("lat_max", gen.bounding_box.lat_max);
                gen.bounding_box.lon_min = box.value("lon_min", gen.bounding_box.lon_min);
                gen.bounding_box.lon_max = box.value("lon_max", gen.bounding_box.lon_max);
            }
            gen.grid_cell_m = g.value("grid_cell_m", gen.grid_cell_m);
            if (g.contains("attack_zones")) {
                gen.attack_zones.clear();
                for (const json& z : g["attack_zones"])
                    gen.attack_zones.push_back({field<double>(z, "center_lat"),
                                                field<double>(z, "center_lon"),
                                                z.value("radius_m", 200.0)});
            }
        }
        config.train_fraction = j.value("train_fraction", config.train_fraction);
        config.relieff_k = j.value("relieff_k", config.relieff_k);
        config.relieff_sample_count = j.value("relieff_sample_count", config.relieff_sample_count);
        config.n_features = j.value("n_features", config.n_features);
        if (j.contains("feature_override") && !j["feature_override"].is_null())
            config.feature_override = j["feature_override"].get<std::vector<std::size_t>>();
        if (j.contains("sofm")) {
            const json& s = j["sofm"];
            config.sofm_rows = s.value("rows", config.sofm_rows);
            config.sofm_cols = s.value("cols", config.sofm_cols);
            config.sofm.epochs = s.value("epochs", config.sofm.epochs);
            config.sofm.alpha0 = s.value("alpha0", config.sofm.alpha0);
            config.sofm.sigma0 = s.value("sigma0", config.sofm.sigma0);
            config.sofm.alpha_floor = s.value("alpha_floor", config.sofm.alpha_floor);
            config.sofm.sigma_floor = s.value("sigma_floor", config.sofm.sigma_floor);
        }
        config.purity_threshold = j.value("purity_threshold", config.purity_threshold);
        if (j.contains("train")) {
            const json& t = j["train"];
            config.train.epochs = t.value("epochs", config.train.epochs);
            config.train.batch_size = t.value("batch_size", config.train.batch_size);
            config.train.learning_rate = t.value("learning_rate", config.train.learning_rate);
            config.train.momentum = t.value("momentum", config.train.momentum);
            config.train.patience = t.value("patience", config.train.patience);
        }
        config.n_runs = j.value("n_runs", config.n_runs);
        config.threshold = j.value("threshold", config.threshold);
        config.master_seed = j.value("master_seed", config.master_seed);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("malformed config: ") + e.what());
    }
}

json report_to_json(const EvaluationReport& report, const json& config_echo) {
    json runs = json::array();
    for (const RunResult& run : report.runs)
        runs.push_back({{"seed", run.seed},
                        {"tp", run.metrics.tp},
                        {"tn", run.metrics.tn},
                        {"fp", run.metrics.fp},
                        {"fn", run.metrics.fn},
                        {"accuracy", run.metrics.accuracy},
                        {"precision", run.metrics.precision},
                        {"recall", run.metrics.recall},
                        {"f1", run.metrics.f1}});
    json j;
    j["variant"] = report.variant;
    j["runs"] = runs;
    j["mean_accuracy"] = report.mean_accuracy;
    j["std_accuracy"] = report.std_accuracy;
    j["precl_leakage"] = report.precl_leakage;
    j["dataset"] = {{"seed", report.dataset.seed},
                    {"train", report.dataset.train_size},
                    {"test", report.dataset.test_size}};
    j["config"] = config_echo;
    return j;
}

std::string contingency_csv(const SofmMap& map, const ContingencyTable& train,
                            const ContingencyTable& test) {
    if (!map.labeled) throw StateError("contingency_csv: map is not labeled");
    std::string out = "dataset,tasks";
    for (std::size_t j = 0; j < map.neuron_count(); ++j)
        out += ",c" + std::to_string(j + 1);
    out += ",preclustered\n";

    const auto emit = [&](const char* dataset, const ContingencyTable& table) {
        // Legitimate-only clusters: total tasks routed there.
        out += std::string(dataset) + ",legitimate_only";
        for (std::size_t j = 0; j < map.neuron_count(); ++j) {
            out += ",";
            if (map.marks[j] == ClusterMark::legitimate_only)
                out += std::to_string(table.legitimate[j] + table.fake[j]);
        }
        out += "," + std::to_string(table.precl_total) + "\n";

        out += std::string(dataset) + ",mixed_legitimate";
        for (std::size_t j = 0; j < map.neuron_count(); ++j) {
            out += ",";
            if (map.marks[j] == ClusterMark::mixed) out += std::to_string(table.legitimate[j]);
        }
        out += "," + std::to_string(table.mixed_legitimate) + "\n";

        out += std::string(dataset) + ",mixed_fake";
        for (std::size_t j = 0; j < map.neuron_count(); ++j) {
            out += ",";
            if (map.marks[j] == ClusterMark::mixed) out += std::to_string(table.fake[j]);
        }
        out += "," + std::to_string(table.mixed_fake) + "\n";
    };
    emit("train", train);
    emit("test", test);
    return out;
}

std::string accuracy_chart_svg(const std::vector<EvaluationReport>& reports) {
    const int width = 640;
    const int height = 420;
    const double left = 70.0, right = 30.0, top = 40.0, bottom = 60.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    const auto x_of = [&](std::size_t i, double frac) {
        const double slot = plot_w / static_cast<double>(reports.size());
        return left + slot * (static_cast<double>(i) + frac);
    };
    const auto y_of = [&](double accuracy) { return top + plot_h * (1.0 - accuracy); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
           "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) +
           " " + std::to_string(height) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <text x=\"" + format_fixed(left + plot_w / 2, 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
           "Mean test accuracy over runs</text>\n";

    // Axis and horizontal gridlines every 0.1.
    for (int tick = 0; tick <= 10; ++tick) {
        const double acc = static_cast<double>(tick) / 10.0;
        const double y = y_of(acc);
        svg += "  <line x1=\"" + format_fixed(left, 2) + "\" y1=\"" + format_fixed(y, 2) +
               "\" x2=\"" + format_fixed(left + plot_w, 2) + "\" y2=\"" + format_fixed(y, 2) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "  <text x=\"" + format_fixed(left - 8, 2) + "\" y=\"" + format_fixed(y + 4, 2) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               format_fixed(acc, 1) + "</text>\n";
    }
    svg += "  <line x1=\"" + format_fixed(left, 2) + "\" y1=\"" + format_fixed(top, 2) + "\" x2=\"" +
           format_fixed(left, 2) + "\" y2=\"" + format_fixed(top + plot_h, 2) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg += "  <line x1=\"" + format_fixed(left, 2) + "\" y1=\"" + format_fixed(top + plot_h, 2) +
           "\" x2=\"" + format_fixed(left + plot_w, 2) + "\" y2=\"" + format_fixed(top + plot_h, 2) +
           "\" stroke=\"black\" stroke-width=\"1\"/>\n";

    const char* colors[] = {"#4878a8", "#e49444", "#6a9f58"};
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const EvaluationReport& report = reports[i];
        const double bar_x = x_of(i, 0.25);
        const double bar_w = plot_w / static_cast<double>(reports.size()) * 0.5;
        const double bar_y = y_of(report.mean_accuracy);
        svg += "  <rect x=\"" + format_fixed(bar_x, 2) + "\" y=\"" + format_fixed(bar_y, 2) +
               "\" width=\"" + format_fixed(bar_w, 2) + "\" height=\"" +
               format_fixed(top + plot_h - bar_y, 2) + "\" fill=\"" + colors[i % 3] +
               "\" data-mean=\"" + format_fixed(report.mean_accuracy, 6) + "\"/>\n";
        for (const RunResult& run : report.runs)
            svg += "  <circle cx=\"" + format_fixed(bar_x + bar_w / 2, 2) + "\" cy=\"" +
                   format_fixed(y_of(run.metrics.accuracy), 2) +
                   "\" r=\"3\" fill=\"black\" fill-opacity=\"0.45\"/>\n";
        svg += "  <text x=\"" + format_fixed(bar_x + bar_w / 2, 2) + "\" y=\"" +
               format_fixed(bar_y - 6, 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               format_fixed(report.mean_accuracy, 4) + "</text>\n";
        svg += "  <text x=\"" + format_fixed(bar_x + bar_w / 2, 2) + "\" y=\"" +
               format_fixed(top + plot_h + 18, 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
               report.variant + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace mcsguard

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcsguard/csv.hpp"
#include "mcsguard/deepnn.hpp"
#include "mcsguard/errors.hpp"
#include "mcsguard/features.hpp"
#include "mcsguard/pipeline.hpp"
#include "mcsguard/report.hpp"
#include "mcsguard/sofm.hpp"
#include "mcsguard/taskgen.hpp"

namespace py = pybind11;
using namespace mcsguard;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Fake-task detection pipeline for simulated mobile crowdsensing campaigns";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<TrainingError>(m, "TrainingError", PyExc_RuntimeError);
    py::register_exception<PipelineError>(m, "PipelineError", PyExc_RuntimeError);
    py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    // ------------------------------------------------------------- taskgen
    py::class_<TaskRecord>(m, "TaskRecord")
        .def(py::init<>())
        .def_readwrite("id", &TaskRecord::id)
        .def_readwrite("day", &TaskRecord::day)
        .def_readwrite("hour", &TaskRecord::hour)
        .def_readwrite("minute", &TaskRecord::minute)
        .def_readwrite("duration_min", &TaskRecord::duration_min)
        .def_readwrite("battery_pct", &TaskRecord::battery_pct)
        .def_readwrite("latitude", &TaskRecord::latitude)
        .def_readwrite("longitude", &TaskRecord::longitude)
        .def_readwrite("grid_number", &TaskRecord::grid_number)
        .def_readwrite("on_peak", &TaskRecord::on_peak)
        .def_readwrite("coverage_m", &TaskRecord::coverage_m)
        .def_readwrite("legitimacy", &TaskRecord::legitimacy)
        .def("__eq__", [](const TaskRecord& a, const TaskRecord& b) { return a == b; });

    py::class_<BoundingBox>(m, "BoundingBox")
        .def(py::init<>())
        .def_readwrite("lat_min", &BoundingBox::lat_min)
        .def_readwrite("lat_max", &BoundingBox::lat_max)
        .def_readwrite("lon_min", &BoundingBox::lon_min)
        .def_readwrite("lon_max", &BoundingBox::lon_max)
        .def("contains", &BoundingBox::contains);

    py::class_<AttackZone>(m, "AttackZone")
        .def(py::init<>())
        .def_readwrite("center_lat", &AttackZone::center_lat)
        .def_readwrite("center_lon", &AttackZone::center_lon)
        .def_readwrite("radius_m", &AttackZone::radius_m);

    py::class_<GenerationConfig>(m, "GenerationConfig")
        .def(py::init<>())
        .def_readwrite("total_tasks", &GenerationConfig::total_tasks)
        .def_readwrite("fake_fraction", &GenerationConfig::fake_fraction)
        .def_readwrite("num_days", &GenerationConfig::num_days)
        .def_readwrite("bounding_box", &GenerationConfig::bounding_box)
        .def_readwrite("grid_cell_m", &GenerationConfig::grid_cell_m)
        .def_readwrite("attack_zones", &GenerationConfig::attack_zones)
        .def_readwrite("rng_seed", &GenerationConfig::rng_seed);

    py::enum_<DatasetOrigin>(m, "DatasetOrigin")
        .value("generated", DatasetOrigin::generated)
        .value("loaded", DatasetOrigin::loaded);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init<>())
        .def_readwrite("records", &Dataset::records)
        .def_readwrite("origin", &Dataset::origin)
        .def("__len__", &Dataset::size);

    m.def("default_generation_config", &default_generation_config);
    m.def("square_bounding_box", &square_bounding_box, py::arg("center_lat"),
          py::arg("center_lon"), py::arg("side_m"));
    m.def("haversine_m", &haversine_m);
    m.def("compute_on_peak", &compute_on_peak);
    m.def(
        "assign_grid",
        [](double lat, double lon, const GenerationConfig& config) {
            return assign_grid(lat, lon, config);
        },
        py::arg("latitude"), py::arg("longitude"), py::arg("config"));
    m.def("generate_campaign", &generate_campaign);
    m.def("split_temporal", &split_temporal, py::arg("dataset"), py::arg("train_fraction"));
    m.def("dataset_to_csv", &dataset_to_csv);
    m.def("dataset_from_csv",
          [](const std::string& text) { return dataset_from_csv(text); });

    // ------------------------------------------------------------ features
    py::class_<FeatureMatrix>(m, "FeatureMatrix")
        .def(py::init<>())
        .def_readwrite("feature_names", &FeatureMatrix::feature_names)
        .def_readwrite("rows", &FeatureMatrix::rows)
        .def_readwrite("labels", &FeatureMatrix::labels)
        .def("n", &FeatureMatrix::n)
        .def("dim", &FeatureMatrix::dim);

    py::class_<Scaler>(m, "Scaler")
        .def(py::init<>())
        .def_readwrite("mins", &Scaler::mins)
        .def_readwrite("maxs", &Scaler::maxs);

    py::class_<FeatureRanking>(m, "FeatureRanking")
        .def(py::init<>())
        .def_readwrite("weights", &FeatureRanking::weights)
        .def_readwrite("order", &FeatureRanking::order);

    m.def("candidate_feature_names", [] { return candidate_feature_names(); });
    m.def("make_feature_matrix", &make_feature_matrix);
    m.def("select_columns", &select_columns);
    m.def("select_rows", &select_rows);
    m.def("fit_scaler", &fit_scaler);
    m.def("transform", &transform);
    m.def("inverse_transform", &inverse_transform);
    m.def("relieff", &relieff, py::arg("matrix"), py::arg("k_neighbors") = 10,
          py::arg("sample_count") = 0, py::arg("rng_seed") = 1);
    m.def("select_top_k", &select_top_k);
    m.def("sequential_forward_select", &sequential_forward_select, py::arg("matrix"),
          py::arg("ranking"), py::arg("k_max"), py::arg("evaluator"));

    // ---------------------------------------------------------------- sofm
    py::enum_<ClusterMark>(m, "ClusterMark")
        .value("legitimate_only", ClusterMark::legitimate_only)
        .value("mixed", ClusterMark::mixed);

    py::class_<SofmParams>(m, "SofmParams")
        .def(py::init<>())
        .def_readwrite("epochs", &SofmParams::epochs)
        .def_readwrite("alpha0", &SofmParams::alpha0)
        .def_readwrite("sigma0", &SofmParams::sigma0)
        .def_readwrite("alpha_floor", &SofmParams::alpha_floor)
        .def_readwrite("sigma_floor", &SofmParams::sigma_floor)
        .def_readwrite("decay", &SofmParams::decay)
        .def_readwrite("rng_seed", &SofmParams::rng_seed);

    py::class_<SofmMap>(m, "SofmMap")
        .def(py::init<>())
        .def_readwrite("rows", &SofmMap::rows)
        .def_readwrite("cols", &SofmMap::cols)
        .def_readwrite("dim", &SofmMap::dim)
        .def_readwrite("weights", &SofmMap::weights)
        .def_readwrite("marks", &SofmMap::marks)
        .def_readwrite("trained", &SofmMap::trained)
        .def_readwrite("labeled", &SofmMap::labeled)
        .def_readwrite("params", &SofmMap::params)
        .def("neuron_count", &SofmMap::neuron_count);

    py::class_<ClusterPartition>(m, "ClusterPartition")
        .def(py::init<>())
        .def_readwrite("legitimate_only", &ClusterPartition::legitimate_only)
        .def_readwrite("mixed", &ClusterPartition::mixed)
        .def_readwrite("assignment", &ClusterPartition::assignment)
        .def_readwrite("legitimate_indices", &ClusterPartition::legitimate_indices)
        .def_readwrite("mixed_indices", &ClusterPartition::mixed_indices);

    py::class_<ContingencyTable>(m, "ContingencyTable")
        .def(py::init<>())
        .def_readwrite("legitimate", &ContingencyTable::legitimate)
        .def_readwrite("fake", &ContingencyTable::fake)
        .def_readwrite("precl_total", &ContingencyTable::precl_total)
        .def_readwrite("mixed_legitimate", &ContingencyTable::mixed_legitimate)
        .def_readwrite("mixed_fake", &ContingencyTable::mixed_fake);

    m.def("init_map", &init_map, py::arg("rows"), py::arg("cols"), py::arg("dim"),
          py::arg("rng_seed"));
    m.def("grid_distance", &grid_distance);
    m.def("neighborhood", &neighborhood);
    m.def("bmu", &bmu);
    m.def("train_sofm", &train_sofm);
    m.def("assign_clusters", &assign_clusters);
    m.def("label_clusters", &label_clusters, py::arg("neuron_count"), py::arg("assignment"),
          py::arg("labels"), py::arg("purity_threshold") = 1.0);
    m.def("label_map", &label_map, py::arg("map"), py::arg("rows"), py::arg("labels"),
          py::arg("purity_threshold") = 1.0);
    m.def("partition", &partition);
    m.def("make_contingency", &make_contingency);

    // -------------------------------------------------------------- deepnn
    py::class_<MlpNetwork>(m, "MlpNetwork")
        .def(py::init<>())
        .def_readwrite("layer_sizes", &MlpNetwork::layer_sizes)
        .def_readwrite("weights", &MlpNetwork::weights)
        .def_readwrite("biases", &MlpNetwork::biases)
        .def_readwrite("hidden_activation", &MlpNetwork::hidden_activation)
        .def_readwrite("output_activation", &MlpNetwork::output_activation)
        .def("input_dim", &MlpNetwork::input_dim)
        .def("__eq__", [](const MlpNetwork& a, const MlpNetwork& b) { return a == b; });

    py::class_<TrainParams>(m, "TrainParams")
        .def(py::init<>())
        .def_readwrite("epochs", &TrainParams::epochs)
        .def_readwrite("batch_size", &TrainParams::batch_size)
        .def_readwrite("learning_rate", &TrainParams::learning_rate)
        .def_readwrite("momentum", &TrainParams::momentum)
        .def_readwrite("patience", &TrainParams::patience)
        .def_readwrite("rng_seed", &TrainParams::rng_seed);

    py::class_<TrainingTrace>(m, "TrainingTrace")
        .def(py::init<>())
        .def_readwrite("epoch_losses", &TrainingTrace::epoch_losses)
        .def_readwrite("initial_loss", &TrainingTrace::initial_loss)
        .def_readwrite("final_loss", &TrainingTrace::final_loss)
        .def_readwrite("best_epoch", &TrainingTrace::best_epoch)
        .def_readwrite("residuals", &TrainingTrace::residuals);

    py::class_<PredictionSet>(m, "PredictionSet")
        .def(py::init<>())
        .def_readwrite("probabilities", &PredictionSet::probabilities)
        .def_readwrite("labels", &PredictionSet::labels)
        .def_readwrite("index_map", &PredictionSet::index_map)
        .def_readwrite("predicted_legitimate", &PredictionSet::predicted_legitimate)
        .def_readwrite("predicted_fake", &PredictionSet::predicted_fake);

    m.def("make_network", &make_network);
    m.def("init_network", &init_network, py::arg("input_dim"), py::arg("rng_seed"));
    m.def("forward", &forward);
    m.def("mean_loss", &mean_loss);
    m.def("train", &train, py::arg("network"), py::arg("samples"), py::arg("labels"),
          py::arg("params"));
    m.def("predict", &predict, py::arg("network"), py::arg("samples"), py::arg("threshold") = 0.5,
          py::arg("index_map") = std::vector<std::size_t>{});
    m.def("gradient_check", &gradient_check, py::arg("network"), py::arg("sample"),
          py::arg("label"), py::arg("epsilon") = 1e-5);

    // ------------------------------------------------------------ pipeline
    py::class_<Metrics>(m, "Metrics")
        .def(py::init<>())
        .def_readwrite("tp", &Metrics::tp)
        .def_readwrite("tn", &Metrics::tn)
        .def_readwrite("fp", &Metrics::fp)
        .def_readwrite("fn", &Metrics::fn)
        .def_readwrite("accuracy", &Metrics::accuracy)
        .def_readwrite("precision", &Metrics::precision)
        .def_readwrite("recall", &Metrics::recall)
        .def_readwrite("f1", &Metrics::f1)
        .def_readwrite("precision_defined", &Metrics::precision_defined)
        .def_readwrite("recall_defined", &Metrics::recall_defined);

    py::class_<RunResult>(m, "RunResult")
        .def(py::init<>())
        .def_readwrite("seed", &RunResult::seed)
        .def_readwrite("metrics", &RunResult::metrics)
        .def_readwrite("final_train_loss", &RunResult::final_train_loss);

    py::class_<DatasetFingerprint>(m, "DatasetFingerprint")
        .def(py::init<>())
        .def_readwrite("seed", &DatasetFingerprint::seed)
        .def_readwrite("train_size", &DatasetFingerprint::train_size)
        .def_readwrite("test_size", &DatasetFingerprint::test_size);

    py::class_<EvaluationReport>(m, "EvaluationReport")
        .def(py::init<>())
        .def_readwrite("variant", &EvaluationReport::variant)
        .def_readwrite("runs", &EvaluationReport::runs)
        .def_readwrite("mean_accuracy", &EvaluationReport::mean_accuracy)
        .def_readwrite("std_accuracy", &EvaluationReport::std_accuracy)
        .def_readwrite("precl_leakage", &EvaluationReport::precl_leakage)
        .def_readwrite("dataset", &EvaluationReport::dataset);

    py::class_<CombinedPrediction>(m, "CombinedPrediction")
        .def(py::init<>())
        .def_readwrite("labels", &CombinedPrediction::labels)
        .def_readwrite("from_precl", &CombinedPrediction::from_precl);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def(py::init<>())
        .def_readwrite("generation", &ExperimentConfig::generation)
        .def_readwrite("train_fraction", &ExperimentConfig::train_fraction)
        .def_readwrite("relieff_k", &ExperimentConfig::relieff_k)
        .def_readwrite("relieff_sample_count", &ExperimentConfig::relieff_sample_count)
        .def_readwrite("n_features", &ExperimentConfig::n_features)
        .def_readwrite("feature_override", &ExperimentConfig::feature_override)
        .def_readwrite("sofm_rows", &ExperimentConfig::sofm_rows)
        .def_readwrite("sofm_cols", &ExperimentConfig::sofm_cols)
        .def_readwrite("sofm", &ExperimentConfig::sofm)
        .def_readwrite("purity_threshold", &ExperimentConfig::purity_threshold)
        .def_readwrite("train", &ExperimentConfig::train)
        .def_readwrite("n_runs", &ExperimentConfig::n_runs)
        .def_readwrite("threshold", &ExperimentConfig::threshold)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def(py::init<>())
        .def_readwrite("baseline", &ExperimentResult::baseline)
        .def_readwrite("prec", &ExperimentResult::prec)
        .def_readwrite("combined", &ExperimentResult::combined)
        .def_readwrite("dataset", &ExperimentResult::dataset)
        .def_readwrite("ranking", &ExperimentResult::ranking)
        .def_readwrite("selected_features", &ExperimentResult::selected_features)
        .def_readwrite("scaler", &ExperimentResult::scaler)
        .def_readwrite("sofm", &ExperimentResult::sofm)
        .def_readwrite("train_partition", &ExperimentResult::train_partition)
        .def_readwrite("test_partition", &ExperimentResult::test_partition)
        .def_readwrite("train_table", &ExperimentResult::train_table)
        .def_readwrite("test_table", &ExperimentResult::test_table)
        .def_readwrite("best_baseline_network", &ExperimentResult::best_baseline_network)
        .def_readwrite("best_prec_network", &ExperimentResult::best_prec_network)
        .def_readwrite("precl_test_leakage", &ExperimentResult::precl_test_leakage);

    m.def("evaluate", &evaluate, py::arg("predicted"), py::arg("truth"));
    m.def("combine_with_precl", &combine_with_precl, py::arg("predictions"),
          py::arg("precl_indices"), py::arg("test_size"));
    m.def("derive_dataset_seed", &derive_dataset_seed);
    m.def("derive_sofm_seed", &derive_sofm_seed);
    m.def("derive_relieff_seed", &derive_relieff_seed);
    m.def("derive_run_seeds", &derive_run_seeds);
    m.def(
        "run_full_experiment",
        [](const ExperimentConfig& config) {
            py::gil_scoped_release release;
            return run_full_experiment(config);
        },
        py::arg("config"));
    m.def(
        "run_full_experiment_on",
        [](const ExperimentConfig& config, const Dataset& dataset) {
            py::gil_scoped_release release;
            return run_full_experiment(config, dataset);
        },
        py::arg("config"), py::arg("dataset"));

    // ------------------------------------------------- serialized artifacts
    m.def("report_json", [](const EvaluationReport& report, const ExperimentConfig& config) {
        return dump_json(report_to_json(report, experiment_config_to_json(config)));
    });
    m.def("sofm_json", [](const SofmMap& map) { return dump_json(sofm_to_json(map)); });
    m.def("network_json", [](const MlpNetwork& network, const TrainParams& params) {
        return dump_json(network_to_json(network, params));
    });
    m.def("ranking_json",
          [](const FeatureRanking& ranking, const std::vector<std::size_t>& selected) {
              return dump_json(ranking_to_json(ranking, selected));
          });
    m.def("contingency_csv", &contingency_csv);
    m.def("accuracy_chart_svg", &accuracy_chart_svg);
}

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mcsguard/pipeline.hpp"

namespace mcsguard {

/// Canonical dump used for every JSON artifact: two-space indent,
/// sorted keys (nlohmann default), trailing newline. Parsing a file
/// produced this way and dumping it again is byte-identical.
std::string dump_json(const nlohmann::json& j);

nlohmann::json sofm_to_json(const SofmMap& map);
SofmMap sofm_from_json(const nlohmann::json& j);

struct SavedNetwork {
    MlpNetwork network;
    TrainParams params;
};

nlohmann::json network_to_json(const MlpNetwork& network, const TrainParams& params);
SavedNetwork network_from_json(const nlohmann::json& j);

nlohmann::json ranking_to_json(const FeatureRanking& ranking,
                               const std::vector<std::size_t>& selected);

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

/// Overlays the fields present in `j` onto `config` (missing fields keep
/// their current values). Throws ParseError naming any malformed field.
void apply_config_json(ExperimentConfig& config, const nlohmann::json& j);

/// Report artifact; `config_echo` lands under the "config" key.
nlohmann::json report_to_json(const EvaluationReport& report, const nlohmann::json& config_echo);

/// Cluster contingency CSV: one row group per dataset with per-cluster
/// legitimate-only counts, mixed legitimate counts and mixed fake
/// counts, plus the pre-clustered totals column.
std::string contingency_csv(const SofmMap& map, const ContingencyTable& train,
                            const ContingencyTable& test);

/// Self-contained bar chart (SVG): one bar per report at its mean
/// accuracy, per-run accuracies as dot markers, value labels on top.
std::string accuracy_chart_svg(const std::vector<EvaluationReport>& reports);

}  // namespace mcsguard

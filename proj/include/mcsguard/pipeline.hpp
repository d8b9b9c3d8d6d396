#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcsguard/deepnn.hpp"
#include "mcsguard/features.hpp"
#include "mcsguard/sofm.hpp"
#include "mcsguard/task.hpp"

namespace mcsguard {

/// Confusion counts with legitimate as the positive class. precision
/// and recall are reported as 0 (and flagged undefined) when their
/// denominator is empty.
struct Metrics {
    long tp = 0;
    long tn = 0;
    long fp = 0;
    long fn = 0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool precision_defined = true;
    bool recall_defined = true;
};

Metrics evaluate(const std::vector<int>& predicted, const std::vector<int>& truth);

struct RunResult {
    std::uint64_t seed = 0;
    Metrics metrics;
    double final_train_loss = 0.0;
};

struct DatasetFingerprint {
    std::uint64_t seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
};

struct EvaluationReport {
    std::string variant;  // DeepNN | PrecDeepNN | PrecDeepNNPrecL
    std::vector<RunResult> runs;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;  // population standard deviation
    long precl_leakage = 0;     // fake test records routed to PrecL
    DatasetFingerprint dataset;
};

/// Report plus the per-run predictions and the argmin-by-training-loss
/// network (ties broken by lowest seed).
struct VariantRuns {
    EvaluationReport report;
    MlpNetwork best_network;
    std::vector<PredictionSet> predictions;
};

/// Trains one network per seed on the full training matrix and
/// evaluates on the full test matrix (columns restricted to
/// feature_indices). Runs execute concurrently; results are merged in
/// seed order.
VariantRuns run_baseline(const FeatureMatrix& norm_train, const FeatureMatrix& norm_test,
                         const std::vector<std::size_t>& feature_indices, const TrainParams& params,
                         const std::vector<std::uint64_t>& run_seeds, double threshold,
                         const DatasetFingerprint& fingerprint);

/// Same, but trains on the mixed training partition and evaluates on
/// the mixed test partition only. Both partitions must come from the
/// same trained map.
VariantRuns run_precdeepnn(const ClusterPartition& train_partition,
                           const ClusterPartition& test_partition, const FeatureMatrix& norm_train,
                           const FeatureMatrix& norm_test,
                           const std::vector<std::size_t>& feature_indices, const TrainParams& params,
                           const std::vector<std::uint64_t>& run_seeds, double threshold,
                           const DatasetFingerprint& fingerprint);

/// Final labels over the full test set: PrecL records are accepted as
/// legitimate unconditionally, mixed records keep their model labels.
struct CombinedPrediction {
    std::vector<int> labels;
    std::vector<char> from_precl;
};

/// predictions.index_map and precl_indices must disjointly cover
/// 0..test_size-1; throws ConsistencyError on overlap or gap.
CombinedPrediction combine_with_precl(const PredictionSet& predictions,
                                      const std::vector<std::size_t>& precl_indices,
                                      std::size_t test_size);

struct ExperimentConfig {
    GenerationConfig generation;  // rng_seed is derived from master_seed
    double train_fraction = 0.8;
    int relieff_k = 10;
    long relieff_sample_count = 0;  // <= 0: every training instance
    std::size_t n_features = 4;
    std::optional<std::vector<std::size_t>> feature_override;
    int sofm_rows = 4;
    int sofm_cols = 4;
    SofmParams sofm;  // rng_seed is derived from master_seed
    double purity_threshold = 1.0;
    TrainParams train;  // rng_seed is derived per run
    std::size_t n_runs = 10;
    double threshold = 0.5;
    std::uint64_t master_seed = 7;
};

/// Seeds derived from the master seed by fixed offsets.
std::uint64_t derive_dataset_seed(std::uint64_t master_seed);
std::uint64_t derive_sofm_seed(std::uint64_t master_seed);
std::uint64_t derive_relieff_seed(std::uint64_t master_seed);
std::vector<std::uint64_t> derive_run_seeds(std::uint64_t master_seed, std::size_t n_runs);

struct ExperimentResult {
    EvaluationReport baseline;
    EvaluationReport prec;
    EvaluationReport combined;
    Dataset dataset;
    FeatureRanking ranking;
    std::vector<std::size_t> selected_features;
    Scaler scaler;
    SofmMap sofm;
    ClusterPartition train_partition;
    ClusterPartition test_partition;
    ContingencyTable train_table;
    ContingencyTable test_table;
    MlpNetwork best_baseline_network;
    MlpNetwork best_prec_network;
    long precl_test_leakage = 0;
};

/// generate -> split -> normalize -> rank features -> train and label
/// the map -> partition -> run the three variants on shared run seeds.
/// Any stage failure is rethrown as PipelineError tagged with the stage
/// name.
ExperimentResult run_full_experiment(const ExperimentConfig& config);

/// Same pipeline over an already-loaded dataset (skips generation).
ExperimentResult run_full_experiment(const ExperimentConfig& config, Dataset dataset);

}  // namespace mcsguard

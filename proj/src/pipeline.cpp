#include "mcsguard/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "mcsguard/errors.hpp"
#include "mcsguard/taskgen.hpp"

namespace mcsguard {

namespace {

void finalize_report(EvaluationReport& report) {
    double sum = 0.0;
    for (const RunResult& run : report.runs) sum += run.metrics.accuracy;
    report.mean_accuracy = report.runs.empty() ? 0.0 : sum / static_cast<double>(report.runs.size());
    double var = 0.0;
    for (const RunResult& run : report.runs) {
        const double d = run.metrics.accuracy - report.mean_accuracy;
        var += d * d;
    }
    report.std_accuracy =
        report.runs.empty() ? 0.0 : std::sqrt(var / static_cast<double>(report.runs.size()));
}

struct SingleRun {
    MlpNetwork network;
    PredictionSet predictions;
    double final_train_loss = 0.0;
};

/// Shared runner: one network per seed, trained on (train_rows,
/// train_labels), predictions on eval_rows carrying eval_index_map.
VariantRuns run_variant(const std::string& variant, const std::vector<std::vector<double>>& train_rows,
                        const std::vector<int>& train_labels,
                        const std::vector<std::vector<double>>& eval_rows,
                        const std::vector<int>& eval_labels,
                        const std::vector<std::size_t>& eval_index_map, const TrainParams& params,
                        const std::vector<std::uint64_t>& run_seeds, double threshold,
                        const DatasetFingerprint& fingerprint) {
    if (run_seeds.empty()) throw DomainError("run_variant: at least one run seed is required");
    if (train_rows.empty()) throw DomainError("run_variant: empty training set");
    const std::size_t dim = train_rows.front().size();

    const auto one_run = [&](std::uint64_t seed) {
        TrainParams run_params = params;
        run_params.rng_seed = seed;
        auto [network, trace] = train(init_network(dim, seed), train_rows, train_labels, run_params);
        SingleRun run;
        run.predictions = predict(network, eval_rows, threshold, eval_index_map);
        run.network = std::move(network);
        run.final_train_loss = trace.final_loss;
        return run;
    };

    // The repetitions are independent; results are collected in seed
    // order so the report does not depend on scheduling.
    std::vector<std::future<SingleRun>> futures;
    futures.reserve(run_seeds.size());
    for (std::uint64_t seed : run_seeds)
        futures.push_back(std::async(std::launch::async, one_run, seed));

    VariantRuns result;
    result.report.variant = variant;
    result.report.dataset = fingerprint;
    std::size_t best_index = 0;
    for (std::size_t r = 0; r < run_seeds.size(); ++r) {
        SingleRun run = futures[r].get();
        RunResult entry;
        entry.seed = run_seeds[r];
        entry.final_train_loss = run.final_train_loss;
        entry.metrics = evaluate(run.predictions.labels, eval_labels);
        result.report.runs.push_back(entry);
        result.predictions.push_back(std::move(run.predictions));
        if (r == 0 || run.final_train_loss <
                          result.report.runs[best_index].final_train_loss) {
            best_index = r;
            result.best_network = std::move(run.network);
        }
    }
    finalize_report(result.report);
    return result;
}

long count_fakes(const Dataset& dataset) {
    return static_cast<long>(std::count_if(dataset.records.begin(), dataset.records.end(),
                                           [](const TaskRecord& r) { return r.legitimacy == 0; }));
}

template <typename Fn>
auto with_stage(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        throw PipelineError(std::string(stage) + ": " + e.what());
    }
}

}  // namespace

Metrics evaluate(const std::vector<int>& predicted, const std::vector<int>& truth) {
    if (predicted.size() != truth.size())
        throw DomainError("evaluate: predicted and truth lengths differ");
    Metrics m;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        if ((predicted[i] != 0 && predicted[i] != 1) || (truth[i] != 0 && truth[i] != 1))
            throw DomainError("evaluate: labels must be binary");
        if (truth[i] == 1)
            ++(predicted[i] == 1 ? m.tp : m.fn);
        else
            ++(predicted[i] == 0 ? m.tn : m.fp);
    }
    const long total = m.tp + m.tn + m.fp + m.fn;
    m.accuracy = total > 0 ? static_cast<double>(m.tp + m.tn) / static_cast<double>(total) : 0.0;
    if (m.tp + m.fp > 0) {
        m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    } else {
        m.precision_defined = false;
    }
    if (m.tp + m.fn > 0) {
        m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    } else {
        m.recall_defined = false;
    }
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                          : 0.0;
    return m;
}

VariantRuns run_baseline(const FeatureMatrix& norm_train, const FeatureMatrix& norm_test,
                         const std::vector<std::size_t>& feature_indices, const TrainParams& params,
                         const std::vector<std::uint64_t>& run_seeds, double threshold,
                         const DatasetFingerprint& fingerprint) {
    const FeatureMatrix train_sel = select_columns(norm_train, feature_indices);
    const FeatureMatrix test_sel = select_columns(norm_test, feature_indices);
    std::vector<std::size_t> index_map(test_sel.n());
    std::iota(index_map.begin(), index_map.end(), 0);
    return run_variant("DeepNN", train_sel.rows, train_sel.labels, test_sel.rows, test_sel.labels,
                       index_map, params, run_seeds, threshold, fingerprint);
}

VariantRuns run_precdeepnn(const ClusterPartition& train_partition,
                           const ClusterPartition& test_partition, const FeatureMatrix& norm_train,
                           const FeatureMatrix& norm_test,
                           const std::vector<std::size_t>& feature_indices, const TrainParams& params,
                           const std::vector<std::uint64_t>& run_seeds, double threshold,
                           const DatasetFingerprint& fingerprint) {
    if (train_partition.mixed_indices.empty())
        throw PipelineError("prec: mixed training partition is empty");
    const FeatureMatrix train_sel =
        select_rows(select_columns(norm_train, feature_indices), train_partition.mixed_indices);
    const FeatureMatrix test_sel =
        select_rows(select_columns(norm_test, feature_indices), test_partition.mixed_indices);
    VariantRuns runs =
        run_variant("PrecDeepNN", train_sel.rows, train_sel.labels, test_sel.rows, test_sel.labels,
                    test_partition.mixed_indices, params, run_seeds, threshold, fingerprint);
    runs.report.precl_leakage = count_fakes(test_partition.legitimate_only);
    return runs;
}

CombinedPrediction combine_with_precl(const PredictionSet& predictions,
                                      const std::vector<std::size_t>& precl_indices,
                                      std::size_t test_size) {
    if (predictions.index_map.size() != predictions.labels.size())
        throw ConsistencyError("combine_with_precl: prediction set index map misaligned");
    CombinedPrediction combined;
    combined.labels.assign(test_size, -1);
    combined.from_precl.assign(test_size, 0);
    std::vector<bool> covered(test_size, false);

    for (std::size_t k = 0; k < predictions.index_map.size(); ++k) {
        const std::size_t i = predictions.index_map[k];
        if (i >= test_size)
            throw ConsistencyError("combine_with_precl: prediction index out of range");
        if (covered[i]) throw ConsistencyError("combine_with_precl: overlapping prediction index");
        covered[i] = true;
        combined.labels[i] = predictions.labels[k];
    }
    for (std::size_t i : precl_indices) {
        if (i >= test_size) throw ConsistencyError("combine_with_precl: PrecL index out of range");
        if (covered[i])
            throw ConsistencyError("combine_with_precl: PrecL overlaps the prediction set");
        covered[i] = true;
        combined.labels[i] = 1;  // auto-accepted as legitimate
        combined.from_precl[i] = 1;
    }
    for (std::size_t i = 0; i < test_size; ++i)
        if (!covered[i])
            throw ConsistencyError("combine_with_precl: test record " + std::to_string(i) +
                                   " received no label");
    return combined;
}

std::uint64_t derive_dataset_seed(std::uint64_t master_seed) { return master_seed + 1; }
std::uint64_t derive_sofm_seed(std::uint64_t master_seed) { return master_seed + 2; }
std::uint64_t derive_relieff_seed(std::uint64_t master_seed) { return master_seed + 3; }

std::vector<std::uint64_t> derive_run_seeds(std::uint64_t master_seed, std::size_t n_runs) {
    std::vector<std::uint64_t> seeds(n_runs);
    std::iota(seeds.begin(), seeds.end(), master_seed + 10);
    return seeds;
}

ExperimentResult run_full_experiment(const ExperimentConfig& config) {
    Dataset dataset = with_stage("generate", [&] {
        GenerationConfig generation = config.generation;
        generation.rng_seed = derive_dataset_seed(config.master_seed);
        return generate_campaign(generation);
    });
    return run_full_experiment(config, std::move(dataset));
}

ExperimentResult run_full_experiment(const ExperimentConfig& config, Dataset dataset) {
    if (config.n_runs < 1) throw PipelineError("config: n_runs must be at least 1");
    if (!(config.threshold > 0.0 && config.threshold < 1.0))
        throw PipelineError("config: threshold must lie strictly between 0 and 1");

    ExperimentResult result;
    result.dataset = std::move(dataset);

    const auto [train_ds, test_ds] = with_stage(
        "split", [&] { return split_temporal(result.dataset, config.train_fraction); });

    FeatureMatrix norm_train, norm_test;
    with_stage("normalize", [&] {
        const FeatureMatrix train_fm = make_feature_matrix(train_ds);
        const FeatureMatrix test_fm = make_feature_matrix(test_ds);
        result.scaler = fit_scaler(train_fm);
        norm_train = transform(result.scaler, train_fm);
        norm_test = transform(result.scaler, test_fm);
        return 0;
    });

    with_stage("relieff", [&] {
        result.ranking = relieff(norm_train, config.relieff_k, config.relieff_sample_count,
                                 derive_relieff_seed(config.master_seed));
        if (config.feature_override.has_value()) {
            const auto& chosen = *config.feature_override;
            if (chosen.empty()) throw DomainError("feature override must not be empty");
            for (std::size_t f : chosen)
                if (f >= norm_train.dim())
                    throw DomainError("feature override index out of range: " + std::to_string(f));
            std::vector<std::size_t> sorted = chosen;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                throw DomainError("feature override contains duplicates");
            result.selected_features = chosen;
        } else {
            result.selected_features = select_top_k(result.ranking, config.n_features);
        }
        return 0;
    });

    FeatureMatrix train_sel, test_sel;
    with_stage("sofm", [&] {
        train_sel = select_columns(norm_train, result.selected_features);
        test_sel = select_columns(norm_test, result.selected_features);
        SofmParams sofm_params = config.sofm;
        sofm_params.rng_seed = derive_sofm_seed(config.master_seed);
        SofmMap map = init_map(config.sofm_rows, config.sofm_cols, result.selected_features.size(),
                               sofm_params.rng_seed);
        map = train_sofm(std::move(map), train_sel.rows, sofm_params);
        label_map(map, train_sel.rows, train_sel.labels, config.purity_threshold);
        result.sofm = std::move(map);
        result.train_partition = partition(result.sofm, train_ds, train_sel.rows);
        result.test_partition = partition(result.sofm, test_ds, test_sel.rows);
        result.train_table =
            make_contingency(result.sofm, result.train_partition.assignment, train_sel.labels);
        result.test_table =
            make_contingency(result.sofm, result.test_partition.assignment, test_sel.labels);
        result.precl_test_leakage = count_fakes(result.test_partition.legitimate_only);
        return 0;
    });

    const DatasetFingerprint fingerprint{derive_dataset_seed(config.master_seed), train_ds.size(),
                                         test_ds.size()};
    const std::vector<std::uint64_t> run_seeds = derive_run_seeds(config.master_seed, config.n_runs);

    VariantRuns baseline = with_stage("baseline", [&] {
        return run_baseline(norm_train, norm_test, result.selected_features, config.train,
                            run_seeds, config.threshold, fingerprint);
    });

    VariantRuns prec = with_stage("prec", [&] {
        return run_precdeepnn(result.train_partition, result.test_partition, norm_train, norm_test,
                              result.selected_features, config.train, run_seeds, config.threshold,
                              fingerprint);
    });

    with_stage("combined", [&] {
        EvaluationReport combined;
        combined.variant = "PrecDeepNNPrecL";
        combined.dataset = fingerprint;
        combined.precl_leakage = result.precl_test_leakage;
        for (std::size_t r = 0; r < prec.predictions.size(); ++r) {
            const CombinedPrediction full = combine_with_precl(
                prec.predictions[r], result.test_partition.legitimate_indices, test_ds.size());
            RunResult entry;
            entry.seed = run_seeds[r];
            entry.final_train_loss = prec.report.runs[r].final_train_loss;
            entry.metrics = evaluate(full.labels, test_sel.labels);
            combined.runs.push_back(entry);
        }
        finalize_report(combined);
        result.combined = std::move(combined);
        return 0;
    });

    result.baseline = std::move(baseline.report);
    result.prec = std::move(prec.report);
    result.best_baseline_network = std::move(baseline.best_network);
    result.best_prec_network = std::move(prec.best_network);
    return result;
}

}  // namespace mcsguard

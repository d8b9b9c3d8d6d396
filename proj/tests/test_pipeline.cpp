#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcsguard/errors.hpp"
#include "mcsguard/pipeline.hpp"
#include "mcsguard/taskgen.hpp"

using namespace mcsguard;

namespace {

// Independent tally-loop oracle for confusion counts.
struct TallyOracle {
    long tp = 0, tn = 0, fp = 0, fn = 0;
};

TallyOracle tally(const std::vector<int>& pred, const std::vector<int>& truth) {
    TallyOracle t;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (truth[i] == 1 && pred[i] == 1) ++t.tp;
        if (truth[i] == 1 && pred[i] == 0) ++t.fn;
        if (truth[i] == 0 && pred[i] == 0) ++t.tn;
        if (truth[i] == 0 && pred[i] == 1) ++t.fp;
    }
    return t;
}

ExperimentConfig small_experiment(std::uint64_t master_seed) {
    ExperimentConfig config;
    config.generation = default_generation_config();
    config.generation.total_tasks = 1500;
    config.n_runs = 2;
    config.train.epochs = 40;
    config.sofm.epochs = 30;
    config.master_seed = master_seed;
    return config;
}

}  // namespace

TEST_CASE("evaluate agrees with a tally-loop oracle") {
    std::vector<int> same = {1, 0, 1, 1, 0};
    Metrics perfect = evaluate(same, same);
    CHECK(perfect.accuracy == 1.0);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    std::vector<int> flipped;
    for (int v : same) flipped.push_back(1 - v);
    CHECK(evaluate(flipped, same).accuracy == 0.0);

    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<int> pred, truth;
    for (int i = 0; i < 100; ++i) {
        pred.push_back(coin(rng));
        truth.push_back(coin(rng));
    }
    const Metrics m = evaluate(pred, truth);
    const TallyOracle t = tally(pred, truth);
    CHECK(m.tp == t.tp);
    CHECK(m.tn == t.tn);
    CHECK(m.fp == t.fp);
    CHECK(m.fn == t.fn);
    CHECK(m.accuracy ==
          doctest::Approx(static_cast<double>(t.tp + t.tn) / 100.0).epsilon(1e-12));
    CHECK(m.precision ==
          doctest::Approx(static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp)));
    CHECK(m.recall == doctest::Approx(static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn)));

    CHECK_THROWS_AS(evaluate({1, 0}, {1}), DomainError);
    CHECK_THROWS_AS(evaluate({2, 0}, {1, 0}), DomainError);

    // All-fake predictions leave precision undefined; reported as 0.
    const Metrics degenerate = evaluate({0, 0, 0}, {1, 0, 1});
    CHECK(degenerate.precision == 0.0);
    CHECK_FALSE(degenerate.precision_defined);
    CHECK(degenerate.f1 == 0.0);
}

TEST_CASE("combine_with_precl unions disjoint index sets") {
    PredictionSet preds;
    preds.labels = {1, 1, 1};
    preds.probabilities = {0.9, 0.8, 0.7};
    preds.index_map = {0, 2, 4};

    const CombinedPrediction combined = combine_with_precl(preds, {1, 3}, 5);
    CHECK(combined.labels == std::vector<int>{1, 1, 1, 1, 1});
    CHECK(combined.from_precl == std::vector<char>{0, 1, 0, 1, 0});

    CHECK_THROWS_AS(combine_with_precl(preds, {0, 3}, 5), ConsistencyError);  // overlap
    CHECK_THROWS_AS(combine_with_precl(preds, {1}, 5), ConsistencyError);     // gap at 3
    CHECK_THROWS_AS(combine_with_precl(preds, {1, 7}, 5), ConsistencyError);  // out of range
}

TEST_CASE("PrecL fakes surface as exactly that many extra errors") {
    // Mixed predictions perfect on indices 0..3; PrecL holds indices
    // 4..9 of which three are fake.
    PredictionSet preds;
    preds.labels = {1, 0, 1, 0};
    preds.probabilities = {0.9, 0.1, 0.8, 0.2};
    preds.index_map = {0, 1, 2, 3};
    const std::vector<std::size_t> precl = {4, 5, 6, 7, 8, 9};
    std::vector<int> truth = {1, 0, 1, 0, 1, 0, 1, 0, 1, 0};  // fakes at 5, 7, 9 in PrecL

    const CombinedPrediction combined = combine_with_precl(preds, precl, truth.size());
    const Metrics m = evaluate(combined.labels, truth);

    // Oracle relabeling: PrecL records set to their true labels.
    std::vector<int> oracle_labels = combined.labels;
    for (std::size_t i : precl) oracle_labels[i] = truth[i];
    const Metrics oracle = evaluate(oracle_labels, truth);

    const long errors = m.fp + m.fn;
    const long oracle_errors = oracle.fp + oracle.fn;
    CHECK(errors - oracle_errors == 3);  // one per leaked fake
    CHECK(m.fp - oracle.fp == 3);        // legitimate=positive: leaks are FPs
}

TEST_CASE("run_baseline on separable data is perfect each run") {
    // Feature 0 separates the classes with a wide margin.
    FeatureMatrix train, test;
    train.feature_names = {"f0", "f1"};
    test.feature_names = {"f0", "f1"};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 80; ++i) {
        const int label = i % 2;
        std::vector<double> row = {label == 1 ? 0.8 + 0.2 * unit(rng) : 0.2 * unit(rng), unit(rng)};
        (i < 60 ? train : test).rows.push_back(row);
        (i < 60 ? train : test).labels.push_back(label);
    }

    TrainParams params;
    params.epochs = 120;
    params.learning_rate = 0.05;
    const DatasetFingerprint fp{1, train.n(), test.n()};
    const VariantRuns one = run_baseline(train, test, {0, 1}, params, {11}, 0.5, fp);
    CHECK(one.report.runs.size() == 1);
    CHECK(one.report.mean_accuracy == one.report.runs[0].metrics.accuracy);
    CHECK(one.report.variant == "DeepNN");

    const VariantRuns three = run_baseline(train, test, {0, 1}, params, {11, 12, 13}, 0.5, fp);
    for (const RunResult& run : three.report.runs) CHECK(run.metrics.accuracy == 1.0);
    CHECK(three.report.std_accuracy == 0.0);
}

TEST_CASE("all-mixed partition reduces prec to the baseline") {
    GenerationConfig gen = default_generation_config();
    gen.total_tasks = 600;
    gen.rng_seed = 15;
    const Dataset dataset = generate_campaign(gen);
    const auto [train_ds, test_ds] = split_temporal(dataset, 0.8);

    const FeatureMatrix train_fm = make_feature_matrix(train_ds);
    const FeatureMatrix test_fm = make_feature_matrix(test_ds);
    const Scaler scaler = fit_scaler(train_fm);
    const FeatureMatrix norm_train = transform(scaler, train_fm);
    const FeatureMatrix norm_test = transform(scaler, test_fm);
    const std::vector<std::size_t> features = {4, 5, 6, 8};

    // Map labeled with all-fake labels: every cluster mixed.
    const FeatureMatrix train_sel = select_columns(norm_train, features);
    const FeatureMatrix test_sel = select_columns(norm_test, features);
    SofmParams sofm_params;
    sofm_params.epochs = 20;
    SofmMap map = train_sofm(init_map(2, 2, 4, 5), train_sel.rows, sofm_params);
    label_map(map, train_sel.rows, std::vector<int>(train_sel.n(), 0), 1.0);
    const ClusterPartition train_part = partition(map, train_ds, train_sel.rows);
    const ClusterPartition test_part = partition(map, test_ds, test_sel.rows);
    CHECK(train_part.legitimate_only.size() == 0);

    TrainParams params;
    params.epochs = 25;
    const DatasetFingerprint fp{15, train_ds.size(), test_ds.size()};
    const std::vector<std::uint64_t> seeds = {31, 32};
    const VariantRuns base = run_baseline(norm_train, norm_test, features, params, seeds, 0.5, fp);
    const VariantRuns prec = run_precdeepnn(train_part, test_part, norm_train, norm_test, features,
                                            params, seeds, 0.5, fp);
    CHECK(prec.report.precl_leakage == 0);
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        CHECK(prec.report.runs[r].metrics.accuracy == base.report.runs[r].metrics.accuracy);
        CHECK(prec.report.runs[r].metrics.tp == base.report.runs[r].metrics.tp);
        CHECK(prec.report.runs[r].metrics.fp == base.report.runs[r].metrics.fp);
        CHECK(prec.report.runs[r].final_train_loss == base.report.runs[r].final_train_loss);
    }

    // Replaying the prec variant is bit-identical.
    const VariantRuns again = run_precdeepnn(train_part, test_part, norm_train, norm_test, features,
                                             params, seeds, 0.5, fp);
    CHECK(again.best_network == prec.best_network);
    for (std::size_t r = 0; r < seeds.size(); ++r) {
        CHECK(again.report.runs[r].metrics.accuracy == prec.report.runs[r].metrics.accuracy);
        CHECK(again.report.runs[r].final_train_loss == prec.report.runs[r].final_train_loss);
    }

    // Empty mixed training partition is a pipeline error.
    ClusterPartition empty_train = train_part;
    empty_train.mixed_indices.clear();
    CHECK_THROWS_AS(run_precdeepnn(empty_train, test_part, norm_train, norm_test, features, params,
                                   seeds, 0.5, fp),
                    PipelineError);
}

TEST_CASE("full experiment: structure, identity and determinism") {
    const ExperimentConfig config = small_experiment(99);
    const ExperimentResult result = run_full_experiment(config);

    CHECK(result.baseline.variant == "DeepNN");
    CHECK(result.prec.variant == "PrecDeepNN");
    CHECK(result.combined.variant == "PrecDeepNNPrecL");
    for (const EvaluationReport* report : {&result.baseline, &result.prec, &result.combined}) {
        CHECK(report->runs.size() == config.n_runs);
        double mean = 0.0;
        for (const RunResult& run : report->runs) mean += run.metrics.accuracy;
        mean /= static_cast<double>(report->runs.size());
        CHECK(report->mean_accuracy == doctest::Approx(mean).epsilon(1e-12));
        CHECK(report->dataset.train_size + report->dataset.test_size == result.dataset.size());
    }

    // Partition bookkeeping.
    const std::size_t test_size = result.test_partition.assignment.size();
    CHECK(result.test_partition.legitimate_only.size() + result.test_partition.mixed.size() ==
          test_size);
    long leak = 0;
    for (const TaskRecord& r : result.test_partition.legitimate_only.records)
        if (r.legitimacy == 0) ++leak;
    CHECK(result.precl_test_leakage == leak);
    CHECK(result.combined.precl_leakage == leak);

    // Combined-accuracy identity: correct_mixed + legitimate PrecL count.
    const auto [train_ds, test_ds] = split_temporal(result.dataset, config.train_fraction);
    std::vector<int> test_labels;
    for (const TaskRecord& r : test_ds.records) test_labels.push_back(r.legitimacy);
    for (std::size_t r = 0; r < config.n_runs; ++r) {
        const Metrics& mixed = result.prec.runs[r].metrics;
        const long correct_mixed = mixed.tp + mixed.tn;
        const long legit_in_precl =
            static_cast<long>(result.test_partition.legitimate_only.size()) - leak;
        const Metrics& comb = result.combined.runs[r].metrics;
        CHECK(comb.tp + comb.tn == correct_mixed + legit_in_precl);
        CHECK(comb.accuracy == doctest::Approx(static_cast<double>(correct_mixed + legit_in_precl) /
                                               static_cast<double>(test_size))
                                   .epsilon(1e-12));
        // Leakage equals the error surplus of auto-accepting PrecL.
        CHECK(comb.fp - mixed.fp == leak);
        CHECK(comb.fn == mixed.fn);
    }

    // Training-set PrecL is pure at threshold 1.0.
    for (const TaskRecord& r : result.train_partition.legitimate_only.records)
        CHECK(r.legitimacy == 1);

    // Bit-identical replay.
    const ExperimentResult replay = run_full_experiment(config);
    CHECK(replay.baseline.mean_accuracy == result.baseline.mean_accuracy);
    CHECK(replay.combined.mean_accuracy == result.combined.mean_accuracy);
    CHECK(replay.dataset.records == result.dataset.records);
    CHECK(replay.sofm.weights == result.sofm.weights);
    CHECK(replay.best_prec_network == result.best_prec_network);
    for (std::size_t r = 0; r < config.n_runs; ++r)
        CHECK(replay.combined.runs[r].metrics.accuracy ==
              result.combined.runs[r].metrics.accuracy);
}

TEST_CASE("full experiment rejects degenerate configurations") {
    ExperimentConfig config = small_experiment(5);
    config.generation.fake_fraction = 0.0;
    CHECK_THROWS_WITH_AS(run_full_experiment(config), doctest::Contains("generate"), PipelineError);

    config = small_experiment(5);
    config.n_runs = 0;
    CHECK_THROWS_AS(run_full_experiment(config), PipelineError);

    config = small_experiment(5);
    config.feature_override = std::vector<std::size_t>{1, 1};
    CHECK_THROWS_WITH_AS(run_full_experiment(config), doctest::Contains("relieff"), PipelineError);

    config = small_experiment(5);
    config.feature_override = std::vector<std::size_t>{42};
    CHECK_THROWS_AS(run_full_experiment(config), PipelineError);
}

TEST_CASE("feature override pins the model inputs") {
    ExperimentConfig config = small_experiment(21);
    config.feature_override = std::vector<std::size_t>{4, 5, 8, 6};
    const ExperimentResult result = run_full_experiment(config);
    CHECK(result.selected_features == std::vector<std::size_t>{4, 5, 8, 6});
    CHECK(result.sofm.dim == 4);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mcsguard/errors.hpp"
#include "mcsguard/sofm.hpp"

using namespace mcsguard;

namespace {

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

// Two well separated 2-D blobs with +-0.05 jitter.
std::vector<std::vector<double>> two_blobs(std::size_t per_blob, std::uint64_t seed,
                                           std::vector<int>* blob_of = nullptr) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    std::vector<std::vector<double>> samples;
    for (std::size_t i = 0; i < 2 * per_blob; ++i) {
        const int blob = static_cast<int>(i % 2);
        const double cx = blob == 0 ? 0.2 : 0.8;
        samples.push_back({cx + jitter(rng), cx + jitter(rng)});
        if (blob_of) blob_of->push_back(blob);
    }
    return samples;
}

Dataset tiny_dataset(std::size_t n) {
    Dataset d;
    for (std::size_t i = 0; i < n; ++i) {
        TaskRecord r;
        r.id = static_cast<std::int64_t>(i + 1);
        r.hour = static_cast<int>(i % 24);
        r.legitimacy = static_cast<int>(i % 2);
        d.records.push_back(r);
    }
    return d;
}

}  // namespace

TEST_CASE("init_map shapes and determinism") {
    const SofmMap map = init_map(4, 4, 4, 11);
    CHECK(map.neuron_count() == 16);
    for (const auto& w : map.weights) {
        CHECK(w.size() == 4);
        for (double v : w) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
    CHECK_FALSE(map.trained);

    const SofmMap single = init_map(1, 1, 3, 5);
    CHECK(single.neuron_count() == 1);

    const SofmMap again = init_map(4, 4, 4, 11);
    CHECK(map.weights == again.weights);
    const SofmMap other = init_map(4, 4, 4, 12);
    CHECK(map.weights != other.weights);

    CHECK_THROWS_AS(init_map(0, 4, 4, 1), DomainError);
    CHECK_THROWS_AS(init_map(4, 0, 4, 1), DomainError);
    CHECK_THROWS_AS(init_map(4, 4, 0, 1), DomainError);
}

TEST_CASE("bmu selection and tie-breaking") {
    SofmMap single = init_map(1, 1, 2, 1);
    CHECK(bmu(single, {0.3, 0.9}) == 0);

    SofmMap pair = init_map(1, 2, 2, 1);
    pair.weights[0] = {0.0, 0.0};
    pair.weights[1] = {1.0, 1.0};
    CHECK(bmu(pair, {0.1, 0.1}) == 0);
    CHECK(bmu(pair, {0.9, 0.8}) == 1);
    CHECK(bmu(pair, {0.5, 0.5}) == 0);  // equidistant, lowest index wins

    CHECK_THROWS_AS(bmu(pair, {0.5}), DomainError);
}

TEST_CASE("neighborhood function properties") {
    const SofmMap map = init_map(4, 4, 2, 3);
    for (std::size_t b = 0; b < map.neuron_count(); ++b) {
        CHECK(neighborhood(map, b, b, 1.3) == 1.0);
        // Non-increasing in grid distance for fixed sigma.
        for (int g = 0; g <= 3; ++g) {
            for (std::size_t j = 0; j < map.neuron_count(); ++j) {
                if (grid_distance(map, b, j) != g) continue;
                for (std::size_t k = 0; k < map.neuron_count(); ++k) {
                    if (grid_distance(map, b, k) <= g) continue;
                    CHECK(neighborhood(map, b, j, 0.8) >= neighborhood(map, b, k, 0.8));
                }
            }
        }
    }
    // Chebyshev distance on the lattice.
    CHECK(grid_distance(map, 0, 15) == 3);   // (0,0) -> (3,3)
    CHECK(grid_distance(map, 0, 3) == 3);    // (0,0) -> (0,3)
    CHECK(grid_distance(map, 5, 10) == 1);   // (1,1) -> (2,2)
}

TEST_CASE("single update moves the winner strictly closer") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> w(3), x(3);
        for (int f = 0; f < 3; ++f) {
            w[f] = unit(rng);
            x[f] = unit(rng);
        }
        const double step = std::nextafter(unit(rng), 1.0);  // in (0,1]
        const double before = euclidean(w, x);
        std::vector<double> updated = w;
        for (int f = 0; f < 3; ++f) updated[f] += step * (x[f] - w[f]);
        const double after = euclidean(updated, x);
        if (before > 0.0) CHECK(after < before);
    }
}

TEST_CASE("training converges to a repeated sample") {
    SofmMap map = init_map(1, 1, 2, 9);
    const std::vector<std::vector<double>> samples(8, std::vector<double>{0.42, 0.13});
    SofmParams params;
    params.epochs = 300;
    params.rng_seed = 9;
    const SofmMap trained = train_sofm(map, samples, params);
    CHECK(trained.trained);
    CHECK(std::abs(trained.weights[0][0] - 0.42) < 1e-3);
    CHECK(std::abs(trained.weights[0][1] - 0.13) < 1e-3);
}

TEST_CASE("a 1x2 map splits two blobs") {
    std::vector<int> blob_of;
    const auto samples = two_blobs(40, 31, &blob_of);
    SofmParams params;
    params.epochs = 120;
    params.sigma0 = 1.0;
    params.rng_seed = 4;
    const SofmMap trained = train_sofm(init_map(1, 2, 2, 8), samples, params);

    // Blob-membership oracle: every sample's BMU equals the neuron its
    // blob captured, and the two blobs map to different neurons.
    const auto assignment = assign_clusters(trained, samples);
    const std::size_t neuron_of_blob0 = assignment[0];
    const std::size_t neuron_of_blob1 = assignment[1];
    CHECK(neuron_of_blob0 != neuron_of_blob1);
    for (std::size_t i = 0; i < samples.size(); ++i)
        CHECK(assignment[i] == (blob_of[i] == 0 ? neuron_of_blob0 : neuron_of_blob1));
}

TEST_CASE("train_sofm validates inputs") {
    SofmMap map = init_map(2, 2, 2, 1);
    SofmParams params;
    CHECK_THROWS_AS(train_sofm(map, {}, params), DomainError);
    params.alpha0 = 0.0;
    CHECK_THROWS_AS(train_sofm(map, {{0.1, 0.2}}, params), DomainError);
    params = SofmParams{};
    params.epochs = 0;
    CHECK_THROWS_AS(train_sofm(map, {{0.1, 0.2}}, params), DomainError);
}

TEST_CASE("assign_clusters requires a trained map and is deterministic") {
    SofmMap map = init_map(2, 2, 2, 1);
    CHECK_THROWS_AS(assign_clusters(map, {{0.1, 0.2}}), StateError);

    SofmParams params;
    params.epochs = 10;
    const SofmMap trained = train_sofm(map, two_blobs(10, 3), params);
    CHECK(assign_clusters(trained, {}).empty());

    const std::vector<std::vector<double>> twice = {{0.4, 0.4}, {0.4, 0.4}};
    const auto assignment = assign_clusters(trained, twice);
    CHECK(assignment[0] == assignment[1]);
}

TEST_CASE("label_clusters purity rules") {
    // Neuron 0: pure legitimate (418), neuron 1: 640 legitimate + 100
    // fake, neuron 2: empty, neuron 3: pure fake.
    std::vector<std::size_t> assignment;
    std::vector<int> labels;
    for (int i = 0; i < 418; ++i) { assignment.push_back(0); labels.push_back(1); }
    for (int i = 0; i < 640; ++i) { assignment.push_back(1); labels.push_back(1); }
    for (int i = 0; i < 100; ++i) { assignment.push_back(1); labels.push_back(0); }
    for (int i = 0; i < 12; ++i) { assignment.push_back(3); labels.push_back(0); }

    const auto marks = label_clusters(4, assignment, labels, 1.0);
    CHECK(marks[0] == ClusterMark::legitimate_only);
    CHECK(marks[1] == ClusterMark::mixed);
    CHECK(marks[2] == ClusterMark::mixed);  // empty -> mixed
    CHECK(marks[3] == ClusterMark::mixed);

    // 640/740 = 0.865 passes a lower threshold.
    const auto lenient = label_clusters(4, assignment, labels, 0.85);
    CHECK(lenient[1] == ClusterMark::legitimate_only);

    CHECK_THROWS_AS(label_clusters(4, assignment, labels, 0.5), DomainError);
    CHECK_THROWS_AS(label_clusters(4, assignment, labels, 1.5), DomainError);
    CHECK_THROWS_AS(label_clusters(1, assignment, labels, 1.0), DomainError);
    CHECK_THROWS_AS(label_clusters(4, assignment, std::vector<int>{1}, 1.0), DomainError);
}

TEST_CASE("partition splits and reconstructs the dataset") {
    std::mt19937_64 rng(2025);
    std::uniform_int_distribution<int> grid_dim(1, 4);
    std::uniform_int_distribution<int> size_dist(0, 60);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int trial = 0; trial < 100; ++trial) {
        const int rows = grid_dim(rng);
        const int cols = grid_dim(rng);
        SofmMap map = init_map(rows, cols, 2, rng());
        map.trained = true;  // random prototypes act as the trained state
        const std::size_t n = static_cast<std::size_t>(size_dist(rng));

        Dataset dataset = tiny_dataset(n);
        std::vector<std::vector<double>> features;
        for (std::size_t i = 0; i < n; ++i) features.push_back({unit(rng), unit(rng)});

        std::vector<int> labels;
        for (const TaskRecord& r : dataset.records) labels.push_back(r.legitimacy);
        label_map(map, features, labels, 1.0);

        const ClusterPartition part = partition(map, dataset, features);
        CHECK(part.legitimate_only.size() + part.mixed.size() == n);

        // Disjoint, exhaustive, order-preserving reconstruction.
        std::vector<TaskRecord> rebuilt(n);
        std::vector<bool> seen(n, false);
        for (std::size_t k = 0; k < part.legitimate_indices.size(); ++k) {
            const std::size_t i = part.legitimate_indices[k];
            CHECK_FALSE(seen[i]);
            seen[i] = true;
            rebuilt[i] = part.legitimate_only.records[k];
        }
        for (std::size_t k = 0; k < part.mixed_indices.size(); ++k) {
            const std::size_t i = part.mixed_indices[k];
            CHECK_FALSE(seen[i]);
            seen[i] = true;
            rebuilt[i] = part.mixed.records[k];
        }
        CHECK(rebuilt == dataset.records);
        CHECK(std::is_sorted(part.legitimate_indices.begin(), part.legitimate_indices.end()));
        CHECK(std::is_sorted(part.mixed_indices.begin(), part.mixed_indices.end()));

        // Training-set purity at threshold 1.0: no fakes in PrecL.
        for (const TaskRecord& r : part.legitimate_only.records) CHECK(r.legitimacy == 1);
    }
}

TEST_CASE("partition state errors and all-mixed reduction") {
    const auto samples = two_blobs(10, 5);
    SofmParams params;
    params.epochs = 5;
    SofmMap map = train_sofm(init_map(2, 2, 2, 3), samples, params);

    Dataset dataset = tiny_dataset(samples.size());
    CHECK_THROWS_AS(partition(map, dataset, samples), StateError);  // unlabeled

    // All labels fake: every cluster is mixed, PrecL empty.
    std::vector<int> all_fake(samples.size(), 0);
    label_map(map, samples, all_fake, 1.0);
    const ClusterPartition part = partition(map, dataset, samples);
    CHECK(part.legitimate_only.size() == 0);
    CHECK(part.mixed.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) CHECK(part.mixed_indices[i] == i);
}

TEST_CASE("training is deterministic for fixed seed and data") {
    const auto samples = two_blobs(25, 88);
    SofmParams params;
    params.epochs = 40;
    params.rng_seed = 21;
    const SofmMap a = train_sofm(init_map(3, 3, 2, 14), samples, params);
    const SofmMap b = train_sofm(init_map(3, 3, 2, 14), samples, params);
    CHECK(a.weights == b.weights);

    const auto assign_a = assign_clusters(a, samples);
    const auto assign_b = assign_clusters(b, samples);
    CHECK(assign_a == assign_b);
}

TEST_CASE("contingency table totals") {
    const auto samples = two_blobs(20, 55);
    SofmParams params;
    params.epochs = 30;
    SofmMap map = train_sofm(init_map(1, 2, 2, 2), samples, params);

    // Blob 0 legitimate, blob 1 mixed.
    std::vector<int> labels;
    for (std::size_t i = 0; i < samples.size(); ++i)
        labels.push_back(i % 2 == 0 ? 1 : static_cast<int>(i % 4 == 1));
    label_map(map, samples, labels, 1.0);
    const auto assignment = assign_clusters(map, samples);
    const ContingencyTable table = make_contingency(map, assignment, labels);

    long legit_total = 0, fake_total = 0;
    for (std::size_t j = 0; j < map.neuron_count(); ++j) {
        legit_total += table.legitimate[j];
        fake_total += table.fake[j];
    }
    CHECK(legit_total == static_cast<long>(std::count(labels.begin(), labels.end(), 1)));
    CHECK(fake_total == static_cast<long>(std::count(labels.begin(), labels.end(), 0)));
    CHECK(table.precl_total + table.mixed_legitimate + table.mixed_fake ==
          static_cast<long>(samples.size()));
}

#include "mcsguard/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "mcsguard/errors.hpp"

namespace mcsguard {

namespace {

void check_same_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got)
        throw DomainError(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                          " vs " + std::to_string(expected) + ")");
}

std::vector<double> feature_ranges(const FeatureMatrix& matrix) {
    std::vector<double> lo(matrix.dim(), std::numeric_limits<double>::infinity());
    std::vector<double> hi(matrix.dim(), -std::numeric_limits<double>::infinity());
    for (const auto& row : matrix.rows) {
        for (std::size_t f = 0; f < row.size(); ++f) {
            lo[f] = std::min(lo[f], row[f]);
            hi[f] = std::max(hi[f], row[f]);
        }
    }
    std::vector<double> ranges(matrix.dim());
    for (std::size_t f = 0; f < ranges.size(); ++f) ranges[f] = hi[f] - lo[f];
    return ranges;
}

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double sum = 0.0;
    for (std::size_t f = 0; f < a.size(); ++f) {
        const double d = a[f] - b[f];
        sum += d * d;
    }
    return sum;
}

// Indices of the k nearest rows among `candidates`, ordered by
// (distance, index).
std::vector<std::size_t> nearest(const FeatureMatrix& matrix, std::size_t self,
                                 const std::vector<std::size_t>& candidates, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(candidates.size());
    for (std::size_t j : candidates) {
        if (j == self) continue;
        scored.emplace_back(squared_distance(matrix.rows[self], matrix.rows[j]), j);
    }
    const std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end());
    std::vector<std::size_t> result(take);
    for (std::size_t i = 0; i < take; ++i) result[i] = scored[i].second;
    return result;
}

}  // namespace

const std::vector<std::string>& candidate_feature_names() {
    static const std::vector<std::string> names = {
        "hour",      "minute",      "duration_min", "battery_pct", "latitude",
        "longitude", "grid_number", "on_peak",      "coverage_m"};
    return names;
}

FeatureMatrix make_feature_matrix(const Dataset& dataset) {
    FeatureMatrix matrix;
    matrix.feature_names = candidate_feature_names();
    matrix.rows.reserve(dataset.size());
    matrix.labels.reserve(dataset.size());
    for (const TaskRecord& r : dataset.records) {
        matrix.rows.push_back({static_cast<double>(r.hour), static_cast<double>(r.minute),
                               static_cast<double>(r.duration_min), static_cast<double>(r.battery_pct),
                               r.latitude, r.longitude, static_cast<double>(r.grid_number),
                               static_cast<double>(r.on_peak), static_cast<double>(r.coverage_m)});
        matrix.labels.push_back(r.legitimacy);
    }
    return matrix;
}

FeatureMatrix select_columns(const FeatureMatrix& matrix, const std::vector<std::size_t>& columns) {
    FeatureMatrix out;
    for (std::size_t c : columns) {
        if (c >= matrix.dim()) throw DomainError("column index out of range: " + std::to_string(c));
        out.feature_names.push_back(matrix.feature_names[c]);
    }
    out.rows.reserve(matrix.n());
    for (const auto& row : matrix.rows) {
        std::vector<double> slim;
        slim.reserve(columns.size());
        for (std::size_t c : columns) slim.push_back(row[c]);
        out.rows.push_back(std::move(slim));
    }
    out.labels = matrix.labels;
    return out;
}

FeatureMatrix select_rows(const FeatureMatrix& matrix, const std::vector<std::size_t>& row_indices) {
    FeatureMatrix out;
    out.feature_names = matrix.feature_names;
    out.rows.reserve(row_indices.size());
    out.labels.reserve(row_indices.size());
    for (std::size_t i : row_indices) {
        if (i >= matrix.n()) throw DomainError("row index out of range: " + std::to_string(i));
        out.rows.push_back(matrix.rows[i]);
        out.labels.push_back(matrix.labels[i]);
    }
    return out;
}

Scaler fit_scaler(const FeatureMatrix& train) {
    if (train.n() == 0) throw DomainError("cannot fit a scaler on an empty matrix");
    Scaler scaler;
    scaler.mins.assign(train.dim(), std::numeric_limits<double>::infinity());
    scaler.maxs.assign(train.dim(), -std::numeric_limits<double>::infinity());
    for (const auto& row : train.rows) {
        check_same_dim(train.dim(), row.size(), "fit_scaler");
        for (std::size_t f = 0; f < row.size(); ++f) {
            scaler.mins[f] = std::min(scaler.mins[f], row[f]);
            scaler.maxs[f] = std::max(scaler.maxs[f], row[f]);
        }
    }
    return scaler;
}

FeatureMatrix transform(const Scaler& scaler, const FeatureMatrix& matrix) {
    check_same_dim(scaler.dim(), matrix.dim(), "transform");
    FeatureMatrix out = matrix;
    for (auto& row : out.rows) {
        check_same_dim(scaler.dim(), row.size(), "transform");
        for (std::size_t f = 0; f < row.size(); ++f) {
            const double range = scaler.maxs[f] - scaler.mins[f];
            row[f] = range > 0.0 ? std::clamp((row[f] - scaler.mins[f]) / range, 0.0, 1.0) : 0.0;
        }
    }
    return out;
}

FeatureMatrix inverse_transform(const Scaler& scaler, const FeatureMatrix& matrix) {
    check_same_dim(scaler.dim(), matrix.dim(), "inverse_transform");
    FeatureMatrix out = matrix;
    for (auto& row : out.rows) {
        check_same_dim(scaler.dim(), row.size(), "inverse_transform");
        for (std::size_t f = 0; f < row.size(); ++f)
            row[f] = scaler.mins[f] + row[f] * (scaler.maxs[f] - scaler.mins[f]);
    }
    return out;
}

FeatureRanking relieff(const FeatureMatrix& matrix, int k_neighbors, long sample_count,
                       std::uint64_t rng_seed) {
    const std::size_t n = matrix.n();
    const std::size_t d = matrix.dim();
    if (n == 0) throw DomainError("relieff: empty matrix");
    if (k_neighbors < 1) throw DomainError("relieff: k_neighbors must be at least 1");
    for (const auto& row : matrix.rows) check_same_dim(d, row.size(), "relieff");

    std::vector<std::size_t> class_members[2];
    for (std::size_t i = 0; i < n; ++i) {
        const int label = matrix.labels[i];
        if (label != 0 && label != 1) throw DomainError("relieff: labels must be binary");
        class_members[label].push_back(i);
    }
    if (class_members[0].empty() || class_members[1].empty())
        throw DomainError("relieff: both classes must be present");

    // Instance selection; processed in ascending row order either way so
    // the accumulation order is canonical.
    std::vector<std::size_t> selected;
    if (sample_count <= 0 || static_cast<std::size_t>(sample_count) >= n) {
        selected.resize(n);
        std::iota(selected.begin(), selected.end(), 0);
    } else {
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        Rng rng(rng_seed);
        for (std::size_t i = 0; i < static_cast<std::size_t>(sample_count); ++i) {
            const auto j = i + std::uniform_int_distribution<std::size_t>(0, n - 1 - i)(rng);
            std::swap(pool[i], pool[j]);
        }
        selected.assign(pool.begin(), pool.begin() + sample_count);
        std::sort(selected.begin(), selected.end());
    }
    const double m = static_cast<double>(selected.size());
    const std::vector<double> ranges = feature_ranges(matrix);

    // Neighbor searches are independent; contributions are merged in
    // instance order afterwards so the result is thread-count
    // independent.
    std::vector<std::vector<double>> contributions(selected.size());
    const auto worker = [&](std::size_t begin, std::size_t end) {
        const auto kk = static_cast<std::size_t>(k_neighbors);
        for (std::size_t s = begin; s < end; ++s) {
            const std::size_t i = selected[s];
            const int label = matrix.labels[i];
            const auto hits = nearest(matrix, i, class_members[label], kk);
            const auto misses = nearest(matrix, i, class_members[1 - label], kk);
            std::vector<double> contrib(d, 0.0);
            for (std::size_t f = 0; f < d; ++f) {
                if (ranges[f] <= 0.0) continue;
                double hit_sum = 0.0;
                for (std::size_t j : hits) hit_sum += std::abs(matrix.rows[i][f] - matrix.rows[j][f]);
                double miss_sum = 0.0;
                for (std::size_t j : misses)
                    miss_sum += std::abs(matrix.rows[i][f] - matrix.rows[j][f]);
                double value = 0.0;
                if (!hits.empty())
                    value -= hit_sum / (ranges[f] * m * static_cast<double>(hits.size()));
                if (!misses.empty())
                    value += miss_sum / (ranges[f] * m * static_cast<double>(misses.size()));
                contrib[f] = value;
            }
            contributions[s] = std::move(contrib);
        }
    };

    const std::size_t hardware = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t n_threads =
        std::min<std::size_t>(hardware, std::max<std::size_t>(1, selected.size() / 256));
    if (n_threads <= 1) {
        worker(0, selected.size());
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk = (selected.size() + n_threads - 1) / n_threads;
        for (std::size_t t = 0; t < n_threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(selected.size(), begin + chunk);
            if (begin < end) threads.emplace_back(worker, begin, end);
        }
        for (auto& thread : threads) thread.join();
    }

    FeatureRanking ranking;
    ranking.weights.assign(d, 0.0);
    for (const auto& contrib : contributions)
        for (std::size_t f = 0; f < d; ++f) ranking.weights[f] += contrib[f];

    ranking.order.resize(d);
    std::iota(ranking.order.begin(), ranking.order.end(), 0);
    std::sort(ranking.order.begin(), ranking.order.end(), [&](std::size_t a, std::size_t b) {
        if (ranking.weights[a] != ranking.weights[b]) return ranking.weights[a] > ranking.weights[b];
        return a < b;
    });
    return ranking;
}

std::vector<std::size_t> select_top_k(const FeatureRanking& ranking, std::size_t k) {
    if (k < 1 || k > ranking.order.size())
        throw DomainError("select_top_k: k out of range: " + std::to_string(k));
    return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(k)};
}

std::vector<std::size_t> sequential_forward_select(const FeatureMatrix& matrix,
                                                   const FeatureRanking& ranking, std::size_t k_max,
                                                   const SubsetEvaluator& evaluator) {
    if (ranking.order.empty()) throw DomainError("sequential_forward_select: empty ranking");
    if (ranking.order.size() != matrix.dim())
        throw DomainError("sequential_forward_select: ranking does not match matrix");
    if (k_max < 1) throw DomainError("sequential_forward_select: k_max must be at least 1");
    k_max = std::min(k_max, ranking.order.size());

    std::vector<std::size_t> subset = {ranking.order[0]};
    double best = evaluator(subset);
    while (subset.size() < k_max) {
        std::vector<std::size_t> candidate = subset;
        candidate.push_back(ranking.order[subset.size()]);
        const double score = evaluator(candidate);
        if (score <= best) break;
        best = score;
        subset = std::move(candidate);
    }
    return subset;
}

}  // namespace mcsguard

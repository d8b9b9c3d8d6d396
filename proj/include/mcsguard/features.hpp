#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mcsguard/task.hpp"

namespace mcsguard {

/// Labeled sample matrix; rows[i] holds dim() feature values aligned
/// with labels[i] (1 legitimate, 0 fake).
struct FeatureMatrix {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;

    std::size_t n() const { return rows.size(); }
    std::size_t dim() const { return feature_names.size(); }
};

/// Candidate features extracted from a task record, in matrix column
/// order: hour, minute, duration_min, battery_pct, latitude, longitude,
/// grid_number, on_peak, coverage_m. `day` is stored with the record but
/// is not a candidate.
const std::vector<std::string>& candidate_feature_names();

FeatureMatrix make_feature_matrix(const Dataset& dataset);

/// Keep the given columns (in the given order).
FeatureMatrix select_columns(const FeatureMatrix& matrix, const std::vector<std::size_t>& columns);

/// Keep the given rows (in the given order).
FeatureMatrix select_rows(const FeatureMatrix& matrix, const std::vector<std::size_t>& row_indices);

/// Per-feature min/max recorded from training data.
struct Scaler {
    std::vector<double> mins;
    std::vector<double> maxs;

    std::size_t dim() const { return mins.size(); }
};

Scaler fit_scaler(const FeatureMatrix& train);

/// x' = (x - min) / (max - min), clamped to [0,1]; constant features map
/// to 0. Throws DomainError on dimension mismatch.
FeatureMatrix transform(const Scaler& scaler, const FeatureMatrix& matrix);

/// Undo transform for in-range values (clamped values cannot be
/// recovered; constant features map back to their min).
FeatureMatrix inverse_transform(const Scaler& scaler, const FeatureMatrix& matrix);

struct FeatureRanking {
    std::vector<double> weights;      // one ReliefF score per feature
    std::vector<std::size_t> order;   // feature indices, descending weight,
                                      // ties by ascending index
};

/// Binary ReliefF. For each of the sampled instances, finds the
/// k_neighbors nearest hits and misses by Euclidean distance (ties by
/// ascending row index) and accumulates W[f] -= diff(hit)/(m*k) and
/// W[f] += diff(miss)/(m*k), with diff the range-normalized absolute
/// difference. When a class has fewer than k_neighbors other members,
/// the divisor uses the count actually available. sample_count <= 0 or
/// >= n means every instance, processed in row order (deterministic
/// mode); otherwise sample_count instances are drawn without
/// replacement using rng_seed. Throws DomainError when only one class
/// is present.
FeatureRanking relieff(const FeatureMatrix& matrix, int k_neighbors, long sample_count,
                       std::uint64_t rng_seed);

/// First k indices of ranking.order. Throws DomainError when k is 0 or
/// exceeds the feature count.
std::vector<std::size_t> select_top_k(const FeatureRanking& ranking, std::size_t k);

using SubsetEvaluator = std::function<double(const std::vector<std::size_t>&)>;

/// Greedy forward pass over the ranking: starts with the top feature and
/// keeps appending the next ranked feature while the evaluator score
/// strictly improves, up to k_max features.
std::vector<std::size_t> sequential_forward_select(const FeatureMatrix& matrix,
                                                   const FeatureRanking& ranking, std::size_t k_max,
                                                   const SubsetEvaluator& evaluator);

}  // namespace mcsguard

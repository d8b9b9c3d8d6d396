#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcsguard/task.hpp"

namespace mcsguard {

enum class ClusterMark { legitimate_only, mixed };

struct SofmParams {
    int epochs = 200;
    double alpha0 = 0.5;        // initial learning rate
    double sigma0 = 2.0;        // initial neighborhood radius (grid units)
    double alpha_floor = 0.01;
    double sigma_floor = 0.5;
    std::string decay = "linear";
    std::uint64_t rng_seed = 1;
};

/// 2-D grid of prototype vectors. Neurons are indexed row-major;
/// cluster marks exist only once the map has been labeled against
/// training labels.
struct SofmMap {
    int rows = 0;
    int cols = 0;
    std::size_t dim = 0;
    std::vector<std::vector<double>> weights;  // one vector per neuron
    std::vector<ClusterMark> marks;            // valid iff labeled
    bool trained = false;
    bool labeled = false;
    SofmParams params;  // parameters of the training run, if any

    std::size_t neuron_count() const { return weights.size(); }
};

/// Weights uniform in [0,1] per component; untrained.
SofmMap init_map(int rows, int cols, std::size_t dim, std::uint64_t rng_seed);

/// Chebyshev distance between two neuron positions on the lattice.
int grid_distance(const SofmMap& map, std::size_t a, std::size_t b);

/// Gaussian neighborhood exp(-g^2 / (2 sigma^2)) over grid distance.
double neighborhood(const SofmMap& map, std::size_t bmu_index, std::size_t neuron, double sigma);

/// Index of the neuron closest to the sample (Euclidean); ties go to
/// the lowest index.
std::size_t bmu(const SofmMap& map, const std::vector<double>& sample);

/// Classic online SOFM training: per epoch the samples are visited in a
/// shuffled order and every neuron moves toward the sample by
/// alpha(t) * h(bmu, neuron, t) * (x - w). alpha and sigma decay
/// linearly from their initial values to the configured floors across
/// the epochs. Samples are expected normalized to [0,1].
SofmMap train_sofm(SofmMap map, const std::vector<std::vector<double>>& samples,
                   const SofmParams& params);

/// BMU index per row; requires a trained map.
std::vector<std::size_t> assign_clusters(const SofmMap& map,
                                         const std::vector<std::vector<double>>& rows);

/// Marks a neuron legitimate_only iff its cluster is non-empty and its
/// legitimate share is at least purity_threshold; empty clusters are
/// mixed. purity_threshold must lie in (0.5, 1].
std::vector<ClusterMark> label_clusters(std::size_t neuron_count,
                                        const std::vector<std::size_t>& assignment,
                                        const std::vector<int>& labels, double purity_threshold);

/// assign_clusters + label_clusters applied to the map in place.
void label_map(SofmMap& map, const std::vector<std::vector<double>>& rows,
               const std::vector<int>& labels, double purity_threshold);

/// Disjoint, order-preserving split of a dataset into the records whose
/// BMU is a legitimate-only cluster (the PrecL subset) and the rest.
struct ClusterPartition {
    Dataset legitimate_only;
    Dataset mixed;
    std::vector<std::size_t> assignment;          // per input record
    std::vector<std::size_t> legitimate_indices;  // positions in the input
    std::vector<std::size_t> mixed_indices;
};

/// feature_rows[i] must be the (normalized, selected) features of
/// dataset.records[i]. Requires a trained and labeled map.
ClusterPartition partition(const SofmMap& map, const Dataset& dataset,
                           const std::vector<std::vector<double>>& feature_rows);

/// Per-neuron legitimate/fake counts plus the PrecL and mixed totals of
/// a labeled assignment.
struct ContingencyTable {
    std::vector<long> legitimate;  // per neuron
    std::vector<long> fake;        // per neuron
    long precl_total = 0;          // records in legitimate-only clusters
    long mixed_legitimate = 0;
    long mixed_fake = 0;
};

ContingencyTable make_contingency(const SofmMap& map, const std::vector<std::size_t>& assignment,
                                  const std::vector<int>& labels);

}  // namespace mcsguard

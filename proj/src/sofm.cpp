#include "mcsguard/sofm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcsguard/errors.hpp"

namespace mcsguard {

namespace {

void check_dim(const SofmMap& map, std::size_t got, const char* what) {
    if (map.dim != got)
        throw DomainError(std::string(what) + ": sample has " + std::to_string(got) +
                          " entries, map expects " + std::to_string(map.dim));
}

}  // namespace

SofmMap init_map(int rows, int cols, std::size_t dim, std::uint64_t rng_seed) {
    if (rows < 1 || cols < 1) throw DomainError("init_map: grid dimensions must be at least 1x1");
    if (dim < 1) throw DomainError("init_map: feature dimension must be at least 1");
    SofmMap map;
    map.rows = rows;
    map.cols = cols;
    map.dim = dim;
    Rng rng(rng_seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    map.weights.resize(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    for (auto& w : map.weights) {
        w.resize(dim);
        for (double& v : w) v = unit(rng);
    }
    return map;
}

int grid_distance(const SofmMap& map, std::size_t a, std::size_t b) {
    const int ra = static_cast<int>(a) / map.cols;
    const int ca = static_cast<int>(a) % map.cols;
    const int rb = static_cast<int>(b) / map.cols;
    const int cb = static_cast<int>(b) % map.cols;
    return std::max(std::abs(ra - rb), std::abs(ca - cb));
}

double neighborhood(const SofmMap& map, std::size_t bmu_index, std::size_t neuron, double sigma) {
    const double g = static_cast<double>(grid_distance(map, bmu_index, neuron));
    return std::exp(-(g * g) / (2.0 * sigma * sigma));
}

std::size_t bmu(const SofmMap& map, const std::vector<double>& sample) {
    check_dim(map, sample.size(), "bmu");
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < map.neuron_count(); ++j) {
        double dist = 0.0;
        for (std::size_t f = 0; f < map.dim; ++f) {
            const double diff = sample[f] - map.weights[j][f];
            dist += diff * diff;
        }
        if (dist < best_dist) {
            best_dist = dist;
            best = j;
        }
    }
    return best;
}

SofmMap train_sofm(SofmMap map, const std::vector<std::vector<double>>& samples,
                   const SofmParams& params) {
    if (samples.empty()) throw DomainError("train_sofm: empty sample set");
    if (map.neuron_count() == 0) throw StateError("train_sofm: map not initialized");
    for (const auto& s : samples) check_dim(map, s.size(), "train_sofm");
    if (params.epochs < 1) throw DomainError("train_sofm: epochs must be at least 1");
    if (!(params.alpha0 > 0.0 && params.alpha0 <= 1.0))
        throw DomainError("train_sofm: alpha0 must lie in (0,1]");
    if (params.sigma0 <= 0.0) throw DomainError("train_sofm: sigma0 must be positive");
    if (params.alpha_floor < 0.0 || params.alpha_floor > params.alpha0)
        throw DomainError("train_sofm: alpha_floor must lie in [0, alpha0]");
    if (params.sigma_floor <= 0.0 || params.sigma_floor > params.sigma0)
        throw DomainError("train_sofm: sigma_floor must lie in (0, sigma0]");

    Rng rng(params.rng_seed);
    std::vector<std::size_t> order(samples.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        const double t = params.epochs > 1
                             ? static_cast<double>(epoch) / static_cast<double>(params.epochs - 1)
                             : 0.0;
        const double alpha = params.alpha0 + (params.alpha_floor - params.alpha0) * t;
        const double sigma = params.sigma0 + (params.sigma_floor - params.sigma0) * t;
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const std::vector<double>& x = samples[idx];
            const std::size_t winner = bmu(map, x);
            for (std::size_t j = 0; j < map.neuron_count(); ++j) {
                const double h = neighborhood(map, winner, j, sigma);
                const double step = alpha * h;
                for (std::size_t f = 0; f < map.dim; ++f)
                    map.weights[j][f] += step * (x[f] - map.weights[j][f]);
            }
        }
    }
    map.trained = true;
    map.labeled = false;
    map.marks.clear();
    map.params = params;
    return map;
}

std::vector<std::size_t> assign_clusters(const SofmMap& map,
                                         const std::vector<std::vector<double>>& rows) {
    if (!map.trained) throw StateError("assign_clusters: map is not trained");
    std::vector<std::size_t> assignment;
    assignment.reserve(rows.size());
    for (const auto& row : rows) assignment.push_back(bmu(map, row));
    return assignment;
}

std::vector<ClusterMark> label_clusters(std::size_t neuron_count,
                                        const std::vector<std::size_t>& assignment,
                                        const std::vector<int>& labels, double purity_threshold) {
    if (assignment.size() != labels.size())
        throw DomainError("label_clusters: assignment and labels are not aligned");
    if (!(purity_threshold > 0.5 && purity_threshold <= 1.0))
        throw DomainError("label_clusters: purity_threshold must lie in (0.5, 1]");

    std::vector<long> legit(neuron_count, 0), total(neuron_count, 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        if (assignment[i] >= neuron_count)
            throw DomainError("label_clusters: neuron index out of range");
        ++total[assignment[i]];
        if (labels[i] == 1) ++legit[assignment[i]];
    }

    std::vector<ClusterMark> marks(neuron_count, ClusterMark::mixed);
    for (std::size_t j = 0; j < neuron_count; ++j) {
        if (total[j] == 0) continue;  // empty clusters stay mixed
        const double purity = static_cast<double>(legit[j]) / static_cast<double>(total[j]);
        if (purity >= purity_threshold) marks[j] = ClusterMark::legitimate_only;
    }
    return marks;
}

void label_map(SofmMap& map, const std::vector<std::vector<double>>& rows,
               const std::vector<int>& labels, double purity_threshold) {
    const auto assignment = assign_clusters(map, rows);
    map.marks = label_clusters(map.neuron_count(), assignment, labels, purity_threshold);
    map.labeled = true;
}

ClusterPartition partition(const SofmMap& map, const Dataset& dataset,
                           const std::vector<std::vector<double>>& feature_rows) {
    if (!map.trained) throw StateError("partition: map is not trained");
    if (!map.labeled) throw StateError("partition: map is not labeled");
    if (dataset.size() != feature_rows.size())
        throw DomainError("partition: dataset and feature rows are not aligned");

    ClusterPartition part;
    part.legitimate_only.origin = dataset.origin;
    part.mixed.origin = dataset.origin;
    part.assignment = assign_clusters(map, feature_rows);
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        if (map.marks[part.assignment[i]] == ClusterMark::legitimate_only) {
            part.legitimate_only.records.push_back(dataset.records[i]);
            part.legitimate_indices.push_back(i);
        } else {
            part.mixed.records.push_back(dataset.records[i]);
            part.mixed_indices.push_back(i);
        }
    }
    return part;
}

ContingencyTable make_contingency(const SofmMap& map, const std::vector<std::size_t>& assignment,
                                  const std::vector<int>& labels) {
    if (!map.labeled) throw StateError("make_contingency: map is not labeled");
    if (assignment.size() != labels.size())
        throw DomainError("make_contingency: assignment and labels are not aligned");
    ContingencyTable table;
    table.legitimate.assign(map.neuron_count(), 0);
    table.fake.assign(map.neuron_count(), 0);
    for (std::size_t i = 0; i < assignment.size(); ++i) {
        const std::size_t j = assignment[i];
        if (labels[i] == 1)
            ++table.legitimate[j];
        else
            ++table.fake[j];
    }
    for (std::size_t j = 0; j < map.neuron_count(); ++j) {
        if (map.marks[j] == ClusterMark::legitimate_only) {
            table.precl_total += table.legitimate[j] + table.fake[j];
        } else {
            table.mixed_legitimate += table.legitimate[j];
            table.mixed_fake += table.fake[j];
        }
    }
    return table;
}

}  // namespace mcsguard

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mcsguard {

/// Fully connected feedforward classifier: tanh hidden layers, logistic
/// sigmoid output. weights[l] is the row-major out x in matrix between
/// layer l and l+1.
struct MlpNetwork {
    std::vector<std::size_t> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::string hidden_activation = "tanh";
    std::string output_activation = "sigmoid";

    std::size_t input_dim() const { return layer_sizes.empty() ? 0 : layer_sizes.front(); }
    std::size_t num_weight_layers() const { return weights.size(); }

    bool operator==(const MlpNetwork&) const = default;
};

/// Glorot-uniform weights (range sqrt(6/(fan_in+fan_out))), zero biases.
MlpNetwork make_network(const std::vector<std::size_t>& layer_sizes, std::uint64_t rng_seed);

/// The classifier architecture used throughout: input_dim -> 15 -> 15 ->
/// 15 -> 15 -> 1.
MlpNetwork init_network(std::size_t input_dim, std::uint64_t rng_seed);

/// Probability that the sample is legitimate, strictly inside (0,1).
double forward(const MlpNetwork& network, const std::vector<double>& sample);

/// Mean binary cross-entropy over a sample set (numerically stable,
/// computed from logits).
double mean_loss(const MlpNetwork& network, const std::vector<std::vector<double>>& samples,
                 const std::vector<int>& labels);

struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

/// Backpropagated gradient of the cross-entropy loss for one sample.
Gradients analytic_gradient(const MlpNetwork& network, const std::vector<double>& sample, int label);

struct TrainParams {
    int epochs = 300;
    std::size_t batch_size = 32;  // clamped to the sample count
    double learning_rate = 0.01;
    double momentum = 0.9;
    int patience = 30;  // epochs without improvement before stopping
    std::uint64_t rng_seed = 1;
};

struct TrainingTrace {
    std::vector<double> epoch_losses;  // running mean loss per epoch
    double initial_loss = 0.0;         // full pass before training
    double final_loss = 0.0;           // full pass of the returned network
    int best_epoch = -1;
    std::vector<double> residuals;     // label - probability, per sample
};

/// Mini-batch gradient descent with momentum on binary cross-entropy.
/// Keeps the parameters of the best epoch observed and returns those,
/// so the final loss never exceeds the initial one. Throws DomainError
/// when only one class is present and TrainingError when the loss
/// diverges.
std::pair<MlpNetwork, TrainingTrace> train(const MlpNetwork& network,
                                           const std::vector<std::vector<double>>& samples,
                                           const std::vector<int>& labels, const TrainParams& params);

/// Thresholded predictions. index_map ties each position back to a
/// source record (defaults to 0..n-1); predicted_legitimate and
/// predicted_fake partition the mapped indices.
struct PredictionSet {
    std::vector<double> probabilities;
    std::vector<int> labels;
    std::vector<std::size_t> index_map;
    std::vector<std::size_t> predicted_legitimate;
    std::vector<std::size_t> predicted_fake;
};

PredictionSet predict(const MlpNetwork& network, const std::vector<std::vector<double>>& samples,
                      double threshold = 0.5, std::vector<std::size_t> index_map = {});

/// Max discrepancy between the analytic gradient and central finite
/// differences over every parameter: relative error, falling back to
/// the absolute difference when both gradients are below 1e-8.
double gradient_check(const MlpNetwork& network, const std::vector<double>& sample, int label,
                      double epsilon);

}  // namespace mcsguard

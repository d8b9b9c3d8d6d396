#include "mcsguard/deepnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "mcsguard/errors.hpp"
#include "mcsguard/task.hpp"

namespace mcsguard {

namespace {

constexpr double kProbClamp = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_probability(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

/// Stable binary cross-entropy from the output logit.
double bce_from_logit(double z, int label) {
    return std::max(z, 0.0) - static_cast<double>(label) * z + std::log1p(std::exp(-std::abs(z)));
}

void check_network(const MlpNetwork& net) {
    if (net.layer_sizes.size() < 2) throw DomainError("network needs at least input and output layers");
    if (net.weights.size() != net.layer_sizes.size() - 1 || net.biases.size() != net.weights.size())
        throw DomainError("network weight/bias layout inconsistent with layer_sizes");
}

void check_sample(const MlpNetwork& net, const std::vector<double>& sample) {
    if (sample.size() != net.input_dim())
        throw DomainError("sample has " + std::to_string(sample.size()) + " entries, network expects " +
                          std::to_string(net.input_dim()));
}

/// Runs the network, storing activations per layer; the output layer
/// slot holds the raw logit. Returns that logit.
double forward_logit(const MlpNetwork& net, const std::vector<double>& sample,
                     std::vector<std::vector<double>>& activations) {
    const std::size_t n_layers = net.layer_sizes.size();
    activations.resize(n_layers);
    activations[0] = sample;
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        const std::size_t in = net.layer_sizes[l];
        const std::size_t out = net.layer_sizes[l + 1];
        const std::vector<double>& prev = activations[l];
        std::vector<double>& next = activations[l + 1];
        next.assign(out, 0.0);
        const bool is_output = (l + 2 == n_layers);
        for (std::size_t o = 0; o < out; ++o) {
            double z = net.biases[l][o];
            const double* row = net.weights[l].data() + o * in;
            for (std::size_t i = 0; i < in; ++i) z += row[i] * prev[i];
            next[o] = is_output ? z : std::tanh(z);
        }
    }
    return activations[n_layers - 1][0];
}

void accumulate_gradient(const MlpNetwork& net, const std::vector<std::vector<double>>& activations,
                         int label, Gradients& grads, std::vector<std::vector<double>>& deltas) {
    const std::size_t n_w = net.num_weight_layers();
    deltas.resize(n_w);
    // Output delta: dL/dz = sigmoid(z) - y.
    deltas[n_w - 1] = {sigmoid(activations[n_w][0]) - static_cast<double>(label)};
    for (std::size_t l = n_w - 1; l > 0; --l) {
        const std::size_t in = net.layer_sizes[l];
        const std::size_t out = net.layer_sizes[l + 1];
        std::vector<double>& delta_prev = deltas[l - 1];
        delta_prev.assign(in, 0.0);
        for (std::size_t o = 0; o < out; ++o) {
            const double d = deltas[l][o];
            const double* row = net.weights[l].data() + o * in;
            for (std::size_t i = 0; i < in; ++i) delta_prev[i] += row[i] * d;
        }
        for (std::size_t i = 0; i < in; ++i) {
            const double a = activations[l][i];
            delta_prev[i] *= 1.0 - a * a;  // tanh'
        }
    }
    for (std::size_t l = 0; l < n_w; ++l) {
        const std::size_t in = net.layer_sizes[l];
        const std::size_t out = net.layer_sizes[l + 1];
        for (std::size_t o = 0; o < out; ++o) {
            const double d = deltas[l][o];
            double* grad_row = grads.weights[l].data() + o * in;
            for (std::size_t i = 0; i < in; ++i) grad_row[i] += d * activations[l][i];
            grads.biases[l][o] += d;
        }
    }
}

Gradients zero_gradients(const MlpNetwork& net) {
    Gradients grads;
    grads.weights.resize(net.num_weight_layers());
    grads.biases.resize(net.num_weight_layers());
    for (std::size_t l = 0; l < net.num_weight_layers(); ++l) {
        grads.weights[l].assign(net.weights[l].size(), 0.0);
        grads.biases[l].assign(net.biases[l].size(), 0.0);
    }
    return grads;
}

void scale_gradients(Gradients& grads, double factor) {
    for (auto& layer : grads.weights)
        for (double& g : layer) g *= factor;
    for (auto& layer : grads.biases)
        for (double& g : layer) g *= factor;
}

}  // namespace

MlpNetwork make_network(const std::vector<std::size_t>& layer_sizes, std::uint64_t rng_seed) {
    if (layer_sizes.size() < 2) throw DomainError("make_network: need at least two layers");
    for (std::size_t size : layer_sizes)
        if (size < 1) throw DomainError("make_network: every layer needs at least one unit");

    MlpNetwork net;
    net.layer_sizes = layer_sizes;
    Rng rng(rng_seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t in = layer_sizes[l];
        const std::size_t out = layer_sizes[l + 1];
        const double r = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> uniform(-r, r);
        std::vector<double> w(in * out);
        for (double& v : w) v = uniform(rng);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(out, 0.0);
    }
    return net;
}

MlpNetwork init_network(std::size_t input_dim, std::uint64_t rng_seed) {
    if (input_dim < 1) throw DomainError("init_network: input dimension must be at least 1");
    return make_network({input_dim, 15, 15, 15, 15, 1}, rng_seed);
}

double forward(const MlpNetwork& network, const std::vector<double>& sample) {
    check_network(network);
    check_sample(network, sample);
    std::vector<std::vector<double>> activations;
    return clamp_probability(sigmoid(forward_logit(network, sample, activations)));
}

double mean_loss(const MlpNetwork& network, const std::vector<std::vector<double>>& samples,
                 const std::vector<int>& labels) {
    if (samples.empty()) throw DomainError("mean_loss: empty sample set");
    if (samples.size() != labels.size()) throw DomainError("mean_loss: samples/labels misaligned");
    std::vector<std::vector<double>> activations;
    double total = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        check_sample(network, samples[i]);
        total += bce_from_logit(forward_logit(network, samples[i], activations), labels[i]);
    }
    return total / static_cast<double>(samples.size());
}

Gradients analytic_gradient(const MlpNetwork& network, const std::vector<double>& sample, int label) {
    check_network(network);
    check_sample(network, sample);
    if (network.layer_sizes.back() != 1)
        throw DomainError("analytic_gradient: output layer must have one unit");
    std::vector<std::vector<double>> activations;
    forward_logit(network, sample, activations);
    Gradients grads = zero_gradients(network);
    std::vector<std::vector<double>> deltas;
    accumulate_gradient(network, activations, label, grads, deltas);
    return grads;
}

std::pair<MlpNetwork, TrainingTrace> train(const MlpNetwork& network,
                                           const std::vector<std::vector<double>>& samples,
                                           const std::vector<int>& labels, const TrainParams& params) {
    check_network(network);
    if (network.layer_sizes.back() != 1) throw DomainError("train: output layer must have one unit");
    if (samples.empty()) throw DomainError("train: empty training set");
    if (samples.size() != labels.size()) throw DomainError("train: samples/labels misaligned");
    for (const auto& s : samples) check_sample(network, s);
    bool has[2] = {false, false};
    for (int label : labels) {
        if (label != 0 && label != 1) throw DomainError("train: labels must be binary");
        has[label] = true;
    }
    if (!has[0] || !has[1]) throw DomainError("train: both classes must be present");
    if (params.epochs < 0) throw DomainError("train: epochs must be non-negative");
    if (params.batch_size < 1) throw DomainError("train: batch_size must be at least 1");
    if (params.learning_rate <= 0.0) throw DomainError("train: learning_rate must be positive");
    if (params.momentum < 0.0 || params.momentum >= 1.0)
        throw DomainError("train: momentum must lie in [0,1)");
    if (params.patience < 1) throw DomainError("train: patience must be at least 1");

    const std::size_t n = samples.size();
    const std::size_t batch_size = std::min(params.batch_size, n);

    MlpNetwork net = network;
    TrainingTrace trace;
    trace.initial_loss = mean_loss(net, samples, labels);

    Gradients velocity = zero_gradients(net);
    Gradients batch_grads = zero_gradients(net);
    std::vector<std::vector<double>> activations;
    std::vector<std::vector<double>> deltas;

    MlpNetwork best = net;
    double best_loss = std::numeric_limits<double>::infinity();
    int stale_epochs = 0;

    Rng rng(params.rng_seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss_sum = 0.0;
        std::size_t cursor = 0;
        while (cursor < n) {
            const std::size_t count = std::min(batch_size, n - cursor);
            batch_grads = zero_gradients(net);
            for (std::size_t b = 0; b < count; ++b) {
                const std::size_t idx = order[cursor + b];
                const double z = forward_logit(net, samples[idx], activations);
                epoch_loss_sum += bce_from_logit(z, labels[idx]);
                accumulate_gradient(net, activations, labels[idx], batch_grads, deltas);
            }
            scale_gradients(batch_grads, 1.0 / static_cast<double>(count));
            for (std::size_t l = 0; l < net.num_weight_layers(); ++l) {
                for (std::size_t kk = 0; kk < net.weights[l].size(); ++kk) {
                    velocity.weights[l][kk] = params.momentum * velocity.weights[l][kk] -
                                              params.learning_rate * batch_grads.weights[l][kk];
                    net.weights[l][kk] += velocity.weights[l][kk];
                }
                for (std::size_t kk = 0; kk < net.biases[l].size(); ++kk) {
                    velocity.biases[l][kk] = params.momentum * velocity.biases[l][kk] -
                                             params.learning_rate * batch_grads.biases[l][kk];
                    net.biases[l][kk] += velocity.biases[l][kk];
                }
            }
            cursor += count;
        }
        const double epoch_loss = epoch_loss_sum / static_cast<double>(n);
        if (!std::isfinite(epoch_loss))
            throw TrainingError("training diverged at epoch " + std::to_string(epoch) +
                                " (non-finite loss)");
        trace.epoch_losses.push_back(epoch_loss);
        if (epoch_loss < best_loss) {
            best_loss = epoch_loss;
            best = net;
            trace.best_epoch = epoch;
            stale_epochs = 0;
        } else if (++stale_epochs >= params.patience) {
            break;
        }
    }

    MlpNetwork result = params.epochs > 0 ? std::move(best) : net;
    double final_loss = mean_loss(result, samples, labels);
    if (final_loss > trace.initial_loss) {  // keep the no-regression guarantee
        result = network;
        final_loss = trace.initial_loss;
        trace.best_epoch = -1;
    }
    trace.final_loss = final_loss;
    trace.residuals.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        trace.residuals.push_back(static_cast<double>(labels[i]) - forward(result, samples[i]));
    return {std::move(result), std::move(trace)};
}

PredictionSet predict(const MlpNetwork& network, const std::vector<std::vector<double>>& samples,
                      double threshold, std::vector<std::size_t> index_map) {
    check_network(network);
    if (!(threshold > 0.0 && threshold < 1.0))
        throw DomainError("predict: threshold must lie strictly between 0 and 1");
    if (index_map.empty()) {
        index_map.resize(samples.size());
        std::iota(index_map.begin(), index_map.end(), 0);
    }
    if (index_map.size() != samples.size())
        throw DomainError("predict: index_map does not match sample count");

    PredictionSet preds;
    preds.index_map = std::move(index_map);
    preds.probabilities.reserve(samples.size());
    preds.labels.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double p = forward(network, samples[i]);
        const int label = p >= threshold ? 1 : 0;
        preds.probabilities.push_back(p);
        preds.labels.push_back(label);
        (label == 1 ? preds.predicted_legitimate : preds.predicted_fake)
            .push_back(preds.index_map[i]);
    }
    return preds;
}

double gradient_check(const MlpNetwork& network, const std::vector<double>& sample, int label,
                      double epsilon) {
    if (!(epsilon >= 1e-7 && epsilon <= 1e-3))
        throw DomainError("gradient_check: epsilon must lie in [1e-7, 1e-3]");
    const Gradients analytic = analytic_gradient(network, sample, label);

    MlpNetwork probe = network;
    std::vector<std::vector<double>> activations;
    const auto loss_at = [&]() {
        return bce_from_logit(forward_logit(probe, sample, activations), label);
    };
    double max_error = 0.0;
    const auto check_param = [&](double& param, double grad) {
        const double saved = param;
        param = saved + epsilon;
        const double up = loss_at();
        param = saved - epsilon;
        const double down = loss_at();
        param = saved;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double diff = std::abs(grad - numeric);
        const double scale = std::max(std::abs(grad), std::abs(numeric));
        max_error = std::max(max_error, scale < 1e-8 ? diff : diff / scale);
    };
    for (std::size_t l = 0; l < probe.num_weight_layers(); ++l) {
        for (std::size_t kk = 0; kk < probe.weights[l].size(); ++kk)
            check_param(probe.weights[l][kk], analytic.weights[l][kk]);
        for (std::size_t kk = 0; kk < probe.biases[l].size(); ++kk)
            check_param(probe.biases[l][kk], analytic.biases[l][kk]);
    }
    return max_error;
}

}  // namespace mcsguard

#include "domcx/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "domcx/error.hpp"
#include "domcx/kernels.hpp"
#include "domcx/rng.hpp"

namespace domcx {
namespace {

void check_topology(std::span<const std::size_t> sizes) {
    if (sizes.size() < 2) {
        throw InvalidTopology("a network needs at least an input and an output layer");
    }
    for (std::size_t s : sizes) {
        if (s == 0) throw InvalidTopology("layer sizes must be >= 1");
    }
}

void check_compatible(const MlpNetwork& net, const TaskDataset& data) {
    if (net.input_size() != data.dims()) {
        throw ShapeError("network expects " + std::to_string(net.input_size()) + " features, dataset '" +
                         data.name() + "' has " + std::to_string(data.dims()));
    }
    if (net.output_size() != data.class_count()) {
        throw ShapeError("network has " + std::to_string(net.output_size()) + " outputs, dataset '" + data.name() +
                         "' has " + std::to_string(data.class_count()) + " classes");
    }
}

// Replaces logits by softmax probabilities; returns log-sum-exp of the logits.
double softmax_in_place(std::span<double> z) noexcept {
    const double peak = *std::max_element(z.begin(), z.end());
    double total = 0.0;
    for (double& v : z) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : z) v /= total;
    return peak + std::log(total);
}

// Per-network scratch space for one sample's forward/backward pass.
class Workspace {
public:
    explicit Workspace(const MlpNetwork& net) {
        const auto sizes = net.layer_sizes();
        acts_.reserve(sizes.size());
        for (std::size_t s : sizes) acts_.emplace_back(s, 0.0);
        std::size_t widest = *std::max_element(sizes.begin(), sizes.end());
        delta_.assign(widest, 0.0);
        delta_prev_.assign(widest, 0.0);
    }

    // Fills activations; the last entry holds probabilities. Returns the
    // cross-entropy of `label` (or 0 when label < 0).
    double forward(const MlpNetwork& net, std::span<const double> x, int label) {
        const auto& k = kernels::active();
        std::copy(x.begin(), x.end(), acts_[0].begin());
        const auto layers = net.layers();
        double lse = 0.0;
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const DenseLayer& layer = layers[l];
            const std::vector<double>& in = acts_[l];
            std::vector<double>& out = acts_[l + 1];
            std::copy(layer.biases.begin(), layer.biases.end(), out.begin());
            for (std::size_t i = 0; i < layer.inputs; ++i) {
                if (in[i] != 0.0) k.axpy(in[i], layer.weights.data() + i * layer.outputs, out.data(), layer.outputs);
            }
            if (l + 1 < layers.size()) {
                for (double& v : out) v = v > 0.0 ? v : 0.0;
            } else {
                const double logit = label >= 0 ? out[static_cast<std::size_t>(label)] : 0.0;
                lse = softmax_in_place(out);
                if (label >= 0) return lse - logit;
            }
        }
        return 0.0;
    }

    // Accumulates d(loss)/d(params) for the sample last passed to forward().
    void backward(const MlpNetwork& net, int label, Gradient& grad) {
        const auto& k = kernels::active();
        const auto layers = net.layers();
        const std::size_t last = layers.size() - 1;
        const std::vector<double>& probs = acts_.back();
        for (std::size_t j = 0; j < probs.size(); ++j) delta_[j] = probs[j];
        delta_[static_cast<std::size_t>(label)] -= 1.0;

        for (std::size_t l = last + 1; l-- > 0;) {
            const DenseLayer& layer = layers[l];
            DenseLayer& g = grad.layers[l];
            const std::vector<double>& in = acts_[l];
            k.axpy(1.0, delta_.data(), g.biases.data(), layer.outputs);
            for (std::size_t i = 0; i < layer.inputs; ++i) {
                if (in[i] != 0.0) k.axpy(in[i], delta_.data(), g.weights.data() + i * layer.outputs, layer.outputs);
            }
            if (l > 0) {
                for (std::size_t i = 0; i < layer.inputs; ++i) {
                    delta_prev_[i] =
                        in[i] > 0.0 ? k.dot(layer.weights.data() + i * layer.outputs, delta_.data(), layer.outputs)
                                    : 0.0;
                }
                std::swap(delta_, delta_prev_);
            }
        }
    }

    std::span<const double> output() const noexcept { return acts_.back(); }

private:
    std::vector<std::vector<double>> acts_;
    std::vector<double> delta_;
    std::vector<double> delta_prev_;
};

Gradient zero_gradient(const MlpNetwork& net) {
    Gradient g;
    for (const DenseLayer& layer : net.layers()) {
        g.layers.push_back(DenseLayer{layer.inputs, layer.outputs, std::vector<double>(layer.weights.size(), 0.0),
                                      std::vector<double>(layer.biases.size(), 0.0)});
    }
    return g;
}

void clear(Gradient& g) {
    for (DenseLayer& layer : g.layers) {
        std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
        std::fill(layer.biases.begin(), layer.biases.end(), 0.0);
    }
}

}  // namespace

MlpNetwork MlpNetwork::initialize(std::vector<std::size_t> layer_sizes, std::uint64_t seed) {
    check_topology(layer_sizes);
    Rng rng(seed);
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const std::size_t fan_in = layer_sizes[l];
        const std::size_t fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        DenseLayer layer{fan_in, fan_out, std::vector<double>(fan_in * fan_out), std::vector<double>(fan_out, 0.0)};
        for (double& w : layer.weights) w = dist(rng);
        layers.push_back(std::move(layer));
    }
    return MlpNetwork(std::move(layer_sizes), std::move(layers), seed);
}

MlpNetwork::MlpNetwork(std::vector<std::size_t> layer_sizes, std::vector<DenseLayer> layers, std::uint64_t seed)
    : sizes_(std::move(layer_sizes)), layers_(std::move(layers)), seed_(seed) {
    check_topology(sizes_);
    if (layers_.size() != sizes_.size() - 1) throw InvalidTopology("layer count does not match layer_sizes");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const DenseLayer& layer = layers_[l];
        if (layer.inputs != sizes_[l] || layer.outputs != sizes_[l + 1] ||
            layer.weights.size() != layer.inputs * layer.outputs || layer.biases.size() != layer.outputs) {
            throw InvalidTopology("layer " + std::to_string(l) + " parameters do not match layer_sizes");
        }
    }
}

std::size_t param_count(std::span<const std::size_t> layer_sizes) noexcept {
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) total += (layer_sizes[l] + 1) * layer_sizes[l + 1];
    return total;
}

std::size_t param_count(const MlpNetwork& net) noexcept { return param_count(net.layer_sizes()); }

std::vector<double> forward(const MlpNetwork& net, std::span<const double> features) {
    if (features.size() != net.input_size()) {
        throw ShapeError("forward: expected " + std::to_string(net.input_size()) + " features, got " +
                         std::to_string(features.size()));
    }
    Workspace ws(net);
    ws.forward(net, features, -1);
    const auto out = ws.output();
    return {out.begin(), out.end()};
}

std::size_t argmax(std::span<const double> values) noexcept {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

void TrainingProtocol::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw InvalidArgument("learning_rate must be a positive finite number");
    }
    if (batch_size == 0) throw InvalidArgument("batch_size must be >= 1");
}

double loss_and_gradient(const MlpNetwork& net, const TaskDataset& data, std::span<const std::size_t> rows,
                         Gradient* grad) {
    check_compatible(net, data);
    if (rows.empty()) throw EmptyDataset("loss over an empty row set");
    Workspace ws(net);
    Gradient local = zero_gradient(net);
    double loss = 0.0;
    for (std::size_t r : rows) {
        loss += ws.forward(net, data.row(r), data.label(r));
        if (grad != nullptr) ws.backward(net, data.label(r), local);
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    if (grad != nullptr) {
        for (DenseLayer& layer : local.layers) {
            for (double& v : layer.weights) v *= inv;
            for (double& v : layer.biases) v *= inv;
        }
        *grad = std::move(local);
    }
    return loss * inv;
}

MlpNetwork train(MlpNetwork net, const TaskDataset& data, const TrainingProtocol& protocol,
                 const EpochObserver& observer) {
    protocol.validate();
    check_compatible(net, data);
    if (protocol.epochs == 0) return net;

    const auto train_rows = data.train_rows();
    if (train_rows.empty()) throw EmptyDataset("dataset '" + data.name() + "' has no training rows");

    const auto& k = kernels::active();
    std::vector<std::size_t> order(train_rows.begin(), train_rows.end());
    Rng rng(protocol.shuffle_seed);
    Workspace ws(net);
    Gradient grad = zero_gradient(net);

    for (std::size_t epoch = 1; epoch <= protocol.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += protocol.batch_size) {
            const std::size_t stop = std::min(order.size(), start + protocol.batch_size);
            for (std::size_t b = start; b < stop; ++b) {
                const std::size_t r = order[b];
                ws.forward(net, data.row(r), data.label(r));
                ws.backward(net, data.label(r), grad);
            }
            const double step = -protocol.learning_rate / static_cast<double>(stop - start);
            auto layers = net.layers();
            for (std::size_t l = 0; l < layers.size(); ++l) {
                k.axpy(step, grad.layers[l].weights.data(), layers[l].weights.data(), layers[l].weights.size());
                k.axpy(step, grad.layers[l].biases.data(), layers[l].biases.data(), layers[l].biases.size());
            }
            clear(grad);
        }
        if (observer) {
            observer(EpochStats{epoch, loss_and_gradient(net, data, train_rows, nullptr)});
        }
    }
    return net;
}

double evaluate(const MlpNetwork& net, const TaskDataset& data, Partition partition) {
    check_compatible(net, data);
    const auto rows = data.rows(partition);
    if (rows.empty()) throw EmptyDataset("dataset '" + data.name() + "' has no rows to evaluate");
    Workspace ws(net);
    std::size_t correct = 0;
    for (std::size_t r : rows) {
        ws.forward(net, data.row(r), -1);
        if (argmax(ws.output()) == static_cast<std::size_t>(data.label(r))) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

}  // namespace domcx

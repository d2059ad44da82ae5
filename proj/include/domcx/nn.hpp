#pragma once

// Minimal fully connected network engine: ReLU hidden layers, softmax output,
// softmax cross-entropy loss, plain mini-batch gradient descent.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "domcx/dataset.hpp"

namespace domcx {

/// One dense layer. `weights` is inputs x outputs, row-major, so row i holds
/// the fan-out of input unit i.
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    std::span<const double> weight_row(std::size_t i) const noexcept { return {weights.data() + i * outputs, outputs}; }
    std::span<double> weight_row(std::size_t i) noexcept { return {weights.data() + i * outputs, outputs}; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

class MlpNetwork {
public:
    /// Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    /// Throws InvalidTopology for fewer than two sizes or any zero size.
    static MlpNetwork initialize(std::vector<std::size_t> layer_sizes, std::uint64_t seed);

    /// Adopts explicit parameters; validates every shape.
    MlpNetwork(std::vector<std::size_t> layer_sizes, std::vector<DenseLayer> layers, std::uint64_t seed);

    std::span<const std::size_t> layer_sizes() const noexcept { return sizes_; }
    std::span<const DenseLayer> layers() const noexcept { return layers_; }
    std::span<DenseLayer> layers() noexcept { return layers_; }
    std::uint64_t rng_seed() const noexcept { return seed_; }
    std::size_t input_size() const noexcept { return sizes_.front(); }
    std::size_t output_size() const noexcept { return sizes_.back(); }

    friend bool operator==(const MlpNetwork&, const MlpNetwork&) = default;

private:
    std::vector<std::size_t> sizes_;
    std::vector<DenseLayer> layers_;
    std::uint64_t seed_;
};

/// sum over layers of (fan_in + 1) * fan_out.
std::size_t param_count(const MlpNetwork& net) noexcept;
std::size_t param_count(std::span<const std::size_t> layer_sizes) noexcept;

/// Class probabilities. Throws ShapeError when the feature length is wrong.
std::vector<double> forward(const MlpNetwork& net, std::span<const double> features);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values) noexcept;

struct TrainingProtocol {
    std::size_t epochs = 30;
    double learning_rate = 0.05;
    std::size_t batch_size = 16;
    std::uint64_t shuffle_seed = 0;

    /// Throws InvalidArgument for a non-positive rate or zero batch size.
    void validate() const;
};

struct EpochStats {
    std::size_t epoch = 0;       // 1-based
    double train_loss = 0.0;     // mean cross-entropy over the train partition after the epoch
};

using EpochObserver = std::function<void(const EpochStats&)>;

/// Runs exactly protocol.epochs passes of shuffled mini-batch SGD over the
/// train partition. When an observer is given, the full train loss is
/// computed after each epoch and reported to it.
MlpNetwork train(MlpNetwork net, const TaskDataset& data, const TrainingProtocol& protocol,
                 const EpochObserver& observer = {});

/// Argmax accuracy over the chosen partition. Throws EmptyDataset if it has no rows.
double evaluate(const MlpNetwork& net, const TaskDataset& data, Partition partition = Partition::test);

/// Parameter-shaped gradient buffer.
struct Gradient {
    std::vector<DenseLayer> layers;
};

/// Mean softmax cross-entropy over `rows` and, if `grad` is non-null, its
/// gradient with respect to every weight and bias.
double loss_and_gradient(const MlpNetwork& net, const TaskDataset& data, std::span<const std::size_t> rows,
                         Gradient* grad);

}  // namespace domcx

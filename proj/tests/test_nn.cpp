#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "domcx/domains.hpp"
#include "domcx/error.hpp"
#include "domcx/kernels.hpp"
#include "domcx/nn.hpp"
#include "oracles.hpp"

using namespace domcx;

namespace {

std::vector<std::size_t> iota_rows(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> r(end - begin);
    std::iota(r.begin(), r.end(), begin);
    return r;
}

// Features uniform in [-1, 1], labels independent of the features.
TaskDataset random_dataset(std::size_t n, std::size_t dims, std::size_t classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> f(n * dims);
    for (auto& x : f) x = u(rng);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(rng() % classes);
    return TaskDataset::with_random_split("random", dims, std::move(f), std::move(labels), classes, 0.5, seed);
}

MlpNetwork zero_net(std::vector<std::size_t> sizes) {
    std::vector<DenseLayer> layers;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        layers.push_back({sizes[i], sizes[i + 1], std::vector<double>(sizes[i] * sizes[i + 1], 0.0),
                          std::vector<double>(sizes[i + 1], 0.0)});
    }
    return MlpNetwork(sizes, std::move(layers), 0);
}

}  // namespace

TEST_CASE("initialize is deterministic in the seed") {
    const auto a = MlpNetwork::initialize({4, 2}, 7);
    const auto b = MlpNetwork::initialize({4, 2}, 7);
    CHECK(a == b);
    CHECK_FALSE(a == MlpNetwork::initialize({4, 2}, 8));
    for (double bias : a.layers()[0].biases) CHECK(bias == 0.0);
}

TEST_CASE("initialize rejects bad topologies") {
    CHECK_THROWS_AS(MlpNetwork::initialize({4}, 1), InvalidTopology);
    CHECK_THROWS_AS(MlpNetwork::initialize({}, 1), InvalidTopology);
    CHECK_THROWS_AS(MlpNetwork::initialize({2, 0, 2}, 1), InvalidTopology);
}

TEST_CASE("initial weights are centred") {
    const auto net = MlpNetwork::initialize({2, 3, 2}, 1);
    double sum = 0.0;
    double var = 0.0;
    std::size_t n = 0;
    for (const auto& layer : net.layers()) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
        for (double w : layer.weights) {
            CHECK(std::abs(w) <= limit);
            sum += w;
            var += limit * limit / 3.0;
            ++n;
        }
    }
    const double se = std::sqrt(var) / static_cast<double>(n);
    CHECK(std::abs(sum / static_cast<double>(n)) <= 3.0 * se);
}

TEST_CASE("param_count") {
    CHECK(param_count(std::vector<std::size_t>{4, 8, 2}) == 58);
    CHECK(param_count(std::vector<std::size_t>{784, 10}) == 7850);
    CHECK(param_count(std::vector<std::size_t>{1, 1}) == 2);
    const auto net = MlpNetwork::initialize({5, 7, 3, 2}, 3);
    std::size_t stored = 0;
    for (const auto& l : net.layers()) stored += l.weights.size() + l.biases.size();
    CHECK(param_count(net) == stored);
}

TEST_CASE("forward") {
    const auto zero = zero_net({3, 4, 5});
    const double x[] = {1.0, -2.0, 0.5};
    for (double p : forward(zero, x)) CHECK(p == doctest::Approx(0.2).epsilon(1e-15));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int t = 0; t < 20; ++t) {
        const auto net = MlpNetwork::initialize({3, 6, 4}, static_cast<std::uint64_t>(t));
        const double in[] = {u(rng), u(rng), u(rng)};
        const auto p = forward(net, in);
        CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-9);
    }

    auto ident = zero_net({2, 2});
    ident.layers()[0].weights = {1.0, 0.0, 0.0, 1.0};
    const double e[] = {10.0, 0.0};
    CHECK(forward(ident, e)[0] > 0.99);

    const double short_in[] = {1.0};
    CHECK_THROWS_AS(forward(ident, short_in), ShapeError);
}

TEST_CASE("argmax breaks ties toward the lowest index") {
    const double v[] = {0.2, 0.4, 0.4};
    CHECK(argmax(v) == 1);
    const double w[] = {0.5, 0.5};
    CHECK(argmax(w) == 0);
}

TEST_CASE("train with zero epochs is a no-op") {
    const auto data = random_dataset(40, 3, 2, 1);
    const auto net = MlpNetwork::initialize({3, 4, 2}, 2);
    TrainingProtocol p;
    p.epochs = 0;
    CHECK(train(net, data, p) == net);
}

TEST_CASE("single-class data is learned perfectly") {
    auto base = random_dataset(40, 2, 1, 3);
    const auto net = train(MlpNetwork::initialize({2, 5, 1}, 4), base, TrainingProtocol{});
    CHECK(evaluate(net, base, Partition::all) == 1.0);
}

TEST_CASE("separated clusters are learned") {
    ClusterConfig c;
    c.separation = 8.0;
    c.seed = 21;
    const auto data = make_clusters(c);
    const auto net = train(MlpNetwork::initialize({2, 8, 2}, 5), data, TrainingProtocol{});
    CHECK(evaluate(net, data, Partition::train) >= 0.95);
}

TEST_CASE("train rejects mismatched shapes") {
    const auto data = random_dataset(20, 3, 2, 1);
    CHECK_THROWS_AS(train(MlpNetwork::initialize({2, 2}, 1), data, TrainingProtocol{}), ShapeError);
    CHECK_THROWS_AS(train(MlpNetwork::initialize({3, 5}, 1), data, TrainingProtocol{}), ShapeError);
    TrainingProtocol bad;
    bad.batch_size = 0;
    CHECK_THROWS_AS(train(MlpNetwork::initialize({3, 2}, 1), data, bad), InvalidArgument);
}

TEST_CASE("evaluate") {
    // Label is the sign of the single feature; the net votes with +-10 x.
    std::vector<double> f;
    std::vector<int> labels;
    for (int i = 0; i < 20; ++i) {
        const double x = (i % 2 == 0 ? 1.0 : -1.0) * (1.0 + i);
        f.push_back(x);
        labels.push_back(x > 0 ? 1 : 0);
    }
    auto net = zero_net({1, 2});
    net.layers()[0].weights = {-10.0, 10.0};
    const TaskDataset right("sign", 1, f, labels, 2, iota_rows(0, 10), iota_rows(10, 20));
    CHECK(evaluate(net, right) == 1.0);

    std::vector<int> flipped = labels;
    for (auto& l : flipped) l = 1 - l;
    const TaskDataset wrong("flip", 1, f, flipped, 2, iota_rows(0, 10), iota_rows(10, 20));
    CHECK(evaluate(net, wrong) == 0.0);

    const TaskDataset no_test("empty", 1, f, labels, 2, iota_rows(0, 20), {});
    CHECK_THROWS_AS(evaluate(net, no_test), EmptyDataset);
}

TEST_CASE("untrained accuracy on random labels sits near chance") {
    const std::size_t classes = 4;
    const auto data = random_dataset(2000, 3, classes, 17);
    const auto net = MlpNetwork::initialize({3, 8, classes}, 9);
    const double n = static_cast<double>(data.test_rows().size());
    const double p = 1.0 / static_cast<double>(classes);
    const double band = 2.5758293035489 * std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(evaluate(net, data) - p) <= band);
}

TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 rng(123);
    for (int t = 0; t < 20; ++t) {
        const std::size_t in = 1 + rng() % 4;
        const std::size_t classes = 2 + rng() % 3;
        std::vector<std::size_t> sizes{in};
        const std::size_t hidden = rng() % 3;
        for (std::size_t h = 0; h < hidden; ++h) sizes.push_back(1 + rng() % 5);
        sizes.push_back(classes);
        const auto data = random_dataset(12, in, classes, rng());
        auto net = MlpNetwork::initialize(sizes, rng());
        std::normal_distribution<double> nb(0.0, 0.1);
        for (auto& l : net.layers()) {
            for (auto& b : l.biases) b = nb(rng);
        }
        const auto rows = data.rows(Partition::all);

        Gradient analytic;
        loss_and_gradient(net, data, rows, &analytic);
        const auto numeric = oracle::finite_difference_gradient(
            net, [&](const MlpNetwork& m) { return loss_and_gradient(m, data, rows, nullptr); }, 1e-5);

        double worst = 0.0;
        auto compare = [&](const std::vector<double>& a, const std::vector<double>& b) {
            REQUIRE(a.size() == b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double denom = std::max({std::abs(a[i]), std::abs(b[i]), 1e-6});
                worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
            }
        };
        for (std::size_t l = 0; l < analytic.layers.size(); ++l) {
            compare(analytic.layers[l].weights, numeric.layers[l].weights);
            compare(analytic.layers[l].biases, numeric.layers[l].biases);
        }
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("training is deterministic") {
    const auto data = random_dataset(100, 3, 3, 8);
    TrainingProtocol p;
    p.epochs = 5;
    p.shuffle_seed = 44;
    const auto a = train(MlpNetwork::initialize({3, 6, 3}, 2), data, p);
    const auto b = train(MlpNetwork::initialize({3, 6, 3}, 2), data, p);
    CHECK(a == b);
    p.shuffle_seed = 45;
    CHECK_FALSE(a == train(MlpNetwork::initialize({3, 6, 3}, 2), data, p));
}

TEST_CASE("full-batch descent with a small step never increases the loss") {
    const auto data = random_dataset(60, 2, 3, 10);
    TrainingProtocol p;
    p.epochs = 40;
    p.learning_rate = 1e-3;
    p.batch_size = data.train_rows().size();
    std::vector<double> losses{loss_and_gradient(MlpNetwork::initialize({2, 5, 3}, 6), data, data.train_rows(),
                                                 nullptr)};
    train(MlpNetwork::initialize({2, 5, 3}, 6), data, p, [&](const EpochStats& s) {
        CHECK(s.epoch == losses.size());
        losses.push_back(s.train_loss);
    });
    REQUIRE(losses.size() == 41);
    for (std::size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1]);
}

TEST_CASE("scalar and avx2 backends train to the same network") {
    if (!kernels::available(kernels::Backend::avx2)) return;
    const auto data = random_dataset(120, 5, 3, 12);
    TrainingProtocol p;
    p.epochs = 5;
    const auto before = kernels::active().backend;
    kernels::select(kernels::Backend::scalar);
    const auto a = train(MlpNetwork::initialize({5, 16, 9, 3}, 1), data, p);
    kernels::select(kernels::Backend::avx2);
    const auto b = train(MlpNetwork::initialize({5, 16, 9, 3}, 1), data, p);
    kernels::select(before);
    double worst = 0.0;
    for (std::size_t l = 0; l < a.layers().size(); ++l) {
        for (std::size_t i = 0; i < a.layers()[l].weights.size(); ++i) {
            worst = std::max(worst, std::abs(a.layers()[l].weights[i] - b.layers()[l].weights[i]));
        }
    }
    CHECK(worst < 1e-9);
}

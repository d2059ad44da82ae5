#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "domcx/entropy.hpp"
#include "domcx/error.hpp"
#include "oracles.hpp"

using namespace domcx;

namespace {

PixelGrid random_image(std::size_t h, std::size_t w, std::size_t levels, std::mt19937_64& rng) {
    PixelGrid g{h, w, std::vector<std::uint16_t>(h * w)};
    for (auto& v : g.values) v = static_cast<std::uint16_t>(rng() % levels);
    return g;
}

TaskDataset image_dataset(std::size_t n, std::size_t h, std::size_t w, std::size_t classes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> f(n * h * w);
    for (auto& v : f) v = static_cast<double>(rng() % 256) / 255.0;
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % classes);
    return TaskDataset::with_random_split("img", h * w, std::move(f), std::move(labels), classes, 0.2, seed);
}

}  // namespace

TEST_CASE("matches the per-pixel enumeration on random images") {
    std::mt19937_64 rng(2024);
    for (std::size_t levels : {4u, 256u}) {
        for (int i = 0; i < 100; ++i) {
            const auto img = random_image(8, 8, levels, rng);
            CHECK(std::abs(local_entropy(img) - oracle::naive_local_entropy(img, 1)) <= 1e-12);
        }
    }
    for (std::size_t radius : {2u, 3u}) {
        const auto img = random_image(7, 9, 5, rng);
        CHECK(std::abs(local_entropy(img, radius) - oracle::naive_local_entropy(img, static_cast<long>(radius))) <=
              1e-12);
    }
}

TEST_CASE("closed forms") {
    const PixelGrid flat{4, 5, std::vector<std::uint16_t>(20, 9)};
    CHECK(local_entropy(flat) == 0.0);

    // Only the centre pixel differs in a 3x3 image: the centre locality has counts {4, 1}.
    PixelGrid dot{3, 3, std::vector<std::uint16_t>(9, 0)};
    dot.values[4] = 1;
    const double h41 = -(0.8 * std::log2(0.8) + 0.2 * std::log2(0.2));
    CHECK(h41 == doctest::Approx(0.7219280948873623).epsilon(1e-15));
    CHECK(std::abs(h41 - 0.7219) <= 1e-4);
    // Edge pixels see {3,1}, corners see only zeros.
    const double h31 = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
    CHECK(local_entropy(dot) == doctest::Approx((h41 + 4.0 * h31) / 9.0).epsilon(1e-14));

    PixelGrid board{5, 5, {}};
    for (std::size_t r = 0; r < 5; ++r) {
        for (std::size_t c = 0; c < 5; ++c) board.values.push_back(static_cast<std::uint16_t>((r + c) % 2));
    }
    // 9 interior {4,1}, 12 edge {3,1}, 4 corner {2,1}.
    const double h21 = -(2.0 / 3.0 * std::log2(2.0 / 3.0) + 1.0 / 3.0 * std::log2(1.0 / 3.0));
    const double want = (9.0 * h41 + 12.0 * h31 + 4.0 * h21) / 25.0;
    CHECK(std::abs(local_entropy(board) - want) <= 1e-12);
    CHECK(std::abs(local_entropy(board) - oracle::naive_local_entropy(board, 1)) <= 1e-12);

    CHECK_THROWS_AS(local_entropy(PixelGrid{}), InvalidArgument);
    CHECK_THROWS_AS(local_entropy(flat, 0), InvalidArgument);
}

TEST_CASE("value relabelling leaves entropy unchanged") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const auto img = random_image(6, 7, 16, rng);
        std::vector<std::uint16_t> perm(16);
        std::iota(perm.begin(), perm.end(), std::uint16_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        PixelGrid mapped = img;
        for (auto& v : mapped.values) v = static_cast<std::uint16_t>(perm[v] * 3 + 100);
        CHECK(local_entropy(mapped) == local_entropy(img));
    }
}

TEST_CASE("entropy is bounded by the locality size") {
    std::mt19937_64 rng(4);
    const auto img = random_image(10, 10, 256, rng);
    const double e = local_entropy(img);
    CHECK(e >= 0.0);
    CHECK(e <= std::log2(5.0));
    const PixelGrid tiny{1, 1, {3}};
    CHECK(local_entropy(tiny) == 0.0);
}

TEST_CASE("noise has more local entropy than smooth images") {
    std::mt19937_64 rng(5);
    const auto noise = random_image(16, 16, 256, rng);
    PixelGrid ramp{16, 16, {}};
    for (std::size_t r = 0; r < 16; ++r) {
        for (std::size_t c = 0; c < 16; ++c) ramp.values.push_back(static_cast<std::uint16_t>(r * 4));
    }
    CHECK(local_entropy(noise) > local_entropy(ramp));
}

TEST_CASE("label term") {
    CHECK(label_term(1) == 0.0);
    CHECK(label_term(10) == doctest::Approx(3.321928094887362).epsilon(1e-15));
    CHECK(label_term(100) == doctest::Approx(6.643856189774724).epsilon(1e-15));
    CHECK_THROWS_AS(label_term(0), InvalidArgument);
}

TEST_CASE("quantize") {
    const std::vector<double> f{0.0, 1.0, 0.5, 128.0 / 255.0};
    const auto g = quantize(f, 2, 2, 256);
    CHECK(g.values == std::vector<std::uint16_t>{0, 255, 128, 128});
    const auto g4 = quantize(f, 2, 2, 4);
    CHECK(g4.values == std::vector<std::uint16_t>{0, 3, 2, 2});
    CHECK_THROWS_AS(quantize(f, 3, 2, 256), ShapeError);
}

TEST_CASE("dataset entropy") {
    std::vector<double> f(30 * 16, 0.25);
    std::vector<int> labels(30);
    for (int i = 0; i < 30; ++i) labels[static_cast<std::size_t>(i)] = i % 10;
    const auto flat = TaskDataset::with_random_split("flat", 16, f, labels, 10, 0.2, 1);
    const auto r = dataset_entropy(flat, 4, 4);
    CHECK(r.mean_local_entropy == 0.0);
    CHECK(r.total_per_image == doctest::Approx(3.321928094887362).epsilon(1e-15));
    CHECK_THROWS_AS(dataset_entropy(flat, 4, 5), ShapeError);

    const auto d = image_dataset(40, 5, 6, 3, 8);
    std::vector<int> relabelled(d.labels().begin(), d.labels().end());
    for (auto& l : relabelled) l = (l + 1) % 3;
    const TaskDataset other("img", d.dims(), std::vector<double>(d.features().begin(), d.features().end()),
                            relabelled, 3, std::vector<std::size_t>(d.train_rows().begin(), d.train_rows().end()),
                            std::vector<std::size_t>(d.test_rows().begin(), d.test_rows().end()));
    const auto a = dataset_entropy(d, 5, 6);
    const auto b = dataset_entropy(other, 5, 6);
    CHECK(a.total_per_image == b.total_per_image);
}

TEST_CASE("dataset entropy ignores row order") {
    const auto d = image_dataset(50, 6, 6, 4, 9);
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> f;
    std::vector<int> l;
    for (auto i : order) {
        f.insert(f.end(), d.row(i).begin(), d.row(i).end());
        l.push_back(d.label(i));
    }
    const auto shuffled = TaskDataset::with_random_split("img", d.dims(), f, l, 4, 0.2, 3);
    CHECK(dataset_entropy(shuffled, 6, 6).mean_local_entropy == dataset_entropy(d, 6, 6).mean_local_entropy);
}

TEST_CASE("entropic predictions") {
    EntropyResult a;
    a.total_per_image = 3.0;
    auto one = entropic_predictions({a});
    CHECK(*one[0].normalized == 1.0);
    auto two = entropic_predictions({a, a});
    CHECK(*two[0].normalized == 0.5);
    CHECK(*two[1].normalized == 0.5);
}

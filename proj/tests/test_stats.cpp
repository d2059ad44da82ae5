#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "domcx/error.hpp"
#include "domcx/stats.hpp"

using namespace domcx;
using V = std::vector<double>;

TEST_CASE("cosine similarity") {
    CHECK(cosine_similarity(V{1, 2, 3}, V{1, 2, 3}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine_similarity(V{1, 0}, V{0, 1}) == 0.0);
    CHECK(cosine_similarity(V{1, 1}, V{1, 0}) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
    CHECK_THROWS_AS(cosine_similarity(V{0, 0}, V{1, 0}), DegenerateInput);
    CHECK_THROWS_AS(cosine_similarity(V{1, 0}, V{1, 0, 0}), InvalidArgument);

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        V a(5), b(5), sa(5), sb(5);
        for (int i = 0; i < 5; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
            sa[i] = 3.5 * a[i];
            sb[i] = 0.02 * b[i];
        }
        CHECK(cosine_similarity(sa, sb) == doctest::Approx(cosine_similarity(a, b)).epsilon(1e-12));
    }
}

TEST_CASE("pearson") {
    CHECK(pearson(V{1, 2, 3, 4}, V{2, 4, 6, 8}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(V{1, 2, 3, 4}, V{-1, -2, -3, -4}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(pearson(V{1, 2, 3}, V{1, 3, 2}) - 0.5) <= 1e-12);
    CHECK_THROWS_AS(pearson(V{1, 1, 1}, V{1, 2, 3}), DegenerateInput);
    CHECK_THROWS_AS(pearson(V{1}, V{1}), DegenerateInput);

    std::mt19937_64 rng(2);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        V x(8), y(8), ax(8);
        for (int i = 0; i < 8; ++i) {
            x[i] = n(rng);
            y[i] = x[i] + n(rng);
            ax[i] = 4.0 * x[i] - 7.0;
        }
        CHECK(pearson(ax, y) == doctest::Approx(pearson(x, y)).epsilon(1e-12));
        const double r = pearson(x, y);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("ranks and spearman") {
    CHECK(average_ranks(V{10, 20, 20, 5}) == V{2, 3.5, 3.5, 1});
    CHECK(spearman(V{1, 2, 3, 4}, V{1, 8, 27, 64}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(spearman(V{1, 2, 3, 4}, V{4, 3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(spearman(V{1, 2, 3, 4}, V{1, 3, 2, 4}) - 0.8) <= 1e-12);
}

TEST_CASE("mean and spread") {
    CHECK(mean(V{1, 2, 3, 6}) == 3.0);
    CHECK(sample_stddev(V{5}) == 0.0);
    CHECK(sample_stddev(V{1, 2, 3, 4}) == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
}

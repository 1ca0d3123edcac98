#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "mdsampler/gumbel.hpp"

using namespace mdsampler;

TEST_SUITE("gumbel") {

TEST_CASE("transform fixed point and clamping") {
    // u = 1/e maps to 0
    CHECK(gumbel::gumbel_from_uniform(std::exp(-1.0)) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::isfinite(gumbel::gumbel_from_uniform(0.0)));
    CHECK(std::isfinite(gumbel::gumbel_from_uniform(1.0)));
    CHECK(std::isfinite(gumbel::gumbel_from_uniform(1e-320)));  // subnormal input
}

TEST_CASE("noise median and mean") {
    Rng rng(777);
    const long long draws = 1000000;
    std::vector<double> xs(static_cast<size_t>(draws));
    double sum = 0.0;
    for (auto& x : xs) {
        x = gumbel::sample_gumbel(rng);
        sum += x;
    }
    std::nth_element(xs.begin(), xs.begin() + draws / 2, xs.end());
    const double median = xs[static_cast<size_t>(draws / 2)];
    CHECK(std::abs(median - (-std::log(std::log(2.0)))) < 0.01);
    const double euler_mascheroni = 0.5772156649015329;
    CHECK(std::abs(sum / draws - euler_mascheroni) < 0.01);
}

TEST_CASE("prefix pmf closed form") {
    const std::vector<double> mu = {std::log(1.0), std::log(2.0), std::log(3.0)};
    SUBCASE("single step is a softmax") {
        const std::vector<int> prefix = {2};
        CHECK(gumbel::top_k_prefix_pmf(mu, prefix) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("full order multiplies the surviving softmaxes") {
        const std::vector<int> prefix = {2, 1, 0};
        CHECK(gumbel::top_k_prefix_pmf(mu, prefix) ==
              doctest::Approx((3.0 / 6.0) * (2.0 / 3.0)).epsilon(1e-12));
    }
    SUBCASE("flat logits give the uniform permutation") {
        const std::vector<double> flat = {0.0, 0.0, 0.0};
        const std::vector<int> prefix = {0, 1, 2};
        CHECK(gumbel::top_k_prefix_pmf(flat, prefix) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
    SUBCASE("prefix mass sums to one") {
        Rng rng(778);
        std::vector<double> m(5);
        for (auto& v : m) v = 2.0 * uniform01(rng) - 1.0;
        double total = 0.0;
        std::vector<int> prefix(3);
        for (int a = 0; a < 5; ++a) {
            for (int b = 0; b < 5; ++b) {
                for (int c = 0; c < 5; ++c) {
                    if (a == b || b == c || a == c) continue;
                    prefix = {a, b, c};
                    total += gumbel::top_k_prefix_pmf(m, prefix);
                }
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("duplicate and out-of-range prefixes are rejected") {
        const std::vector<int> dup = {1, 1};
        CHECK_THROWS_AS(gumbel::top_k_prefix_pmf(mu, dup), ArgumentError);
        const std::vector<int> oob = {5};
        CHECK_THROWS_AS(gumbel::top_k_prefix_pmf(mu, oob), ArgumentError);
    }
}

TEST_CASE("top-k selection") {
    Rng rng(779);
    SUBCASE("zero temperature is a deterministic argtop-k") {
        const std::vector<double> mu = {5.0, 1.0, 0.0};
        const auto sel = gumbel::gumbel_top_k(mu, 1, 0.0, rng);
        CHECK(sel.indices == std::vector<int>{0});
        const auto sel3 = gumbel::gumbel_top_k(mu, 3, 0.0, rng);
        CHECK(sel3.indices == std::vector<int>{0, 1, 2});
    }
    SUBCASE("ties break toward the lower index at zero temperature") {
        const std::vector<double> mu = {1.0, 1.0, 1.0};
        const auto sel = gumbel::gumbel_top_k(mu, 2, 0.0, rng);
        CHECK(sel.indices == std::vector<int>{0, 1});
    }
    SUBCASE("two flat logits split evenly") {
        const std::vector<double> mu = {0.0, 0.0};
        long long first = 0;
        const long long draws = 200000;
        for (long long d = 0; d < draws; ++d) {
            first += gumbel::gumbel_top_k(mu, 2, 1.0, rng).indices[0] == 0 ? 1 : 0;
        }
        CHECK(std::abs(static_cast<double>(first) / draws - 0.5) < 0.005);
    }
    SUBCASE("full-order frequency matches the closed form") {
        const std::vector<double> mu = {std::log(1.0), std::log(2.0), std::log(3.0)};
        long long hits = 0;
        const long long draws = 1000000;
        for (long long d = 0; d < draws; ++d) {
            if (gumbel::gumbel_top_k(mu, 3, 1.0, rng).indices == std::vector<int>{2, 1, 0}) ++hits;
        }
        CHECK(std::abs(static_cast<double>(hits) / draws - 1.0 / 3.0) < 0.002);
    }
    SUBCASE("k beyond the vector is rejected") {
        const std::vector<double> mu = {0.0, 0.0};
        CHECK_THROWS_AS(gumbel::gumbel_top_k(mu, 3, 1.0, rng), ArgumentError);
    }
}

}  // TEST_SUITE

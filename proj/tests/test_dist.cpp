#include <doctest.h>

#include <cmath>
#include <vector>

#include "mdsampler/dist.hpp"

using namespace mdsampler;
using dist::Categorical;

TEST_SUITE("dist") {

TEST_CASE("categorical validation") {
    CHECK_NOTHROW(Categorical({0.5, 0.5}));
    CHECK_NOTHROW(Categorical({1.0}));
    CHECK_THROWS_AS(Categorical({}), InvalidDistributionError);
    CHECK_THROWS_AS(Categorical({0.6, 0.6}), InvalidDistributionError);
    CHECK_THROWS_AS(Categorical({-0.1, 1.1}), InvalidDistributionError);
    CHECK_THROWS_AS(Categorical::from_weights({0.0, 0.0}), InvalidDistributionError);
}

TEST_CASE("entropy") {
    CHECK(dist::entropy(Categorical::uniform(4)) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(dist::entropy(Categorical::one_hot(3, 0)) == 0.0);
    // 1.5 log 2 for the (1/2, 1/4, 1/4) split
    CHECK(dist::entropy(Categorical({0.5, 0.25, 0.25})) ==
          doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("power sum") {
    CHECK(dist::power_sum(Categorical::uniform(4), 2.0) == doctest::Approx(0.25).epsilon(1e-12));
    for (double beta : {0.5, 1.0, 2.0, 7.0}) {
        CHECK(dist::power_sum(Categorical::one_hot(5, 2), beta) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(dist::power_sum(Categorical({0.8, 0.2}), 2.0) == doctest::Approx(0.68).epsilon(1e-12));
    // log-space stability: large beta on a skewed vector stays finite
    const double lp = dist::log_power_sum(Categorical({0.9, 0.1}), 400.0);
    CHECK(std::isfinite(lp));
    CHECK(lp == doctest::Approx(400.0 * std::log(0.9)).epsilon(1e-9));
    CHECK_THROWS_AS(dist::power_sum(Categorical::uniform(2), 0.0), ArgumentError);
}

TEST_CASE("temper") {
    const Categorical p({0.8, 0.2});
    SUBCASE("unit exponent returns the same object") {
        const auto q = dist::temper(p, 1.0);
        CHECK(q.probs() == p.probs());
    }
    SUBCASE("square sharpens to 16/17, 1/17") {
        const auto q = dist::temper(p, 2.0);
        CHECK(q[0] == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
        CHECK(q[1] == doctest::Approx(1.0 / 17.0).epsilon(1e-12));
    }
    SUBCASE("one-hot is a fixed point") {
        for (double g : {0.3, 1.0, 2.0, 9.0}) {
            const auto q = dist::temper(Categorical::one_hot(4, 1), g);
            CHECK(q[1] == 1.0);
        }
    }
    SUBCASE("zeros stay zero") {
        const auto q = dist::temper(Categorical({0.0, 0.3, 0.7}), 3.0);
        CHECK(q[0] == 0.0);
    }
}

TEST_CASE("confidence") {
    CHECK(dist::confidence(Categorical::uniform(4)) == doctest::Approx(0.25));
    CHECK(dist::confidence(Categorical::one_hot(3, 2)) == 1.0);
    CHECK(dist::confidence(Categorical({0.5, 0.3, 0.2})) == doctest::Approx(0.5));
}

TEST_CASE("sampling hits frequencies") {
    Rng rng(401);
    SUBCASE("one-hot is deterministic") {
        for (int i = 0; i < 20; ++i) CHECK(dist::sample(Categorical::one_hot(4, 2), rng) == 2);
    }
    SUBCASE("fair coin stays within the binomial interval") {
        const Categorical p = Categorical::uniform(2);
        long long zeros = 0;
        const long long draws = 1000000;
        for (long long i = 0; i < draws; ++i) zeros += dist::sample(p, rng) == 0 ? 1 : 0;
        const double freq = static_cast<double>(zeros) / draws;
        CHECK(freq == doctest::Approx(0.5).epsilon(0.004));
    }
    SUBCASE("skewed coin stays within the binomial interval") {
        const Categorical p({0.9, 0.1});
        long long zeros = 0;
        const long long draws = 1000000;
        for (long long i = 0; i < draws; ++i) zeros += dist::sample(p, rng) == 0 ? 1 : 0;
        const double freq = static_cast<double>(zeros) / draws;
        CHECK(std::abs(freq - 0.9) < 0.001);
    }
}

TEST_CASE("beta from alpha") {
    CHECK(dist::beta_from_alpha(1.0) == doctest::Approx(2.0));
    CHECK(dist::beta_from_alpha(4.0) == doctest::Approx(1.25));
    CHECK(dist::beta_from_alpha(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK_THROWS_AS(dist::beta_from_alpha(0.0), ArgumentError);
}

}  // TEST_SUITE

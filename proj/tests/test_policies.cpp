#include <doctest.h>

#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "mdsampler/dist.hpp"
#include "mdsampler/policies.hpp"

using namespace mdsampler;
using dist::Categorical;
using policies::Ordering;

TEST_SUITE("policies") {

TEST_CASE("random ordering") {
    Rng rng(31);
    SUBCASE("singleton") {
        const std::vector<int> masked = {5};
        CHECK(policies::order_random(masked, rng).positions == masked);
    }
    SUBCASE("empty set rejected") {
        const std::vector<int> none;
        CHECK_THROWS_AS(policies::order_random(none, rng), ArgumentError);
    }
    SUBCASE("all six permutations show up uniformly") {
        const std::vector<int> masked = {0, 1, 2};
        std::map<std::vector<int>, int> counts;
        const int draws = 100000;
        for (int d = 0; d < draws; ++d) counts[policies::order_random(masked, rng).positions] += 1;
        CHECK(counts.size() == 6);
        for (const auto& [perm, c] : counts) {
            (void)perm;
            CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 6.0) < 0.01);
        }
    }
}

TEST_CASE("confidence ordering") {
    Rng rng(32);
    SUBCASE("one-hot beats uniforms") {
        policies::PositionProbs probs;
        probs.emplace_back(0, Categorical::uniform(4));
        probs.emplace_back(1, Categorical::one_hot(4, 2));
        probs.emplace_back(2, Categorical::uniform(4));
        CHECK(policies::order_confidence(probs, rng).positions.front() == 1);
    }
    SUBCASE("clear gaps are deterministic") {
        policies::PositionProbs probs;
        probs.emplace_back(7, Categorical({0.9, 0.1}));
        probs.emplace_back(3, Categorical({0.6, 0.4}));
        for (int t = 0; t < 10; ++t) {
            CHECK(policies::order_confidence(probs, rng).positions == std::vector<int>{7, 3});
        }
    }
    SUBCASE("exact ties randomize via the jitter") {
        policies::PositionProbs probs;
        for (int i = 0; i < 3; ++i) probs.emplace_back(i, Categorical::uniform(2));
        std::map<std::vector<int>, int> counts;
        const int draws = 60000;
        for (int d = 0; d < draws; ++d) counts[policies::order_confidence(probs, rng).positions] += 1;
        CHECK(counts.size() == 6);
        for (const auto& [perm, c] : counts) {
            (void)perm;
            CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 6.0) < 0.02);
        }
    }
}

TEST_CASE("moment ordering") {
    Rng rng(33);
    SUBCASE("beta = 1 gives a uniformly random order") {
        policies::PositionProbs probs;
        probs.emplace_back(0, Categorical({0.9, 0.1}));
        probs.emplace_back(1, Categorical::uniform(2));
        probs.emplace_back(2, Categorical({0.6, 0.4}));
        std::map<std::vector<int>, int> counts;
        const int draws = 60000;
        for (int d = 0; d < draws; ++d) counts[policies::order_moment(probs, 1.0, rng).positions] += 1;
        CHECK(counts.size() == 6);
        for (const auto& [perm, c] : counts) {
            (void)perm;
            CHECK(std::abs(static_cast<double>(c) / draws - 1.0 / 6.0) < 0.02);
        }
    }
    SUBCASE("one-hot wins over uniform with the expected odds") {
        // power sums 1 vs 0.5: first place odds 1 / 1.5
        policies::PositionProbs probs;
        probs.emplace_back(0, Categorical::one_hot(2, 0));
        probs.emplace_back(1, Categorical::uniform(2));
        long long first = 0;
        const int draws = 400000;
        for (int d = 0; d < draws; ++d) {
            first += policies::order_moment(probs, 2.0, rng).positions.front() == 0 ? 1 : 0;
        }
        CHECK(std::abs(static_cast<double>(first) / draws - 2.0 / 3.0) < 0.005);
    }
    SUBCASE("beta below one is rejected") {
        policies::PositionProbs probs;
        probs.emplace_back(0, Categorical::uniform(2));
        CHECK_THROWS_AS(policies::order_moment(probs, 0.5, rng), ArgumentError);
    }
}

TEST_CASE("van der corput radical inverse") {
    CHECK(policies::van_der_corput(0, 2) == 0.0);
    CHECK(policies::van_der_corput(1, 2) == 0.5);
    CHECK(policies::van_der_corput(2, 2) == 0.25);
    CHECK(policies::van_der_corput(3, 2) == 0.75);
    CHECK(policies::van_der_corput(5, 2) == 0.625);
    CHECK(policies::van_der_corput(1, 3) == doctest::Approx(1.0 / 3.0));
    CHECK(policies::van_der_corput(2, 3) == doctest::Approx(2.0 / 3.0));
    CHECK(policies::van_der_corput(3, 3) == doctest::Approx(1.0 / 9.0));
    CHECK_THROWS_AS(policies::van_der_corput(1, 1), ArgumentError);
}

TEST_CASE("1d low-discrepancy ordering") {
    SUBCASE("full 8-cell order") {
        std::vector<int> masked(8);
        std::iota(masked.begin(), masked.end(), 0);
        const auto o = policies::order_halton_1d(8, masked);
        CHECK(o.positions == std::vector<int>{0, 4, 2, 6, 1, 5, 3, 7});
    }
    SUBCASE("single cell") {
        const std::vector<int> masked = {0};
        CHECK(policies::order_halton_1d(1, masked).positions == masked);
    }
    SUBCASE("filtering keeps relative order") {
        std::vector<int> all(8);
        std::iota(all.begin(), all.end(), 0);
        const auto full = policies::order_halton_1d(8, all);
        const std::vector<int> masked = {1, 3, 4, 6};
        const auto filtered = policies::order_halton_1d(8, masked);
        std::vector<int> expected;
        for (int pos : full.positions) {
            if (std::find(masked.begin(), masked.end(), pos) != masked.end()) expected.push_back(pos);
        }
        CHECK(filtered.positions == expected);
    }
    SUBCASE("non-power-of-two lengths still cover everything") {
        for (int D : {3, 5, 6, 7, 12, 100}) {
            std::vector<int> masked(static_cast<size_t>(D));
            std::iota(masked.begin(), masked.end(), 0);
            auto got = policies::order_halton_1d(D, masked).positions;
            std::sort(got.begin(), got.end());
            CHECK(got == masked);
        }
    }
}

TEST_CASE("2d low-discrepancy ordering") {
    SUBCASE("degenerate grid") {
        const std::vector<int> masked = {0};
        CHECK(policies::order_halton_2d(1, 1, masked).positions == masked);
    }
    SUBCASE("first point lands in the first cell") {
        std::vector<int> masked(6);
        std::iota(masked.begin(), masked.end(), 0);
        const auto o = policies::order_halton_2d(2, 3, masked);
        CHECK(o.positions.front() == 0);
        auto sorted = o.positions;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == masked);
    }
    SUBCASE("masked index outside the grid is rejected") {
        const std::vector<int> masked = {7};
        CHECK_THROWS_AS(policies::order_halton_2d(2, 3, masked), ArgumentError);
    }
}

TEST_CASE("merge orderings") {
    const Ordering i{{2, 3, 6, 5, 1, 4}};
    const Ordering j{{4, 3, 1, 5, 6, 2}};
    SUBCASE("worked example") {
        const auto k = policies::merge_orderings(i, j, 4, 2);
        CHECK(k.positions == std::vector<int>{2, 3, 4, 1, 5, 6});
    }
    SUBCASE("m = 0 returns the second ordering") {
        CHECK(policies::merge_orderings(i, j, 4, 0).positions == j.positions);
    }
    SUBCASE("m = length returns the first ordering") {
        CHECK(policies::merge_orderings(i, j, 6, 6).positions == i.positions);
    }
    SUBCASE("different sets are rejected") {
        const Ordering other{{1, 2, 3, 4, 5, 7}};
        CHECK_THROWS_AS(policies::merge_orderings(i, other, 4, 2), ArgumentError);
    }
    SUBCASE("m > n is rejected") {
        CHECK_THROWS_AS(policies::merge_orderings(i, j, 2, 3), ArgumentError);
    }
}

}  // TEST_SUITE

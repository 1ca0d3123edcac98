#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "mdsampler/metrics.hpp"
#include "mdsampler/rounds.hpp"

using namespace mdsampler;
using dist::Categorical;
using rounds::RoundKey;

namespace {

std::vector<Categorical> random_family(Rng& rng, int n, int s) {
    std::vector<Categorical> ps;
    for (int i = 0; i < n; ++i) {
        std::vector<double> w(static_cast<size_t>(s));
        for (double& v : w) v = 0.05 + uniform01(rng);
        ps.push_back(Categorical::from_weights(std::move(w)));
    }
    return ps;
}

// Index-selection marginal of the first slot.
std::map<int, double> first_index_marginal(const rounds::RoundPmf& pmf) {
    std::map<int, double> out;
    for (const auto& [key, p] : pmf) out[key.indices.front()] += p;
    return out;
}

}  // namespace

TEST_SUITE("rounds") {

TEST_CASE("sample-then-choose round basics") {
    Rng rng(501);
    SUBCASE("single one-hot position is deterministic") {
        const std::vector<Categorical> ps = {Categorical::one_hot(3, 2)};
        const auto o = rounds::maskgit_round(ps, 1, 1.0, rng);
        CHECK(o.indices == std::vector<int>{0});
        CHECK(o.tokens == std::vector<int>{2});
    }
    SUBCASE("two symmetric positions split first place evenly") {
        const std::vector<Categorical> ps = {Categorical::uniform(2), Categorical::uniform(2)};
        long long first = 0;
        const int draws = 200000;
        for (int d = 0; d < draws; ++d) {
            first += rounds::maskgit_round(ps, 2, 1.0, rng).indices.front() == 0 ? 1 : 0;
        }
        CHECK(std::abs(static_cast<double>(first) / draws - 0.5) < 0.005);
    }
    SUBCASE("k out of range is rejected") {
        const std::vector<Categorical> ps = {Categorical::uniform(2)};
        CHECK_THROWS_AS(rounds::maskgit_round(ps, 2, 1.0, rng), ArgumentError);
    }
}

TEST_CASE("choose-then-sample round basics") {
    Rng rng(502);
    SUBCASE("one-hot vs uniform: first pick odds are 2:1") {
        const std::vector<Categorical> ps = {Categorical::one_hot(2, 0), Categorical::uniform(2)};
        long long first = 0;
        const int draws = 400000;
        for (int d = 0; d < draws; ++d) {
            first += rounds::moment_round(ps, 1, 1.0, 2.0, rng).indices.front() == 0 ? 1 : 0;
        }
        CHECK(std::abs(static_cast<double>(first) / draws - 2.0 / 3.0) < 0.005);
    }
    SUBCASE("identical positions select uniformly") {
        const std::vector<Categorical> ps(4, Categorical({0.7, 0.3}));
        std::vector<long long> counts(4, 0);
        const int draws = 200000;
        for (int d = 0; d < draws; ++d) {
            counts[static_cast<size_t>(rounds::moment_round(ps, 1, 2.0, 1.5, rng).indices.front())] += 1;
        }
        for (long long c : counts) CHECK(std::abs(static_cast<double>(c) / draws - 0.25) < 0.01);
    }
    SUBCASE("unit exponent keeps token marginals") {
        const std::vector<Categorical> ps = {Categorical({0.8, 0.2}), Categorical({0.3, 0.7})};
        std::vector<std::map<int, long long>> tok_counts(2);
        std::vector<long long> sel_counts(2, 0);
        const int draws = 400000;
        for (int d = 0; d < draws; ++d) {
            const auto o = rounds::moment_round(ps, 1, 1.0, 1.0, rng);
            sel_counts[static_cast<size_t>(o.indices.front())] += 1;
            tok_counts[static_cast<size_t>(o.indices.front())][o.tokens.front()] += 1;
        }
        for (int i = 0; i < 2; ++i) {
            const double freq0 = static_cast<double>(tok_counts[static_cast<size_t>(i)][0]) /
                                 static_cast<double>(sel_counts[static_cast<size_t>(i)]);
            CHECK(std::abs(freq0 - ps[static_cast<size_t>(i)][0]) < 0.01);
        }
    }
}

TEST_CASE("choose-then-sample exact pmf") {
    SUBCASE("normalizes on a random instance") {
        Rng rng(503);
        const auto ps = random_family(rng, 5, 3);
        const auto pmf = rounds::moment_round_exact_pmf(ps, 2, 1.0, 2.0);
        CHECK(rounds::pmf_total_mass(pmf) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("one-hot vs uniform selection mass is 2/3") {
        const std::vector<Categorical> ps = {Categorical::one_hot(2, 0), Categorical::uniform(2)};
        const auto pmf = rounds::moment_round_exact_pmf(ps, 1, 1.0, 2.0);
        const auto marg = first_index_marginal(pmf);
        CHECK(marg.at(0) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("capacity guard") {
        Rng rng(504);
        const auto ps = random_family(rng, 40, 10);
        CHECK_THROWS_AS(rounds::moment_round_exact_pmf(ps, 5, 1.0, 2.0), CapacityError);
    }
}

TEST_CASE("sample-then-choose exact pmf") {
    Rng rng(505);
    SUBCASE("normalizes on a random instance") {
        const auto ps = random_family(rng, 4, 2);
        const auto pmf = rounds::maskgit_round_exact_pmf(ps, 2, 1.0);
        CHECK(rounds::pmf_total_mass(pmf) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("noise-dominated limit selects uniformly without replacement") {
        const auto ps = random_family(rng, 4, 2);
        const auto pmf_large = rounds::maskgit_round_exact_pmf(ps, 2, 1e9);
        const auto marg = first_index_marginal(pmf_large);
        for (const auto& [i, p] : marg) {
            (void)i;
            CHECK(std::abs(p - 0.25) < 1e-6);
        }
        // the distinguished infinite value gives the limit exactly
        const auto pmf_inf =
            rounds::maskgit_round_exact_pmf(ps, 2, std::numeric_limits<double>::infinity());
        for (const auto& [i, p] : first_index_marginal(pmf_inf)) {
            (void)i;
            CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
        }
    }
    SUBCASE("matches the sampler empirically") {
        const auto ps = random_family(rng, 4, 2);
        const auto exact = rounds::maskgit_round_exact_pmf(ps, 1, 1.0);
        metrics::EmpiricalPmf<RoundKey> emp;
        Rng draw_rng(506);
        for (int d = 0; d < 1000000; ++d) {
            auto o = rounds::maskgit_round(ps, 1, 1.0, draw_rng);
            emp.add(RoundKey{std::move(o.indices), std::move(o.tokens)});
        }
        CHECK(metrics::tv_empirical(emp, exact) < 0.01);
    }
    SUBCASE("capacity guard") {
        const auto ps = random_family(rng, 25, 3);
        CHECK_THROWS_AS(rounds::maskgit_round_exact_pmf(ps, 1, 1.0), CapacityError);
    }
}

TEST_CASE("closed-form distance bound") {
    SUBCASE("threshold instance evaluates to 5") {
        // N = k^2 |S|^(1/alpha): ratio 1, log+ term 0
        CHECK(rounds::tv_theorem_bound(8, 2, 2, 1.0) == doctest::Approx(5.0).epsilon(1e-12));
    }
    SUBCASE("unit alphabet instance") {
        CHECK(rounds::tv_theorem_bound(25, 1, 1, 1.0) ==
              doctest::Approx((1.0 + std::sqrt(std::log(25.0)))).epsilon(1e-12));
    }
    SUBCASE("monotone decreasing in N") {
        double prev = std::numeric_limits<double>::infinity();
        for (int N : {100, 1000, 10000}) {
            const double b = rounds::tv_theorem_bound(N, 2, 4, 2.0);
            CHECK(b < prev);
            prev = b;
        }
    }
    SUBCASE("infinite alpha collapses the alphabet factor") {
        CHECK(rounds::tv_theorem_bound(25, 1, 1000, std::numeric_limits<double>::infinity()) ==
              doctest::Approx(1.0 + std::sqrt(std::log(25.0))).epsilon(1e-12));
    }
}

TEST_CASE("order marginalization utility") {
    Rng rng(507);
    const auto ps = random_family(rng, 3, 2);
    const auto pmf = rounds::moment_round_exact_pmf(ps, 2, 1.0, 2.0);
    const auto unordered = rounds::marginalize_order(pmf);
    CHECK(rounds::pmf_total_mass(unordered) == doctest::Approx(1.0).epsilon(1e-12));
    for (const auto& [key, p] : unordered) {
        (void)p;
        CHECK(std::is_sorted(key.indices.begin(), key.indices.end()));
    }
    CHECK(unordered.size() < pmf.size());
}

}  // TEST_SUITE

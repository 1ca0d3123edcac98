#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "mdsampler/metrics.hpp"

using namespace mdsampler;

TEST_SUITE("metrics") {

TEST_CASE("tv on dense vectors") {
    const std::vector<double> p = {0.7, 0.3};
    const std::vector<double> q = {0.5, 0.5};
    CHECK(metrics::tv_exact(p, q) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(metrics::tv_exact(p, p) == 0.0);
}

TEST_CASE("tv on maps handles disjoint supports") {
    std::map<int, double> p{{0, 1.0}};
    std::map<int, double> q{{1, 1.0}};
    CHECK(metrics::tv_exact(p, q) == doctest::Approx(1.0));
    std::map<int, double> r{{0, 0.25}, {2, 0.75}};
    std::map<int, double> s{{0, 0.5}, {1, 0.5}};
    // |0.25-0.5| + 0.5 + 0.75 halved
    CHECK(metrics::tv_exact(r, s) == doctest::Approx(0.75));
}

TEST_CASE("empirical tv") {
    SUBCASE("single sample at the whole mass is exact") {
        metrics::EmpiricalPmf<int> emp;
        emp.add(0);
        std::map<int, double> q{{0, 1.0}};
        CHECK(metrics::tv_empirical(emp, q) == 0.0);
    }
    SUBCASE("single sample against a fair coin") {
        metrics::EmpiricalPmf<int> emp;
        emp.add(1);
        std::map<int, double> q{{0, 0.5}, {1, 0.5}};
        CHECK(metrics::tv_empirical(emp, q) == doctest::Approx(0.5));
    }
    SUBCASE("no draws is an error") {
        metrics::EmpiricalPmf<int> emp;
        std::map<int, double> q{{0, 1.0}};
        CHECK_THROWS_AS(metrics::tv_empirical(emp, q), ArgumentError);
    }
    SUBCASE("merge adds counts") {
        metrics::EmpiricalPmf<int> a, b;
        a.add(0, 3);
        b.add(0, 1);
        b.add(1, 4);
        a.merge(b);
        CHECK(a.total == 8);
        CHECK(a.counts[0] == 4);
        CHECK(a.counts[1] == 4);
    }
}

TEST_CASE("estimation scale") {
    CHECK(metrics::tv_estimation_scale(40, 1000000) == doctest::Approx(std::sqrt(40.0 / 1e6)));
    CHECK_THROWS_AS(metrics::tv_estimation_scale(4, 0), ArgumentError);
}

TEST_CASE("sequence entropy") {
    const std::vector<int> same = {3, 3, 3, 3};
    CHECK(metrics::sequence_entropy(same) == 0.0);
    const std::vector<int> distinct = {0, 1, 2, 3, 4};
    CHECK(metrics::sequence_entropy(distinct) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    const std::vector<int> mixed = {7, 7, 2, 5};  // (a,a,b,c)
    CHECK(metrics::sequence_entropy(mixed) == doctest::Approx(1.5 * std::log(2.0)).epsilon(1e-12));
    CHECK(metrics::nats_to_bits(std::log(2.0)) == doctest::Approx(1.0));
}

}  // TEST_SUITE

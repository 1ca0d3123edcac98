#include <doctest.h>

#include <limits>
#include <vector>

#include "mdsampler/schedules.hpp"

using namespace mdsampler;
using schedules::Kind;

TEST_SUITE("schedules") {

TEST_CASE("uniform counts") {
    const auto s = schedules::unmask_counts(Kind::uniform, 10, 5);
    CHECK(s.cumulative == std::vector<int>{0, 2, 4, 6, 8, 10});
    for (int n = 1; n <= 5; ++n) CHECK(s.step_size(n) == 2);
}

TEST_CASE("cosine endpoints") {
    for (int D : {3, 10, 32, 257}) {
        const auto s = schedules::unmask_counts(Kind::cosine, D, std::min(D, 7));
        CHECK(s.cumulative.front() == 0);
        CHECK(s.cumulative.back() == D);
    }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(schedules::unmask_counts(Kind::uniform, 4, 5), ArgumentError);
    CHECK_THROWS_AS(schedules::unmask_counts(Kind::uniform, 4, 0), ArgumentError);
    CHECK_THROWS_AS(schedules::kind_from_string("triangle"), ArgumentError);
    CHECK(schedules::kind_from_string("cosine") == Kind::cosine);
}

TEST_CASE("gumbel temperature schedule") {
    CHECK(schedules::gumbel_temp(6.0, 4, 8) == doctest::Approx(3.0));
    CHECK(schedules::gumbel_temp(6.0, 8, 8) == 0.0);
    CHECK(schedules::gumbel_temp(12.0, 2, 8) == doctest::Approx(9.0));
    // infinite alpha: infinite until the final step, then exactly zero
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(schedules::gumbel_temp(inf, 1, 4) == inf);
    CHECK(schedules::gumbel_temp(inf, 4, 4) == 0.0);
}

TEST_CASE("half-step counts") {
    const auto s = schedules::unmask_counts(Kind::uniform, 10, 5);
    const auto half = schedules::half_step_counts(s);
    REQUIRE(half.size() == 5);
    CHECK(half[0] == 1);  // round(10 * 0.5 / 5)
    for (int n = 1; n <= 5; ++n) {
        CHECK(half[static_cast<size_t>(n - 1)] >= s.cumulative[static_cast<size_t>(n - 1)]);
        CHECK(half[static_cast<size_t>(n - 1)] <= s.cumulative[static_cast<size_t>(n)]);
    }
    // A degenerate step pins the half count between equal bounds.
    const auto tight = schedules::unmask_counts(Kind::cosine, 4, 4);
    const auto tight_half = schedules::half_step_counts(tight);
    for (int n = 1; n <= 4; ++n) {
        if (tight.step_size(n) == 0) {
            CHECK(tight_half[static_cast<size_t>(n - 1)] ==
                  tight.cumulative[static_cast<size_t>(n)]);
        }
    }
}

TEST_CASE("hybrid merge count") {
    CHECK(schedules::hybrid_m(4, 4, 7) == 0);
    CHECK(schedules::hybrid_m(1, 4, 4) == 3);
    CHECK(schedules::hybrid_m(2, 4, 4) == 2);
    for (int n = 1; n <= 6; ++n) {
        const int m = schedules::hybrid_m(n, 6, 5);
        CHECK(m >= 0);
        CHECK(m <= 5);
    }
}

TEST_CASE("rounding is half away from zero") {
    CHECK(schedules::round_half_away(0.5) == 1);
    CHECK(schedules::round_half_away(1.5) == 2);
    CHECK(schedules::round_half_away(-0.5) == -1);
    CHECK(schedules::round_half_away(2.4) == 2);
}

}  // TEST_SUITE

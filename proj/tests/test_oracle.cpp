#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "mdsampler/metrics.hpp"
#include "mdsampler/oracle.hpp"

using namespace mdsampler;
using oracle::JointTable;

namespace {

// Product of two explicit marginals as a D=2 table, coordinate 0 slowest.
JointTable product_table(const std::vector<double>& p0, const std::vector<double>& p1) {
    std::vector<double> probs;
    for (double a : p0) {
        for (double b : p1) probs.push_back(a * b);
    }
    return JointTable(2, static_cast<int>(p0.size()), std::move(probs));
}

const oracle::PolicyKernel uniform_kernel = [](const cts::MaskState& s) {
    const size_t m = s.masked_positions().size();
    return std::vector<double>(m, 1.0 / static_cast<double>(m));
};

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("joint table validation and indexing") {
    CHECK_THROWS_AS(JointTable(2, 2, {0.25, 0.25, 0.25}), ArgumentError);
    CHECK_THROWS_AS(JointTable(2, 2, {0.5, 0.5, 0.1, -0.1}), InvalidDistributionError);
    CHECK_THROWS_AS(JointTable(2, 2, {0.3, 0.3, 0.3, 0.2}), InvalidDistributionError);
    CHECK_THROWS_AS(JointTable(30, 3, std::vector<double>(100, 0.01)), CapacityError);

    const JointTable q(2, 2, {0.4, 0.1, 0.2, 0.3});
    const std::vector<int> x01 = {0, 1};
    CHECK(q.index_of(x01) == 1);  // coordinate 0 is the slow axis
    const std::vector<int> x10 = {1, 0};
    CHECK(q.index_of(x10) == 2);
    std::vector<int> decoded;
    q.decode(2, decoded);
    CHECK(decoded == x10);
}

TEST_CASE("random tables are normalized tightly") {
    Rng rng(601);
    for (int trial = 0; trial < 5; ++trial) {
        const auto q = JointTable::random(4, 4, rng);
        KahanSum total;
        for (double p : q.probs()) total.add(p);
        CHECK(std::abs(total.value() - 1.0) <= 1e-12);
    }
}

TEST_CASE("json round trip") {
    Rng rng(602);
    const auto q = JointTable::random(3, 2, rng);
    const auto q2 = JointTable::from_json(q.to_json());
    CHECK(q2.D() == 3);
    CHECK(q2.S() == 2);
    CHECK(q2.probs() == q.probs());

    const auto path = std::filesystem::temp_directory_path() / "mdsampler_table_test.json";
    q.save(path.string());
    const auto q3 = JointTable::load(path.string());
    CHECK(q3.probs() == q.probs());
    std::filesystem::remove(path);
}

TEST_CASE("exact conditionals") {
    SUBCASE("no conditioning gives the marginal") {
        const JointTable q(2, 2, {0.4, 0.1, 0.2, 0.3});
        const auto state = cts::MaskState::all_masked(2);
        const auto m0 = oracle::conditional(q, 0, state);
        CHECK(m0[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(m0[1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("independence: conditioning a product changes nothing") {
        const auto q = product_table({0.3, 0.7}, {0.1, 0.9});
        for (int x0 : {0, 1}) {
            cts::MaskState state = cts::MaskState::all_masked(2);
            state.commit(0, x0);
            const auto c = oracle::conditional(q, 1, state);
            CHECK(c[0] == doctest::Approx(0.1).epsilon(1e-12));
            CHECK(c[1] == doctest::Approx(0.9).epsilon(1e-12));
        }
    }
    SUBCASE("hand-summed table") {
        const JointTable q(2, 2, {0.4, 0.1, 0.2, 0.3});
        cts::MaskState state = cts::MaskState::all_masked(2);
        state.commit(0, 0);
        const auto c = oracle::conditional(q, 1, state);
        CHECK(c[0] == doctest::Approx(0.8).epsilon(1e-12));
        CHECK(c[1] == doctest::Approx(0.2).epsilon(1e-12));
    }
    SUBCASE("zero-probability conditioning event") {
        const JointTable q(2, 2, {0.5, 0.5, 0.0, 0.0});
        cts::MaskState state = cts::MaskState::all_masked(2);
        state.commit(0, 1);
        CHECK_THROWS_AS(oracle::conditional(q, 1, state), ConditioningError);
    }
    SUBCASE("query position must be masked") {
        const JointTable q(2, 2, {0.4, 0.1, 0.2, 0.3});
        cts::MaskState state = cts::MaskState::all_masked(2);
        state.commit(0, 0);
        CHECK_THROWS_AS(oracle::conditional(q, 0, state), ArgumentError);
    }
}

TEST_CASE("subset weights") {
    CHECK(oracle::phi_weight(0, 0) == doctest::Approx(1.0));
    CHECK(oracle::phi_weight(2, 0) == doctest::Approx(1.0 / 3.0));
    CHECK(oracle::phi_weight(2, 1) == doctest::Approx(1.0 / 6.0));
    CHECK(oracle::phi_weight(2, 2) == doctest::Approx(1.0 / 3.0));
    CHECK(oracle::phi_weight(3, 1) == doctest::Approx(1.0 / 12.0));
    CHECK_THROWS_AS(oracle::phi_weight(2, 3), ArgumentError);
    for (int parent = 0; parent <= 8; ++parent) {
        std::vector<int> set;
        for (int i = 0; i < parent; ++i) set.push_back(i);
        double total = 0.0;
        for (const auto& [subset, w] : oracle::phi_subsets(set)) {
            (void)subset;
            total += w;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("kl divergence") {
    const std::vector<double> p = {0.5, 0.5};
    CHECK(oracle::kl_divergence(p, p).nats == 0.0);
    const std::vector<double> onehot = {1.0, 0.0};
    CHECK(oracle::kl_divergence(onehot, p).nats == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    const auto bad = oracle::kl_divergence(p, onehot);
    CHECK(bad.infinite);
    CHECK(std::isinf(bad.nats));
}

TEST_CASE("kl ledger") {
    SUBCASE("product joints have no first-stage gap") {
        const auto q = product_table({0.3, 0.7}, {0.6, 0.4});
        const auto terms = oracle::kl_decomposition_terms(q, {0, 1});
        CHECK(terms.chain_rhs1 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(terms.term_a == doctest::Approx(terms.term_b).epsilon(1e-12));
        CHECK(terms.chain_lhs ==
              doctest::Approx(terms.chain_rhs1 + terms.chain_rhs2).epsilon(1e-12));
    }
    SUBCASE("chain rule and upper bound on random joints") {
        for (int trial = 0; trial < 10; ++trial) {
            Rng rng(700 + static_cast<uint64_t>(trial));
            const auto q = JointTable::random(4, 2, rng);
            for (const std::vector<int>& I :
                 {std::vector<int>{0, 2}, std::vector<int>{1, 3}, std::vector<int>{0, 1, 2}}) {
                const auto t = oracle::kl_decomposition_terms(q, I);
                CHECK(std::abs(t.chain_lhs - (t.chain_rhs1 + t.chain_rhs2)) < 1e-10);
                CHECK(t.chain_lhs <= t.term_a - t.term_b + t.term_c + 1e-10);
                CHECK(std::abs(t.term_b - oracle::kl_term_b_phi(q, I)) < 1e-10);
                // the permutation average of the entropy chain is the subset entropy
                CHECK(std::abs(t.term_b - oracle::subset_entropy(q, I)) < 1e-10);
            }
        }
    }
    SUBCASE("empty and full index sets degenerate cleanly") {
        Rng rng(711);
        const auto q = JointTable::random(3, 2, rng);
        const auto none = oracle::kl_decomposition_terms(q, {});
        CHECK(none.chain_rhs1 == 0.0);
        CHECK(none.term_a == 0.0);
        const auto all = oracle::kl_decomposition_terms(q, {0, 1, 2});
        CHECK(all.chain_rhs2 == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(all.term_c == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("exact chain law") {
    SUBCASE("single position returns the marginal") {
        const JointTable q(1, 3, {0.2, 0.5, 0.3});
        const auto law = oracle::exact_cts_distribution(q, uniform_kernel, 1.0);
        CHECK(metrics::tv_exact(law, q.probs()) < 1e-15);
    }
    SUBCASE("unit exponent reproduces the joint, square exponent does not") {
        Rng rng(720);
        const auto q = JointTable::random(3, 2, rng);
        const auto unbiased = oracle::exact_cts_distribution(q, uniform_kernel, 1.0);
        CHECK(metrics::tv_exact(unbiased, q.probs()) <= 1e-10);
        const auto biased = oracle::exact_cts_distribution(q, uniform_kernel, 2.0);
        CHECK(metrics::tv_exact(biased, q.probs()) > 0.01);
    }
    SUBCASE("kernel validation") {
        const JointTable q(2, 2, {0.4, 0.1, 0.2, 0.3});
        const oracle::PolicyKernel bad_size = [](const cts::MaskState&) {
            return std::vector<double>{1.0};
        };
        CHECK_THROWS_AS(oracle::exact_cts_distribution(q, bad_size, 1.0), ArgumentError);
        const oracle::PolicyKernel bad_mass = [](const cts::MaskState& s) {
            return std::vector<double>(s.masked_positions().size(), 0.9);
        };
        CHECK_THROWS_AS(oracle::exact_cts_distribution(q, bad_mass, 1.0), ArgumentError);
    }
    SUBCASE("path guard") {
        Rng rng(721);
        const auto q = JointTable::random(10, 3, rng);
        CHECK_THROWS_AS(oracle::exact_cts_distribution(q, uniform_kernel, 1.0), CapacityError);
    }
}

TEST_CASE("table-backed product model") {
    Rng rng(730);
    const auto q = JointTable::random(3, 2, rng);
    const oracle::TableModel model(q);
    CHECK(model.length() == 3);
    CHECK(model.alphabet() == 2);
    const auto state = cts::MaskState::all_masked(3);
    const auto conds = model.conditionals(state);
    CHECK(conds.size() == 3);
    for (const auto& [pos, c] : conds) {
        (void)pos;
        double total = 0.0;
        for (int s = 0; s < 2; ++s) total += c[s];
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

}  // TEST_SUITE

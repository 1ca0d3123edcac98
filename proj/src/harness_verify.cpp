// Property suites behind `mdsampler verify`. Each check exercises one
// documented invariant of a module at full strength; the unit tests cover
// the same ground at op level, this is the runnable end-to-end ledger.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <sstream>

#include "mdsampler/cts.hpp"
#include "mdsampler/gumbel.hpp"
#include "mdsampler/harness.hpp"
#include "mdsampler/metrics.hpp"
#include "mdsampler/nanoformer.hpp"
#include "mdsampler/oracle.hpp"
#include "mdsampler/policies.hpp"
#include "mdsampler/rounds.hpp"
#include "mdsampler/schedules.hpp"

namespace mdsampler::harness {

namespace {

dist::Categorical random_categorical(Rng& rng, int size, double min_mass = 0.01) {
    std::vector<double> w(static_cast<size_t>(size));
    for (double& v : w) v = min_mass + uniform01(rng);
    return dist::Categorical::from_weights(std::move(w));
}

std::vector<dist::Categorical> random_family(Rng& rng, int n, int size) {
    std::vector<dist::Categorical> ps;
    ps.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ps.push_back(random_categorical(rng, size));
    return ps;
}

struct Checker {
    std::vector<CheckResult> results;

    void check(const std::string& name, bool pass, const std::string& detail = "") {
        results.push_back({name, pass, detail});
    }
    template <typename Fn>
    void run(const std::string& name, Fn&& fn) {
        try {
            fn(*this, name);
        } catch (const std::exception& e) {
            results.push_back({name, false, std::string("exception: ") + e.what()});
        }
    }
};

std::string num(double v) { return format_double(v); }

// ---------------------------------------------------------------- dist ----

std::vector<CheckResult> suite_dist(uint64_t seed) {
    Checker c;
    Rng rng = substream_rng(seed, "verify/dist", 0);

    c.run("temper composes multiplicatively", [&](Checker& ch, const std::string& name) {
        double worst = 0.0;
        const double pairs[3][2] = {{2.0, 3.0}, {0.5, 4.0}, {1.7, 1.3}};
        for (int trial = 0; trial < 50; ++trial) {
            const auto p = random_categorical(rng, 2 + static_cast<int>(uniform01(rng) * 7));
            for (const auto& ab : pairs) {
                const auto lhs = dist::temper(dist::temper(p, ab[0]), ab[1]);
                const auto rhs = dist::temper(p, ab[0] * ab[1]);
                for (int i = 0; i < p.size(); ++i) worst = std::max(worst, std::abs(lhs[i] - rhs[i]));
            }
        }
        ch.check(name, worst < 1e-9, "max elementwise gap " + num(worst));
    });

    c.run("power sum never drops below the uniform floor", [&](Checker& ch, const std::string& name) {
        bool ok = true;
        double worst_margin = 1e300;
        for (double alpha : {1.0, 3.0, 12.0}) {
            const double beta = dist::beta_from_alpha(alpha);
            for (int trial = 0; trial < 1000; ++trial) {
                const int s = 2 + static_cast<int>(uniform01(rng) * 15);
                const auto p = random_categorical(rng, s, 0.0);
                const double floor = std::pow(static_cast<double>(s), 1.0 - beta);
                const double v = dist::power_sum(p, beta);
                worst_margin = std::min(worst_margin, v - floor);
                if (v < floor - 1e-12) ok = false;
            }
        }
        ch.check(name, ok, "worst margin " + num(worst_margin));
    });

    c.run("sharper exponents never raise entropy", [&](Checker& ch, const std::string& name) {
        bool ok = true;
        for (int trial = 0; trial < 200; ++trial) {
            const auto p = random_categorical(rng, 2 + static_cast<int>(uniform01(rng) * 10));
            double prev = dist::entropy(dist::temper(p, 1.0));
            for (double g : {2.0, 4.0, 8.0}) {
                const double h = dist::entropy(dist::temper(p, g));
                if (h > prev + 1e-12) ok = false;
                prev = h;
            }
        }
        ch.check(name, ok);
    });

    return c.results;
}

// -------------------------------------------------------------- gumbel ----

std::map<std::vector<int>, double> all_prefix_pmf(std::span<const double> mu, int k) {
    std::map<std::vector<int>, double> out;
    std::vector<int> prefix;
    const int n = static_cast<int>(mu.size());
    const std::function<void()> rec = [&]() {
        if (static_cast<int>(prefix.size()) == k) {
            out[prefix] = gumbel::top_k_prefix_pmf(mu, prefix);
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (std::find(prefix.begin(), prefix.end(), i) == prefix.end()) {
                prefix.push_back(i);
                rec();
                prefix.pop_back();
            }
        }
    };
    rec();
    return out;
}

std::vector<CheckResult> suite_gumbel(uint64_t seed) {
    Checker c;

    c.run("top-k frequencies match the sequential closed form", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/gumbel/topk", 0);
        std::vector<double> mu(5);
        for (double& m : mu) m = 2.0 * uniform01(rng) - 1.0;
        const auto exact = all_prefix_pmf(mu, 3);
        metrics::EmpiricalPmf<std::vector<int>> emp;
        for (int d = 0; d < 1000000; ++d) {
            emp.add(gumbel::gumbel_top_k(mu, 3, 1.0, rng).indices);
        }
        const double tv = metrics::tv_empirical(emp, exact);
        ch.check(name, tv < 0.01, "tv " + num(tv) + " at 1e6 draws");
    });

    c.run("prefix pmf and selection are shift invariant", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/gumbel/shift", 0);
        bool ok = true;
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> mu(6);
            for (double& m : mu) m = 3.0 * uniform01(rng);
            std::vector<double> shifted(mu);
            const double cshift = 10.0 * uniform01(rng) - 5.0;
            for (double& m : shifted) m += cshift;
            const std::vector<int> prefix = {2, 0, 4};
            worst = std::max(worst, std::abs(gumbel::top_k_prefix_pmf(mu, prefix) -
                                             gumbel::top_k_prefix_pmf(shifted, prefix)));
            const uint64_t s = rng();
            Rng r1(s), r2(s);
            if (gumbel::gumbel_top_k(mu, 4, 1.0, r1).indices !=
                gumbel::gumbel_top_k(shifted, 4, 1.0, r2).indices) {
                ok = false;
            }
        }
        ch.check(name, ok && worst < 1e-12, "max pmf gap " + num(worst));
    });

    c.run("temperature equals pre-scaled logits in law", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/gumbel/temp", 0);
        const double tau = 2.5;
        std::vector<double> mu(4);
        for (double& m : mu) m = 2.0 * uniform01(rng) - 1.0;
        std::vector<double> scaled(mu);
        for (double& m : scaled) m /= tau;
        const auto exact = all_prefix_pmf(scaled, 2);
        metrics::EmpiricalPmf<std::vector<int>> emp;
        for (int d = 0; d < 400000; ++d) {
            emp.add(gumbel::gumbel_top_k(mu, 2, tau, rng).indices);
        }
        const double tv = metrics::tv_empirical(emp, exact);
        ch.check(name, tv < 0.01, "tv " + num(tv));
    });

    return c.results;
}

// -------------------------------------------------------------- rounds ----

std::vector<CheckResult> suite_rounds(uint64_t seed) {
    Checker c;

    c.run("exact sampler gap stays within the bound", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/rounds/bound", 0);
        bool ok = true;
        std::string detail;
        const int cases[3][4] = {{4, 1, 2, 1}, {6, 2, 3, 1}, {5, 2, 2, 3}};
        for (const auto& cs : cases) {
            const auto ps = random_family(rng, cs[0], cs[2]);
            const double alpha = cs[3];
            const double beta = dist::beta_from_alpha(alpha);
            const auto mg = rounds::maskgit_round_exact_pmf(ps, cs[1], alpha);
            const auto mm = rounds::moment_round_exact_pmf(ps, cs[1], alpha, beta);
            const double tv = metrics::tv_exact(mg, mm);
            const double bound = std::min(1.0, rounds::tv_theorem_bound(cs[0], cs[1], cs[2], alpha));
            detail += "tv=" + num(tv) + "<=bound=" + num(bound) + " ";
            if (tv > bound + 1e-12) ok = false;
        }
        ch.check(name, ok, detail);
    });

    c.run("exact sampler gap shrinks as positions grow", [&](Checker& ch, const std::string& name) {
        std::vector<dist::Categorical> family;
        for (int i = 0; i < 16; ++i) {
            Rng rng = substream_rng(seed, "verify/rounds/family", static_cast<uint64_t>(i));
            family.push_back(random_categorical(rng, 2));
        }
        std::string detail;
        double prev = 2.0;
        bool ok = true;
        for (int N : {4, 8, 12, 16}) {
            std::span<const dist::Categorical> ps(family.data(), static_cast<size_t>(N));
            const auto mg = rounds::maskgit_round_exact_pmf(ps, 1, 1.0);
            const auto mm = rounds::moment_round_exact_pmf(ps, 1, 1.0, 2.0);
            const double tv = metrics::tv_exact(mg, mm);
            detail += "N=" + std::to_string(N) + ":" + num(tv) + " ";
            if (tv >= prev) ok = false;
            prev = tv;
        }
        ch.check(name, ok, detail);
    });

    c.run("selecting every position keeps the product law", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/rounds/full", 0);
        const auto ps = random_family(rng, 3, 2);
        const auto pmf = rounds::maskgit_round_exact_pmf(ps, 3, 1.5);
        const auto unordered = rounds::marginalize_order(pmf);
        double worst = 0.0;
        for (const auto& [key, p] : unordered) {
            double prod = 1.0;
            for (size_t l = 0; l < key.indices.size(); ++l) {
                prod *= ps[static_cast<size_t>(key.indices[l])][key.tokens[l]];
            }
            worst = std::max(worst, std::abs(p - prod));
        }
        ch.check(name, worst < 1e-10, "max gap " + num(worst));
    });

    c.run("unit exponent keeps token marginals exact", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/rounds/unbiased", 0);
        const auto ps = random_family(rng, 5, 3);
        const auto pmf = rounds::moment_round_exact_pmf(ps, 2, 1.0, 1.0);
        std::vector<std::vector<double>> marg(5, std::vector<double>(3, 0.0));
        for (const auto& [key, p] : pmf) {
            for (size_t l = 0; l < key.indices.size(); ++l) {
                marg[static_cast<size_t>(key.indices[l])][static_cast<size_t>(key.tokens[l])] += p;
            }
        }
        // Token mass at i must factor as P(i selected) * p_i.
        double worst = 0.0;
        for (int i = 0; i < 5; ++i) {
            double sel_i = 0.0;
            for (int s = 0; s < 3; ++s) sel_i += marg[static_cast<size_t>(i)][static_cast<size_t>(s)];
            for (int s = 0; s < 3; ++s) {
                worst = std::max(worst, std::abs(marg[static_cast<size_t>(i)][static_cast<size_t>(s)] -
                                                 sel_i * ps[static_cast<size_t>(i)][s]));
            }
        }
        ch.check(name, worst < 1e-12, "max gap " + num(worst));
    });

    c.run("samplers match their exact pmfs empirically", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/rounds/mc", 0);
        const auto ps_mg = random_family(rng, 4, 2);
        const auto exact_mg = rounds::maskgit_round_exact_pmf(ps_mg, 1, 1.0);
        metrics::EmpiricalPmf<rounds::RoundKey> emp_mg;
        for (int d = 0; d < 1000000; ++d) {
            auto o = rounds::maskgit_round(ps_mg, 1, 1.0, rng);
            emp_mg.add(rounds::RoundKey{std::move(o.indices), std::move(o.tokens)});
        }
        const double tv_mg = metrics::tv_empirical(emp_mg, exact_mg);

        const auto ps_mm = random_family(rng, 6, 3);
        const auto exact_mm = rounds::moment_round_exact_pmf(ps_mm, 2, 1.0, 2.0);
        metrics::EmpiricalPmf<rounds::RoundKey> emp_mm;
        for (int d = 0; d < 1000000; ++d) {
            auto o = rounds::moment_round(ps_mm, 2, 1.0, 2.0, rng);
            emp_mm.add(rounds::RoundKey{std::move(o.indices), std::move(o.tokens)});
        }
        const double tv_mm = metrics::tv_empirical(emp_mm, exact_mm);
        ch.check(name, tv_mg < 0.01 && tv_mm < 0.01,
                 "sample-then-choose tv " + num(tv_mg) + ", choose-then-sample tv " + num(tv_mm));
    });

    return c.results;
}

// ----------------------------------------------------------- schedules ----

std::vector<CheckResult> suite_schedules(uint64_t seed) {
    (void)seed;
    Checker c;

    c.run("cumulative counts are monotone with exact endpoints", [&](Checker& ch, const std::string& name) {
        bool ok = true;
        for (auto kind : {schedules::Kind::uniform, schedules::Kind::cosine}) {
            for (int D : {1, 5, 10, 32, 100, 1024}) {
                for (int N : {1, std::max(1, D / 4), D}) {
                    const auto s = schedules::unmask_counts(kind, D, N);
                    if (s.cumulative.front() != 0 || s.cumulative.back() != D) ok = false;
                    for (int n = 1; n <= N; ++n) {
                        if (s.step_size(n) < 0) ok = false;
                    }
                }
            }
        }
        ch.check(name, ok);
    });

    c.run("half-step counts interleave the schedule", [&](Checker& ch, const std::string& name) {
        bool ok = true;
        for (auto kind : {schedules::Kind::uniform, schedules::Kind::cosine}) {
            for (int D : {5, 10, 32, 100}) {
                for (int N : {1, std::max(1, D / 4), D}) {
                    const auto s = schedules::unmask_counts(kind, D, N);
                    const auto half = schedules::half_step_counts(s);
                    for (int n = 1; n <= N; ++n) {
                        if (half[static_cast<size_t>(n - 1)] < s.cumulative[static_cast<size_t>(n - 1)] ||
                            half[static_cast<size_t>(n - 1)] > s.cumulative[static_cast<size_t>(n)]) {
                            ok = false;
                        }
                    }
                }
            }
        }
        ch.check(name, ok);
    });

    c.run("noise temperature decays affinely to zero", [&](Checker& ch, const std::string& name) {
        bool ok = true;
        const double alpha = 6.0;
        const int N = 8;
        double prev = alpha;
        for (int n = 1; n <= N; ++n) {
            const double t = schedules::gumbel_temp(alpha, n, N);
            const double expected = alpha * (1.0 - static_cast<double>(n) / N);
            if (std::abs(t - expected) > 1e-12 || t >= prev) ok = false;
            prev = t;
        }
        if (schedules::gumbel_temp(alpha, N, N) != 0.0) ok = false;
        ch.check(name, ok);
    });

    return c.results;
}

// ------------------------------------------------------------ policies ----

std::vector<CheckResult> suite_policies(uint64_t seed) {
    Checker c;

    c.run("every policy returns a permutation of the masked set", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/policies/perm", 0);
        bool ok = true;
        for (int trial = 0; trial < 25; ++trial) {
            const int D = 6 + static_cast<int>(uniform01(rng) * 6);
            std::vector<int> masked;
            policies::PositionProbs conds;
            for (int i = 0; i < D; ++i) {
                if (uniform01(rng) < 0.7) {
                    masked.push_back(i);
                    conds.emplace_back(i, random_categorical(rng, 4));
                }
            }
            if (masked.empty()) continue;
            std::vector<policies::Ordering> outs;
            outs.push_back(policies::order_random(masked, rng));
            outs.push_back(policies::order_confidence(conds, rng));
            outs.push_back(policies::order_moment(conds, 2.0, rng));
            outs.push_back(policies::order_halton_1d(D, masked));
            for (auto& o : outs) {
                auto sorted = o.positions;
                std::sort(sorted.begin(), sorted.end());
                if (sorted != masked) ok = false;
            }
        }
        ch.check(name, ok);
    });

    c.run("merging an ordering with itself is the identity", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/policies/merge", 0);
        bool ok = true;
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<int> base(8);
            std::iota(base.begin(), base.end(), 0);
            const auto o = policies::order_random(base, rng);
            for (int m = 0; m <= 4; ++m) {
                const auto merged = policies::merge_orderings(o, o, 4, m);
                if (merged.positions != o.positions) ok = false;
            }
        }
        ch.check(name, ok);
    });

    c.run("power-of-two low-discrepancy order is bit reversal", [&](Checker& ch, const std::string& name) {
        const int bits = 4;
        const int D = 1 << bits;
        std::vector<int> masked(static_cast<size_t>(D));
        std::iota(masked.begin(), masked.end(), 0);
        const auto o = policies::order_halton_1d(D, masked);
        bool ok = true;
        for (int t = 0; t < D; ++t) {
            int rev = 0;
            for (int b = 0; b < bits; ++b) {
                if (t & (1 << b)) rev |= 1 << (bits - 1 - b);
            }
            if (o.positions[static_cast<size_t>(t)] != rev) ok = false;
        }
        ch.check(name, ok);
    });

    c.run("2d low-discrepancy order covers the grid once", [&](Checker& ch, const std::string& name) {
        const int rows = 3, cols = 4;
        std::vector<int> masked(static_cast<size_t>(rows * cols));
        std::iota(masked.begin(), masked.end(), 0);
        const auto o = policies::order_halton_2d(rows, cols, masked);
        auto sorted = o.positions;
        std::sort(sorted.begin(), sorted.end());
        ch.check(name, sorted == masked && o.positions.front() == 0,
                 "first cell " + std::to_string(o.positions.front()));
    });

    return c.results;
}

// ----------------------------------------------------------------- cts ----

std::vector<CheckResult> suite_cts(uint64_t seed) {
    Checker c;

    c.run("identical seeds give identical traces", [&](Checker& ch, const std::string& name) {
        Rng table_rng = substream_rng(seed, "verify/cts/table", 0);
        const oracle::JointTable q = oracle::JointTable::random(3, 2, table_rng);
        const oracle::TableModel model(q);
        const auto schedule = schedules::unmask_counts(schedules::Kind::uniform, 3, 3);
        bool ok = true;
        for (int trial = 0; trial < 5; ++trial) {
            Rng r1 = substream_rng(seed, "verify/cts/det", static_cast<uint64_t>(trial));
            Rng r2 = substream_rng(seed, "verify/cts/det", static_cast<uint64_t>(trial));
            cts::RandomPolicy p1, p2;
            const auto t1 = cts::run_cts(model, p1, schedule, cts::GammaSchedule::constant(1.0), r1);
            const auto t2 = cts::run_cts(model, p2, schedule, cts::GammaSchedule::constant(1.0), r2);
            if (t1.sequence != t2.sequence) ok = false;
            Rng r3 = substream_rng(seed, "verify/cts/det-mg", static_cast<uint64_t>(trial));
            Rng r4 = substream_rng(seed, "verify/cts/det-mg", static_cast<uint64_t>(trial));
            if (cts::run_maskgit_chain(model, schedule, 2.0, r3).sequence !=
                cts::run_maskgit_chain(model, schedule, 2.0, r4).sequence) {
                ok = false;
            }
        }
        ch.check(name, ok);
    });

    c.run("one-by-one chain with exact conditionals is exact", [&](Checker& ch, const std::string& name) {
        double worst = 0.0;
        for (int trial = 0; trial < 4; ++trial) {
            Rng rng = substream_rng(seed, "verify/cts/exact", static_cast<uint64_t>(trial));
            const int D = trial < 2 ? 3 : 4;
            const oracle::JointTable q = oracle::JointTable::random(D, 2, rng);
            const auto uniform_kernel = [](const cts::MaskState& s) {
                const size_t m = s.masked_positions().size();
                return std::vector<double>(m, 1.0 / static_cast<double>(m));
            };
            const auto state_kernel = [](const cts::MaskState& s) {
                const auto masked = s.masked_positions();
                int committed = 0;
                for (int t : s.tokens) committed += t > 0 ? t : 0;
                std::vector<double> w(masked.size());
                double total = 0.0;
                for (size_t l = 0; l < masked.size(); ++l) {
                    w[l] = 1.0 + masked[l] + committed;
                    total += w[l];
                }
                for (double& v : w) v /= total;
                return w;
            };
            for (const auto& kernel : {oracle::PolicyKernel(uniform_kernel), oracle::PolicyKernel(state_kernel)}) {
                const auto law = oracle::exact_cts_distribution(q, kernel, 1.0);
                worst = std::max(worst, metrics::tv_exact(law, q.probs()));
            }
        }
        ch.check(name, worst <= 1e-10, "worst tv " + num(worst));
    });

    c.run("traces unmask every position exactly once", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/cts/coverage", 0);
        nanoformer::Hyperparams hp;
        hp.layers = 2;
        hp.d_model = 16;
        hp.d_k = 8;
        hp.d_ff = 32;
        hp.vocab = 6;
        hp.seq_len = 12;
        const nanoformer::Model model(nanoformer::init_params(7, hp));
        const auto schedule = schedules::unmask_counts(schedules::Kind::cosine, 12, 5);
        bool ok = true;
        for (const std::string pname : {"random", "confidence", "moment", "halton", "hybrid"}) {
            std::unique_ptr<cts::Policy> policy;
            if (pname == "random") policy = std::make_unique<cts::RandomPolicy>();
            else if (pname == "confidence") policy = std::make_unique<cts::ConfidencePolicy>();
            else if (pname == "moment") policy = std::make_unique<cts::MomentPolicy>();
            else if (pname == "halton") policy = std::make_unique<cts::Halton1dPolicy>();
            else policy = std::make_unique<cts::HybridPolicy>(std::make_unique<cts::Halton1dPolicy>(),
                                                              std::make_unique<cts::MomentPolicy>());
            const auto trace = cts::run_cts(model, *policy, schedule, cts::GammaSchedule::constant(2.0), rng);
            std::vector<int> seen(12, 0);
            for (const auto& r : trace.rounds) {
                for (int pos : r.indices) seen[static_cast<size_t>(pos)] += 1;
            }
            for (int v : seen) {
                if (v != 1) ok = false;
            }
            for (int t : trace.sequence) {
                if (t < 0) ok = false;
            }
        }
        ch.check(name, ok);
    });

    c.run("inert cache split reproduces the plain driver", [&](Checker& ch, const std::string& name) {
        nanoformer::Hyperparams hp;
        hp.layers = 2;
        hp.d_model = 16;
        hp.d_k = 8;
        hp.d_ff = 32;
        hp.vocab = 6;
        hp.seq_len = 10;
        const nanoformer::Model model(nanoformer::init_params(11, hp));
        const auto schedule = schedules::unmask_counts(schedules::Kind::uniform, 10, 4);
        bool ok = true;
        for (int trial = 0; trial < 3; ++trial) {
            Rng r1 = substream_rng(seed, "verify/cts/inert", static_cast<uint64_t>(trial));
            Rng r2 = substream_rng(seed, "verify/cts/inert", static_cast<uint64_t>(trial));
            cts::MomentPolicy p1, p2;
            cts::CacheSplit split;
            split.mode = cts::CacheSplit::Mode::none;
            const auto plain = cts::run_cts(model, p1, schedule, cts::GammaSchedule::constant(2.0), r1);
            const auto cached = cts::run_cts_cached(model, p2, schedule, cts::GammaSchedule::constant(2.0),
                                                    r2, split);
            if (plain.sequence != cached.sequence) ok = false;
            for (size_t n = 0; n < plain.rounds.size(); ++n) {
                if (plain.rounds[n].indices != cached.rounds[n].indices ||
                    plain.rounds[n].tokens != cached.rounds[n].tokens) {
                    ok = false;
                }
            }
        }
        ch.check(name, ok);
    });

    return c.results;
}

// -------------------------------------------------------------- oracle ----

std::vector<CheckResult> suite_oracle(uint64_t seed) {
    Checker c;

    c.run("conditionals renormalize exactly", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/oracle/cond", 0);
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const oracle::JointTable q = oracle::JointTable::random(4, 3, rng);
            cts::MaskState state = cts::MaskState::all_masked(4);
            state.commit(1, static_cast<int>(uniform01(rng) * 3));
            for (int i : {0, 2, 3}) {
                const auto cond = oracle::conditional(q, i, state);
                double total = 0.0;
                for (int s = 0; s < 3; ++s) total += cond[s];
                worst = std::max(worst, std::abs(total - 1.0));
            }
        }
        ch.check(name, worst < 1e-12, "max |sum-1| " + num(worst));
    });

    c.run("subset weights sum to one", [&](Checker& ch, const std::string& name) {
        double worst = 0.0;
        for (int parent = 0; parent <= 8; ++parent) {
            std::vector<int> set(static_cast<size_t>(parent));
            std::iota(set.begin(), set.end(), 0);
            double total = 0.0;
            for (const auto& [subset, w] : oracle::phi_subsets(set)) {
                (void)subset;
                total += w;
            }
            worst = std::max(worst, std::abs(total - 1.0));
        }
        ch.check(name, worst < 1e-12, "max |sum-1| " + num(worst));
    });

    c.run("entropy chain rule holds for every ordering", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/oracle/chain", 0);
        const oracle::JointTable q = oracle::JointTable::random(4, 2, rng);
        double worst = 0.0;
        for (uint32_t mask = 1; mask < 16; ++mask) {
            std::vector<int> I;
            for (int i = 0; i < 4; ++i) {
                if (mask & (1u << i)) I.push_back(i);
            }
            const double h = oracle::subset_entropy(q, I);
            std::vector<int> perm(I);
            std::sort(perm.begin(), perm.end());
            do {
                double chain = 0.0;
                std::vector<int> prefix;
                for (int i : perm) {
                    std::vector<int> sorted(prefix);
                    std::sort(sorted.begin(), sorted.end());
                    chain += oracle::expected_conditional_entropy(q, i, sorted);
                    prefix.push_back(i);
                }
                worst = std::max(worst, std::abs(chain - h));
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        ch.check(name, worst < 1e-10, "max gap " + num(worst));
    });

    c.run("uniform one-by-one law equals the table", [&](Checker& ch, const std::string& name) {
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            Rng rng = substream_rng(seed, "verify/oracle/unbiased", static_cast<uint64_t>(trial));
            const oracle::JointTable q = oracle::JointTable::random(3, 2, rng);
            const auto kernel = [](const cts::MaskState& s) {
                const size_t m = s.masked_positions().size();
                return std::vector<double>(m, 1.0 / static_cast<double>(m));
            };
            const auto law = oracle::exact_cts_distribution(q, kernel, 1.0);
            worst = std::max(worst, metrics::tv_exact(law, q.probs()));
        }
        ch.check(name, worst <= 1e-10, "worst tv " + num(worst));
    });

    return c.results;
}

// ---------------------------------------------------------- nanoformer ----

std::vector<CheckResult> suite_nanoformer(uint64_t seed) {
    Checker c;

    const auto random_state = [](Rng& rng, int D, int vocab, int min_masked) {
        cts::MaskState state = cts::MaskState::all_masked(D);
        std::vector<int> all(static_cast<size_t>(D));
        std::iota(all.begin(), all.end(), 0);
        const auto perm = policies::order_random(all, rng);
        const int commit = static_cast<int>(uniform01(rng) * (D - min_masked));
        for (int l = 0; l < commit; ++l) {
            state.commit(perm.positions[static_cast<size_t>(l)], static_cast<int>(uniform01(rng) * vocab));
        }
        return state;
    };

    c.run("refresh with nothing committed changes nothing", [&](Checker& ch, const std::string& name) {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            Rng rng = substream_rng(seed, "verify/nano/inert", static_cast<uint64_t>(trial));
            nanoformer::Hyperparams hp;
            hp.layers = 1 + trial % 3;
            hp.d_model = 16;
            hp.d_k = 8;
            hp.d_ff = 32;
            hp.vocab = 5;
            hp.seq_len = 10;
            const auto params = nanoformer::init_params(rng(), hp);
            const auto state = random_state(rng, hp.seq_len, hp.vocab, 3);
            const auto masked = state.masked_positions();
            std::vector<int> I(masked.begin(), masked.begin() + std::min<size_t>(4, masked.size()));
            const auto full = nanoformer::full_forward(params, state);
            const auto part = nanoformer::partial_forward(params, full.cache, state, I, {});
            for (size_t b = 0; b < part.positions.size(); ++b) {
                for (int x = 0; x < hp.vocab; ++x) {
                    worst = std::max(worst,
                                     std::abs(part.logits[b][static_cast<size_t>(x)] -
                                              full.logits[static_cast<size_t>(part.positions[b])]
                                                         [static_cast<size_t>(x)]));
                }
            }
        }
        ch.check(name, worst <= 1e-12, "max logit gap " + num(worst));
    });

    c.run("single-layer refresh matches a fresh forward", [&](Checker& ch, const std::string& name) {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            Rng rng = substream_rng(seed, "verify/nano/layer1", static_cast<uint64_t>(trial));
            nanoformer::Hyperparams hp;
            hp.layers = 1;
            hp.d_model = 16;
            hp.d_k = 8;
            hp.d_ff = 32;
            hp.vocab = 5;
            hp.seq_len = 10;
            const auto params = nanoformer::init_params(rng(), hp);
            const auto state = random_state(rng, hp.seq_len, hp.vocab, 4);
            const auto masked = state.masked_positions();
            std::vector<int> I(masked.begin(), masked.begin() + std::min<size_t>(4, masked.size()));
            std::vector<std::pair<int, int>> a_tokens;
            for (size_t l = 0; l + 1 < I.size(); l += 2) {
                a_tokens.emplace_back(I[l], static_cast<int>(uniform01(rng) * hp.vocab));
            }
            const auto full = nanoformer::full_forward(params, state);
            const auto part = nanoformer::partial_forward(params, full.cache, state, I, a_tokens);
            cts::MaskState committed = state;
            for (const auto& [pos, tok] : a_tokens) committed.commit(pos, tok);
            const auto fresh = nanoformer::full_forward(params, committed);
            for (size_t b = 0; b < part.positions.size(); ++b) {
                for (int x = 0; x < hp.vocab; ++x) {
                    worst = std::max(worst,
                                     std::abs(part.logits[b][static_cast<size_t>(x)] -
                                              fresh.logits[static_cast<size_t>(part.positions[b])]
                                                          [static_cast<size_t>(x)]));
                }
            }
        }
        ch.check(name, worst <= 1e-12, "max logit gap " + num(worst));
    });

    c.run("attention cost scales exactly with the query set", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/nano/flops", 0);
        nanoformer::Hyperparams hp;
        hp.layers = 3;
        hp.d_model = 16;
        hp.d_k = 8;
        hp.d_ff = 32;
        hp.vocab = 5;
        hp.seq_len = 12;
        const auto params = nanoformer::init_params(21, hp);
        const auto state = random_state(rng, hp.seq_len, hp.vocab, 6);
        const auto masked = state.masked_positions();
        std::vector<int> I(masked.begin(), masked.begin() + 3);
        nanoformer::FlopCounter f_full, f_part;
        const auto full = nanoformer::full_forward(params, state, &f_full);
        nanoformer::partial_forward(params, full.cache, state, I, {}, &f_part);
        const bool exact = f_part.attention * static_cast<uint64_t>(hp.seq_len) ==
                           f_full.attention * static_cast<uint64_t>(I.size());
        ch.check(name, exact,
                 "partial " + std::to_string(f_part.attention) + " vs full " +
                     std::to_string(f_full.attention));
    });

    c.run("stale caches are rejected", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/nano/stale", 0);
        nanoformer::Hyperparams hp;
        hp.layers = 2;
        hp.d_model = 16;
        hp.d_k = 8;
        hp.d_ff = 32;
        hp.vocab = 5;
        hp.seq_len = 8;
        const auto params = nanoformer::init_params(3, hp);
        cts::MaskState state = cts::MaskState::all_masked(8);
        const auto full = nanoformer::full_forward(params, state);
        state.commit(0, 1);  // cache now describes a different state
        bool threw = false;
        try {
            nanoformer::partial_forward(params, full.cache, state, {2, 3}, {});
        } catch (const CacheInvalidError&) {
            threw = true;
        }
        (void)rng;
        ch.check(name, threw);
    });

    return c.results;
}

// ------------------------------------------------------------- metrics ----

std::vector<CheckResult> suite_metrics(uint64_t seed) {
    Checker c;

    c.run("total variation behaves like a metric", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/metrics/tv", 0);
        bool ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            const int n = 3 + static_cast<int>(uniform01(rng) * 6);
            const auto a = random_categorical(rng, n).probs();
            const auto b = random_categorical(rng, n).probs();
            const auto d = random_categorical(rng, n).probs();
            const double ab = metrics::tv_exact(a, b);
            const double ba = metrics::tv_exact(b, a);
            const double ad = metrics::tv_exact(a, d);
            const double db = metrics::tv_exact(d, b);
            if (ab != ba) ok = false;
            if (ab > ad + db + 1e-12) ok = false;
            if (metrics::tv_exact(a, a) != 0.0) ok = false;
            if (ab < 1e-12) ok = false;  // distinct random pmfs are never this close
        }
        ch.check(name, ok);
    });

    c.run("sequence entropy ignores order", [&](Checker& ch, const std::string& name) {
        Rng rng = substream_rng(seed, "verify/metrics/perm", 0);
        bool ok = true;
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<int> seq(16);
            for (int& t : seq) t = static_cast<int>(uniform01(rng) * 5);
            const double h = metrics::sequence_entropy(seq);
            auto shuffled = policies::order_random(seq, rng).positions;
            if (std::abs(metrics::sequence_entropy(shuffled) - h) > 1e-12) ok = false;
        }
        ch.check(name, ok);
    });

    c.run("empirical estimate tightens with more draws", [&](Checker& ch, const std::string& name) {
        const int support = 40;
        Rng qrng = substream_rng(seed, "verify/metrics/conv", 0);
        const auto q_probs = random_categorical(qrng, support).probs();
        const auto q = dist::Categorical(q_probs);
        std::map<int, double> q_map;
        for (int i = 0; i < support; ++i) q_map[i] = q_probs[static_cast<size_t>(i)];
        const auto median_tv = [&](long long draws) {
            std::vector<double> tvs;
            for (int rep = 0; rep < 20; ++rep) {
                Rng rng = substream_rng(seed, "verify/metrics/conv/" + std::to_string(draws),
                                        static_cast<uint64_t>(rep));
                metrics::EmpiricalPmf<int> emp;
                for (long long d = 0; d < draws; ++d) emp.add(dist::sample(q, rng));
                tvs.push_back(metrics::tv_empirical(emp, q_map));
            }
            std::sort(tvs.begin(), tvs.end());
            return 0.5 * (tvs[9] + tvs[10]);
        };
        const double m1 = median_tv(10000);
        const double m2 = median_tv(20000);
        ch.check(name, m2 < m1, "median tv " + num(m1) + " -> " + num(m2));
    });

    return c.results;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"dist", "gumbel", "rounds", "schedules", "policies", "cts", "oracle", "nanoformer",
            "metrics"};
}

std::vector<CheckResult> run_suite(const std::string& suite, uint64_t seed) {
    if (suite == "dist") return suite_dist(seed);
    if (suite == "gumbel") return suite_gumbel(seed);
    if (suite == "rounds") return suite_rounds(seed);
    if (suite == "schedules") return suite_schedules(seed);
    if (suite == "policies") return suite_policies(seed);
    if (suite == "cts") return suite_cts(seed);
    if (suite == "oracle") return suite_oracle(seed);
    if (suite == "nanoformer") return suite_nanoformer(seed);
    if (suite == "metrics") return suite_metrics(seed);
    throw ArgumentError("unknown suite: " + suite);
}

int cmd_verify(const std::string& suite_filter, uint64_t seed) {
    std::vector<std::string> suites;
    if (suite_filter.empty() || suite_filter == "all") {
        suites = suite_names();
    } else {
        const auto names = suite_names();
        if (std::find(names.begin(), names.end(), suite_filter) == names.end()) {
            throw ArgumentError("unknown suite: " + suite_filter);
        }
        suites.push_back(suite_filter);
    }

    int failures = 0;
    for (const auto& suite : suites) {
        const auto results = run_suite(suite, seed);
        for (const auto& r : results) {
            std::cout << (r.pass ? "PASS" : "FAIL") << "  " << suite << ": " << r.name;
            if (!r.detail.empty()) std::cout << "  [" << r.detail << "]";
            std::cout << "\n";
            if (!r.pass) ++failures;
        }
    }
    std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace mdsampler::harness

#include "mdsampler/rounds.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mdsampler/gumbel.hpp"

namespace mdsampler::rounds {

double pmf_total_mass(const RoundPmf& pmf) {
    KahanSum acc;
    for (const auto& [key, p] : pmf) {
        (void)key;
        acc.add(p);
    }
    return acc.value();
}

RoundOutcome maskgit_round(std::span<const dist::Categorical> ps, int k, double alpha, Rng& rng) {
    const int n = static_cast<int>(ps.size());
    if (k < 1 || k > n) throw ArgumentError("maskgit_round: k out of range");
    if (!(alpha >= 0.0)) throw ArgumentError("maskgit_round: alpha must be >= 0");

    std::vector<int> tokens(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) tokens[static_cast<size_t>(i)] = dist::sample(ps[static_cast<size_t>(i)], rng);

    std::vector<double> score(static_cast<size_t>(n));
    const bool noise_only = std::isinf(alpha);
    for (int i = 0; i < n; ++i) {
        const double xi = gumbel::sample_gumbel(rng);
        if (noise_only) {
            score[static_cast<size_t>(i)] = xi;
        } else {
            const double lp = std::log(ps[static_cast<size_t>(i)][tokens[static_cast<size_t>(i)]]);
            score[static_cast<size_t>(i)] = lp + alpha * xi;
        }
    }

    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&score](int a, int b) {
        const double sa = score[static_cast<size_t>(a)];
        const double sb = score[static_cast<size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    });

    RoundOutcome out;
    out.indices.assign(order.begin(), order.begin() + k);
    out.tokens.reserve(static_cast<size_t>(k));
    for (int idx : out.indices) out.tokens.push_back(tokens[static_cast<size_t>(idx)]);
    return out;
}

RoundOutcome moment_round(std::span<const dist::Categorical> ps, int k, double alpha, double gamma,
                          Rng& rng) {
    const int n = static_cast<int>(ps.size());
    if (k < 1 || k > n) throw ArgumentError("moment_round: k out of range");
    const double beta = dist::beta_from_alpha(alpha);

    std::vector<double> mu(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) mu[static_cast<size_t>(i)] = dist::log_power_sum(ps[static_cast<size_t>(i)], beta);

    const auto selection = gumbel::gumbel_top_k(mu, k, 1.0, rng);

    RoundOutcome out;
    out.indices = selection.indices;
    out.tokens.reserve(static_cast<size_t>(k));
    for (int idx : out.indices) {
        out.tokens.push_back(dist::sample(dist::temper(ps[static_cast<size_t>(idx)], gamma), rng));
    }
    return out;
}

namespace {

// Enumerate ordered index tuples together with the running denominator
// sum_{i not taken} powsum[i], emitting the index-selection probability of
// each complete tuple into `emit`.
template <typename Emit>
void enumerate_index_tuples(const std::vector<double>& powsum, int k, std::vector<int>& prefix,
                            std::vector<bool>& taken, double denom, double prob, Emit&& emit) {
    if (static_cast<int>(prefix.size()) == k) {
        emit(prefix, prob);
        return;
    }
    const int n = static_cast<int>(powsum.size());
    for (int i = 0; i < n; ++i) {
        if (taken[static_cast<size_t>(i)]) continue;
        taken[static_cast<size_t>(i)] = true;
        prefix.push_back(i);
        enumerate_index_tuples(powsum, k, prefix, taken, denom - powsum[static_cast<size_t>(i)],
                               prob * powsum[static_cast<size_t>(i)] / denom, emit);
        prefix.pop_back();
        taken[static_cast<size_t>(i)] = false;
    }
}

}  // namespace

RoundPmf moment_round_exact_pmf(std::span<const dist::Categorical> ps, int k, double alpha,
                                double gamma) {
    const int n = static_cast<int>(ps.size());
    if (k < 1 || k > n) throw ArgumentError("moment_round_exact_pmf: k out of range");
    const int s = ps.front().size();
    if (std::pow(static_cast<double>(n), k) * std::pow(static_cast<double>(s), k) > 1e6) {
        throw CapacityError("moment_round_exact_pmf: N^k * S^k exceeds the 1e6 entry guard");
    }
    const double beta = dist::beta_from_alpha(alpha);

    std::vector<double> powsum(static_cast<size_t>(n));
    std::vector<std::vector<double>> tempered(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        powsum[static_cast<size_t>(i)] = dist::power_sum(ps[static_cast<size_t>(i)], beta);
        tempered[static_cast<size_t>(i)] = dist::temper(ps[static_cast<size_t>(i)], gamma).probs();
    }
    const double denom0 = std::accumulate(powsum.begin(), powsum.end(), 0.0);

    RoundPmf pmf;
    std::vector<int> prefix;
    std::vector<bool> taken(static_cast<size_t>(n), false);
    enumerate_index_tuples(powsum, k, prefix, taken, denom0, 1.0,
                           [&](const std::vector<int>& idx, double index_prob) {
        // Token tuples via an odometer over the chosen positions.
        std::vector<int> tok(static_cast<size_t>(k), 0);
        while (true) {
            double p = index_prob;
            for (int l = 0; l < k; ++l) {
                p *= tempered[static_cast<size_t>(idx[static_cast<size_t>(l)])]
                             [static_cast<size_t>(tok[static_cast<size_t>(l)])];
            }
            if (p > 0.0) pmf[RoundKey{idx, tok}] += p;
            int pos = k - 1;
            while (pos >= 0 && ++tok[static_cast<size_t>(pos)] == s) {
                tok[static_cast<size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
    });
    return pmf;
}

RoundPmf maskgit_round_exact_pmf(std::span<const dist::Categorical> ps, int k, double alpha) {
    const int n = static_cast<int>(ps.size());
    if (k < 1 || k > n) throw ArgumentError("maskgit_round_exact_pmf: k out of range");
    if (!(alpha > 0.0)) throw ArgumentError("maskgit_round_exact_pmf: alpha must be > 0");
    const int s = ps.front().size();
    if (std::pow(static_cast<double>(s), n) > 1e6) {
        throw CapacityError("maskgit_round_exact_pmf: S^N exceeds the 1e6 assignment guard");
    }
    const double inv_alpha = std::isinf(alpha) ? 0.0 : 1.0 / alpha;

    // Per (position, token): probability and its 1/alpha power.
    std::vector<std::vector<double>> prob(static_cast<size_t>(n));
    std::vector<std::vector<double>> tilt(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        prob[static_cast<size_t>(i)] = ps[static_cast<size_t>(i)].probs();
        tilt[static_cast<size_t>(i)].assign(static_cast<size_t>(s), 0.0);
        for (int x = 0; x < s; ++x) {
            const double p = prob[static_cast<size_t>(i)][static_cast<size_t>(x)];
            if (p > 0.0) {
                tilt[static_cast<size_t>(i)][static_cast<size_t>(x)] =
                    inv_alpha == 0.0 ? 1.0 : std::exp(inv_alpha * std::log(p));
            }
        }
    }

    std::map<RoundKey, KahanSum> acc;
    std::vector<int> z(static_cast<size_t>(n), 0);
    std::vector<double> a(static_cast<size_t>(n));
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) w *= prob[static_cast<size_t>(i)][static_cast<size_t>(z[static_cast<size_t>(i)])];
        if (w > 0.0) {
            double denom0 = 0.0;
            for (int i = 0; i < n; ++i) {
                a[static_cast<size_t>(i)] = tilt[static_cast<size_t>(i)][static_cast<size_t>(z[static_cast<size_t>(i)])];
                denom0 += a[static_cast<size_t>(i)];
            }
            std::vector<int> prefix;
            std::vector<bool> taken(static_cast<size_t>(n), false);
            enumerate_index_tuples(a, k, prefix, taken, denom0, 1.0,
                                   [&](const std::vector<int>& idx, double sel_prob) {
                std::vector<int> tok(static_cast<size_t>(k));
                for (int l = 0; l < k; ++l) {
                    tok[static_cast<size_t>(l)] = z[static_cast<size_t>(idx[static_cast<size_t>(l)])];
                }
                acc[RoundKey{idx, std::move(tok)}].add(w * sel_prob);
            });
        }
        int pos = n - 1;
        while (pos >= 0 && ++z[static_cast<size_t>(pos)] == s) {
            z[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    RoundPmf pmf;
    for (auto& [key, sum] : acc) pmf[key] = sum.value();
    return pmf;
}

double tv_theorem_bound(int N, int k, int S, double alpha) {
    if (N < 1 || k < 1 || S < 1) throw ArgumentError("tv_theorem_bound: N, k, S must be >= 1");
    if (!(alpha > 0.0)) throw ArgumentError("tv_theorem_bound: alpha must be > 0");
    const double s_pow = std::isinf(alpha) ? 1.0 : std::exp(std::log(static_cast<double>(S)) / alpha);
    const double ratio = static_cast<double>(k) * static_cast<double>(k) * s_pow / static_cast<double>(N);
    const double log_plus = std::log(std::max(1.0, 1.0 / ratio));
    return 5.0 * std::sqrt(ratio) * (1.0 + std::sqrt(log_plus));
}

RoundPmf marginalize_order(const RoundPmf& pmf) {
    RoundPmf out;
    for (const auto& [key, p] : pmf) {
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(key.indices.size());
        for (size_t l = 0; l < key.indices.size(); ++l) {
            pairs.emplace_back(key.indices[l], key.tokens[l]);
        }
        std::sort(pairs.begin(), pairs.end());
        RoundKey sorted_key;
        sorted_key.indices.reserve(pairs.size());
        sorted_key.tokens.reserve(pairs.size());
        for (const auto& [i, t] : pairs) {
            sorted_key.indices.push_back(i);
            sorted_key.tokens.push_back(t);
        }
        out[sorted_key] += p;
    }
    return out;
}

}  // namespace mdsampler::rounds

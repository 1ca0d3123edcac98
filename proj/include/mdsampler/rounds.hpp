#pragma once

#include <compare>
#include <map>
#include <span>
#include <vector>

#include "mdsampler/common.hpp"
#include "mdsampler/dist.hpp"

namespace mdsampler::rounds {

/// Output of one unmasking round: k distinct positions in selection order
/// plus the token drawn at each.
struct RoundOutcome {
    std::vector<int> indices;
    std::vector<int> tokens;
};

struct RoundKey {
    std::vector<int> indices;
    std::vector<int> tokens;
    auto operator<=>(const RoundKey&) const = default;
};

// Distribution over ordered (index tuple, token tuple) outcomes.
using RoundPmf = std::map<RoundKey, double>;

double pmf_total_mass(const RoundPmf& pmf);

// Sample-then-choose round: draw x_i ~ p_i and Gumbel noise xi_i at every
// position, keep the argtop-k of log p_i(x_i) + alpha * xi_i.
// alpha = 0 ranks noiselessly by log p_i(x_i); alpha = +infinity ranks by
// pure noise (uniform selection without replacement).
RoundOutcome maskgit_round(std::span<const dist::Categorical> ps, int k, double alpha, Rng& rng);

// Choose-then-sample round: pick k positions by unit-noise Gumbel-top-k on
// log sum_x p_i(x)^beta with beta = 1 + 1/alpha, then draw each chosen token
// from p_i^gamma / sum p_i^gamma. gamma = beta emulates the sample-then-choose
// round above; gamma = 1 keeps the per-position marginals unbiased.
RoundOutcome moment_round(std::span<const dist::Categorical> ps, int k, double alpha, double gamma,
                          Rng& rng);

// Exact output pmf of moment_round by direct enumeration of ordered index
// and token tuples. Guard: N^k * |S|^k <= 10^6 entries.
RoundPmf moment_round_exact_pmf(std::span<const dist::Categorical> ps, int k, double alpha,
                                double gamma);

// Exact output pmf of maskgit_round by marginalizing the conditional
// selection law over all |S|^N token assignments. Guard: |S|^N <= 10^6.
RoundPmf maskgit_round_exact_pmf(std::span<const dist::Categorical> ps, int k, double alpha);

// Evaluable closed-form bound on the total variation distance between the
// two rounds' output laws:
//   5 * sqrt(k^2 |S|^{1/alpha} / N) * (1 + sqrt(log+(N / (k^2 |S|^{1/alpha}))))
// with log+(x) = log(max(1, x)).
double tv_theorem_bound(int N, int k, int S, double alpha);

// Marginalize a RoundPmf over selection order: outcomes become the
// position-sorted (index, token) pair lists. Utility only; the bound above
// is about the ordered law.
RoundPmf marginalize_order(const RoundPmf& pmf);

}  // namespace mdsampler::rounds

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mdsampler/common.hpp"
#include "mdsampler/dist.hpp"

namespace mdsampler::policies {

/// A full ordering of the currently masked positions. Drivers unmask a
/// prefix of it each round; keeping the whole permutation is what makes the
/// hybrid merge and the cache split possible.
struct Ordering {
    std::vector<int> positions;
};

using PositionProbs = std::vector<std::pair<int, dist::Categorical>>;

// Uniformly random permutation of the masked set.
Ordering order_random(std::span<const int> masked, Rng& rng);

// Descending max-probability; exact ties broken by a negligible Gumbel
// jitter (temperature 1e-12), then by index.
Ordering order_confidence(const PositionProbs& probs, Rng& rng);

// Gumbel-perturbed ranking of log sum_x p(x)^beta with unit noise, extended
// from top-k to a full permutation.
Ordering order_moment(const PositionProbs& probs, double beta, Rng& rng);

// Radical-inverse of t in the given base.
double van_der_corput(uint64_t t, uint32_t base);

// Deterministic base-2 van der Corput ordering over [0, D), filtered to the
// masked set. For power-of-two D this is the bit-reversal permutation.
Ordering order_halton_1d(int D, std::span<const int> masked);

// Two-dimensional Halton ordering (base 2 over rows, base 3 over columns) of
// a rows x cols grid flattened row-major, filtered to the masked set.
Ordering order_halton_2d(int rows, int cols, std::span<const int> masked);

// First m entries of `first`, then the entries of `second` in its order,
// skipping ones already taken. Both must order the same set; n is the number
// of positions the caller will unmask this round (0 <= m <= n <= size).
Ordering merge_orderings(const Ordering& first, const Ordering& second, int n, int m);

}  // namespace mdsampler::policies

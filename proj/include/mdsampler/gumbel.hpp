#pragma once

#include <span>
#include <vector>

#include "mdsampler/common.hpp"

namespace mdsampler::gumbel {

/// Ordered top-k index selection (descending perturbed score).
struct TopKSelection {
    std::vector<int> indices;
};

// -log(-log u) with u clamped into [DBL_MIN, largest double < 1], so the
// result is always finite.
double gumbel_from_uniform(double u);

double sample_gumbel(Rng& rng);

// argtop-k of {mu_i + temperature * xi_i} with standard Gumbel noise xi.
// temperature == 0 is the deterministic argtop-k (no variates consumed).
// Ties break toward the lower index.
TopKSelection gumbel_top_k(std::span<const double> mu, int k, double temperature, Rng& rng);

// Exact probability that unit-temperature Gumbel-top-k produces the given
// ordered prefix of distinct indices:
//   prod_l exp(mu_{i_l}) / sum_{i not yet taken} exp(mu_i),
// evaluated in log space.
double log_top_k_prefix_pmf(std::span<const double> mu, std::span<const int> prefix);
double top_k_prefix_pmf(std::span<const double> mu, std::span<const int> prefix);

}  // namespace mdsampler::gumbel

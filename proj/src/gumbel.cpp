#include "mdsampler/gumbel.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

namespace mdsampler::gumbel {

double gumbel_from_uniform(double u) {
    // Largest double strictly below 1; -log of it is still a normal number.
    static const double kUpper = std::nextafter(1.0, 0.0);
    u = std::clamp(u, DBL_MIN, kUpper);
    return -std::log(-std::log(u));
}

double sample_gumbel(Rng& rng) {
    return gumbel_from_uniform(uniform01(rng));
}

TopKSelection gumbel_top_k(std::span<const double> mu, int k, double temperature, Rng& rng) {
    const int n = static_cast<int>(mu.size());
    if (k < 1 || k > n) throw ArgumentError("gumbel_top_k: k out of range");
    if (!(temperature >= 0.0)) throw ArgumentError("gumbel_top_k: temperature must be >= 0");

    std::vector<double> score(mu.begin(), mu.end());
    if (temperature > 0.0) {
        for (int i = 0; i < n; ++i) {
            score[static_cast<size_t>(i)] += temperature * sample_gumbel(rng);
        }
    }
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const auto by_score = [&score](int a, int b) {
        const double sa = score[static_cast<size_t>(a)];
        const double sb = score[static_cast<size_t>(b)];
        if (sa != sb) return sa > sb;
        return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + k, order.end(), by_score);
    order.resize(static_cast<size_t>(k));
    return TopKSelection{std::move(order)};
}

double log_top_k_prefix_pmf(std::span<const double> mu, std::span<const int> prefix) {
    const int n = static_cast<int>(mu.size());
    if (prefix.size() > mu.size()) throw ArgumentError("prefix_pmf: prefix longer than mu");

    std::vector<bool> taken(static_cast<size_t>(n), false);
    for (int idx : prefix) {
        if (idx < 0 || idx >= n) throw ArgumentError("prefix_pmf: index out of range");
        if (taken[static_cast<size_t>(idx)]) throw ArgumentError("prefix_pmf: duplicate index");
        taken[static_cast<size_t>(idx)] = true;
    }

    std::fill(taken.begin(), taken.end(), false);
    double log_prob = 0.0;
    for (int idx : prefix) {
        double max_mu = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!taken[static_cast<size_t>(i)]) max_mu = std::max(max_mu, mu[static_cast<size_t>(i)]);
        }
        double denom = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!taken[static_cast<size_t>(i)]) denom += std::exp(mu[static_cast<size_t>(i)] - max_mu);
        }
        log_prob += (mu[static_cast<size_t>(idx)] - max_mu) - std::log(denom);
        taken[static_cast<size_t>(idx)] = true;
    }
    return log_prob;
}

double top_k_prefix_pmf(std::span<const double> mu, std::span<const int> prefix) {
    return std::exp(log_top_k_prefix_pmf(mu, prefix));
}

}  // namespace mdsampler::gumbel

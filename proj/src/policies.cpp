#include "mdsampler/policies.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_set>

#include "mdsampler/gumbel.hpp"

namespace mdsampler::policies {

Ordering order_random(std::span<const int> masked, Rng& rng) {
    if (masked.empty()) throw ArgumentError("order_random: empty masked set");
    std::vector<int> out(masked.begin(), masked.end());
    // Fisher-Yates with our own uniform so the draw sequence is stable.
    for (size_t i = out.size() - 1; i > 0; --i) {
        const size_t j = static_cast<size_t>(uniform01(rng) * static_cast<double>(i + 1));
        std::swap(out[i], out[std::min(j, i)]);
    }
    return Ordering{std::move(out)};
}

namespace {

Ordering order_by_scores(const PositionProbs& probs, const std::vector<double>& score) {
    std::vector<size_t> order(probs.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return probs[a].first < probs[b].first;
    });
    Ordering out;
    out.positions.reserve(probs.size());
    for (size_t i : order) out.positions.push_back(probs[i].first);
    return out;
}

}  // namespace

Ordering order_confidence(const PositionProbs& probs, Rng& rng) {
    if (probs.empty()) throw ArgumentError("order_confidence: empty input");
    std::vector<double> score(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        score[i] = dist::confidence(probs[i].second) + 1e-12 * gumbel::sample_gumbel(rng);
    }
    return order_by_scores(probs, score);
}

Ordering order_moment(const PositionProbs& probs, double beta, Rng& rng) {
    if (probs.empty()) throw ArgumentError("order_moment: empty input");
    if (!(beta >= 1.0)) throw ArgumentError("order_moment: beta must be >= 1");
    std::vector<double> score(probs.size());
    for (size_t i = 0; i < probs.size(); ++i) {
        score[i] = dist::log_power_sum(probs[i].second, beta) + gumbel::sample_gumbel(rng);
    }
    return order_by_scores(probs, score);
}

double van_der_corput(uint64_t t, uint32_t base) {
    if (base < 2) throw ArgumentError("van_der_corput: base must be >= 2");
    double v = 0.0;
    double denom = 1.0;
    while (t > 0) {
        denom *= base;
        v += static_cast<double>(t % base) / denom;
        t /= base;
    }
    return v;
}

namespace {

// Walk a low-discrepancy cell sequence, keeping first occurrences that are in
// the masked set, until the set is exhausted.
Ordering filter_sequence_to_masked(int D, std::span<const int> masked,
                                   const std::function<int(uint64_t)>& cell_at) {
    std::vector<char> wanted(static_cast<size_t>(D), 0);
    size_t remaining = 0;
    for (int pos : masked) {
        if (pos < 0 || pos >= D) throw ArgumentError("halton ordering: masked index out of range");
        if (!wanted[static_cast<size_t>(pos)]) {
            wanted[static_cast<size_t>(pos)] = 1;
            ++remaining;
        }
    }
    Ordering out;
    out.positions.reserve(remaining);
    // Coverage of every cell needs at most base^ceil(log_base D) points per
    // axis; the cap below is far above that for any size we accept.
    const uint64_t cap = 1ull << 40;
    for (uint64_t t = 0; remaining > 0; ++t) {
        if (t >= cap) throw InternalError("halton ordering: sequence failed to cover the grid");
        const int pos = cell_at(t);
        if (pos >= 0 && pos < D && wanted[static_cast<size_t>(pos)]) {
            wanted[static_cast<size_t>(pos)] = 0;
            --remaining;
            out.positions.push_back(pos);
        }
    }
    return out;
}

}  // namespace

Ordering order_halton_1d(int D, std::span<const int> masked) {
    if (D < 1) throw ArgumentError("order_halton_1d: D must be >= 1");
    return filter_sequence_to_masked(D, masked, [D](uint64_t t) {
        return static_cast<int>(van_der_corput(t, 2) * D);
    });
}

Ordering order_halton_2d(int rows, int cols, std::span<const int> masked) {
    if (rows < 1 || cols < 1) throw ArgumentError("order_halton_2d: grid dims must be >= 1");
    const int D = rows * cols;
    for (int pos : masked) {
        if (pos < 0 || pos >= D) throw ArgumentError("order_halton_2d: masked index outside grid");
    }
    return filter_sequence_to_masked(D, masked, [rows, cols](uint64_t t) {
        const int r = static_cast<int>(van_der_corput(t, 2) * rows);
        const int c = static_cast<int>(van_der_corput(t, 3) * cols);
        return r * cols + c;
    });
}

Ordering merge_orderings(const Ordering& first, const Ordering& second, int n, int m) {
    if (first.positions.size() != second.positions.size()) {
        throw ArgumentError("merge_orderings: orderings cover different sets");
    }
    const int len = static_cast<int>(first.positions.size());
    if (m < 0 || n < m || n > len) {
        throw ArgumentError("merge_orderings: need 0 <= m <= n <= size");
    }
    std::unordered_set<int> set_a(first.positions.begin(), first.positions.end());
    for (int pos : second.positions) {
        if (set_a.find(pos) == set_a.end()) {
            throw ArgumentError("merge_orderings: orderings cover different sets");
        }
    }

    Ordering out;
    out.positions.reserve(static_cast<size_t>(len));
    std::unordered_set<int> taken;
    for (int i = 0; i < m; ++i) {
        out.positions.push_back(first.positions[static_cast<size_t>(i)]);
        taken.insert(first.positions[static_cast<size_t>(i)]);
    }
    for (int pos : second.positions) {
        if (taken.insert(pos).second) out.positions.push_back(pos);
    }
    return out;
}

}  // namespace mdsampler::policies

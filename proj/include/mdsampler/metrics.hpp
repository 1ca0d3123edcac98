#pragma once

#include <cmath>
#include <map>
#include <span>
#include <vector>

#include "mdsampler/common.hpp"

namespace mdsampler::metrics {

// Half-L1 total variation distance between two pmfs given as outcome -> mass
// maps; the outcome space is the union of supports.
template <typename Key>
double tv_exact(const std::map<Key, double>& p, const std::map<Key, double>& q) {
    double acc = 0.0;
    auto it_p = p.begin();
    auto it_q = q.begin();
    while (it_p != p.end() && it_q != q.end()) {
        if (it_p->first < it_q->first) {
            acc += std::abs(it_p->second);
            ++it_p;
        } else if (it_q->first < it_p->first) {
            acc += std::abs(it_q->second);
            ++it_q;
        } else {
            acc += std::abs(it_p->second - it_q->second);
            ++it_p;
            ++it_q;
        }
    }
    for (; it_p != p.end(); ++it_p) acc += std::abs(it_p->second);
    for (; it_q != q.end(); ++it_q) acc += std::abs(it_q->second);
    return 0.5 * acc;
}

double tv_exact(std::span<const double> p, std::span<const double> q);

/// Outcome counts from repeated draws.
template <typename Key>
struct EmpiricalPmf {
    std::map<Key, long long> counts;
    long long total = 0;

    void add(const Key& k, long long c = 1) {
        counts[k] += c;
        total += c;
    }
    std::map<Key, double> normalized() const {
        if (total <= 0) throw ArgumentError("empirical pmf: no draws");
        std::map<Key, double> out;
        for (const auto& [k, c] : counts) out[k] = static_cast<double>(c) / static_cast<double>(total);
        return out;
    }
    // Merge counts from another accumulator (e.g. a worker shard).
    void merge(const EmpiricalPmf& other) {
        for (const auto& [k, c] : other.counts) counts[k] += c;
        total += other.total;
    }
};

template <typename Key>
double tv_empirical(const EmpiricalPmf<Key>& samples, const std::map<Key, double>& q) {
    return tv_exact(samples.normalized(), q);
}

// Plug-in scale of the estimation error of tv_empirical: sqrt(support/draws).
double tv_estimation_scale(size_t support, long long draws);

// Empirical token-frequency entropy of one sequence, in nats.
double sequence_entropy(std::span<const int> sequence);

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

}  // namespace mdsampler::metrics

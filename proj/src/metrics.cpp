#include "mdsampler/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace mdsampler::metrics {

double tv_exact(std::span<const double> p, std::span<const double> q) {
    const size_t n = std::max(p.size(), q.size());
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double pv = i < p.size() ? p[i] : 0.0;
        const double qv = i < q.size() ? q[i] : 0.0;
        acc += std::abs(pv - qv);
    }
    return 0.5 * acc;
}

double tv_estimation_scale(size_t support, long long draws) {
    if (draws < 1) throw ArgumentError("tv_estimation_scale: draws must be >= 1");
    return std::sqrt(static_cast<double>(support) / static_cast<double>(draws));
}

double sequence_entropy(std::span<const int> sequence) {
    if (sequence.empty()) throw ArgumentError("sequence_entropy: empty sequence");
    std::map<int, long long> counts;
    for (int s : sequence) counts[s] += 1;
    const double d = static_cast<double>(sequence.size());
    double h = 0.0;
    for (const auto& [tok, c] : counts) {
        (void)tok;
        const double f = static_cast<double>(c) / d;
        h -= f * std::log(f);
    }
    return h;
}

}  // namespace mdsampler::metrics

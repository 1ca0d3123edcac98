#include "mdsampler/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdsampler/simd.hpp"

namespace mdsampler::dist {

namespace {
constexpr double kSumTolerance = 1e-9;
}

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) {
        throw InvalidDistributionError("categorical: alphabet must be nonempty");
    }
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidDistributionError("categorical: entries must be finite and >= 0");
        }
    }
    const double total = simd::sum(probs_.data(), probs_.size());
    if (std::abs(total - 1.0) > kSumTolerance) {
        throw InvalidDistributionError("categorical: entries must sum to 1 within 1e-9");
    }
}

Categorical Categorical::from_weights(std::vector<double> weights) {
    if (weights.empty()) {
        throw InvalidDistributionError("categorical: alphabet must be nonempty");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidDistributionError("categorical: weights must be finite and >= 0");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw InvalidDistributionError("categorical: all-zero weight vector");
    }
    simd::scale(1.0 / total, weights.data(), weights.size());
    return Categorical(std::move(weights), Unchecked{});
}

Categorical Categorical::uniform(int n) {
    if (n < 1) throw InvalidDistributionError("categorical: alphabet must be nonempty");
    return Categorical(std::vector<double>(static_cast<size_t>(n), 1.0 / n), Unchecked{});
}

Categorical Categorical::one_hot(int n, int index) {
    if (n < 1 || index < 0 || index >= n) {
        throw ArgumentError("one_hot: index out of range");
    }
    std::vector<double> p(static_cast<size_t>(n), 0.0);
    p[static_cast<size_t>(index)] = 1.0;
    return Categorical(std::move(p), Unchecked{});
}

double entropy(const Categorical& p) {
    double h = 0.0;
    for (double v : p.probs()) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

double log_power_sum(const Categorical& p, double beta) {
    if (!(beta > 0.0)) throw ArgumentError("power_sum: beta must be > 0");
    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : p.probs()) {
        if (v > 0.0) max_log = std::max(max_log, beta * std::log(v));
    }
    // A valid categorical always has a positive entry.
    double acc = 0.0;
    for (double v : p.probs()) {
        if (v > 0.0) acc += std::exp(beta * std::log(v) - max_log);
    }
    return max_log + std::log(acc);
}

double power_sum(const Categorical& p, double beta) {
    return std::exp(log_power_sum(p, beta));
}

Categorical temper(const Categorical& p, double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("temper: gamma must be > 0");
    if (gamma == 1.0) return p;

    double max_log = -std::numeric_limits<double>::infinity();
    for (double v : p.probs()) {
        if (v > 0.0) max_log = std::max(max_log, gamma * std::log(v));
    }
    if (!std::isfinite(max_log)) {
        throw InvalidDistributionError("temper: no positive entry");
    }
    std::vector<double> out(p.probs().size(), 0.0);
    double z = 0.0;
    for (size_t i = 0; i < out.size(); ++i) {
        const double v = p.probs()[i];
        if (v > 0.0) {
            out[i] = std::exp(gamma * std::log(v) - max_log);
            z += out[i];
        }
    }
    simd::scale(1.0 / z, out.data(), out.size());
    return Categorical(std::move(out), Categorical::Unchecked{});
}

double confidence(const Categorical& p) {
    return simd::max(p.probs().data(), p.probs().size());
}

int sample(const Categorical& p, Rng& rng) {
    const double u = uniform01(rng);
    double cum = 0.0;
    int last_positive = -1;
    const auto& probs = p.probs();
    for (int i = 0; i < p.size(); ++i) {
        const double v = probs[static_cast<size_t>(i)];
        if (v > 0.0) last_positive = i;
        cum += v;
        // The threshold can only be crossed at an index with positive mass.
        if (u < cum) return i;
    }
    // u landed past the accumulated mass (rounding at the top of the CDF).
    return last_positive;
}

double beta_from_alpha(double alpha) {
    if (std::isinf(alpha)) return 1.0;
    if (!(alpha > 0.0)) throw ArgumentError("beta_from_alpha: alpha must be > 0");
    return 1.0 + 1.0 / alpha;
}

}  // namespace mdsampler::dist

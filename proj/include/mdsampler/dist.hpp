#pragma once

#include <span>
#include <vector>

#include "mdsampler/common.hpp"

namespace mdsampler::dist {

/// Finite probability vector over a token alphabet. Entries are nonnegative
/// and sum to one within 1e-9; zero entries are legitimate (one-hot inputs
/// are ordinary boundary cases).
class Categorical {
public:
    explicit Categorical(std::vector<double> probs);

    // Normalizes arbitrary nonnegative weights. All-zero weights are an
    // InvalidDistributionError.
    static Categorical from_weights(std::vector<double> weights);
    static Categorical uniform(int n);
    static Categorical one_hot(int n, int index);

    int size() const { return static_cast<int>(probs_.size()); }
    double operator[](int i) const { return probs_[static_cast<size_t>(i)]; }
    const std::vector<double>& probs() const { return probs_; }

private:
    struct Unchecked {};
    Categorical(std::vector<double> probs, Unchecked) : probs_(std::move(probs)) {}

    std::vector<double> probs_;

    friend Categorical temper(const Categorical&, double);
};

// Shannon entropy in nats, with 0 log 0 := 0.
double entropy(const Categorical& p);

// log sum_x p(x)^beta, evaluated as a log-sum-exp over the support so large
// beta cannot underflow term by term.
double log_power_sum(const Categorical& p, double beta);

// sum_x p(x)^beta, in (0, |S|] for beta > 0.
double power_sum(const Categorical& p, double beta);

// p^gamma renormalized. gamma == 1 returns p unchanged; zeros stay zero.
Categorical temper(const Categorical& p, double gamma);

// max_x p(x).
double confidence(const Categorical& p);

// Inverse-CDF draw using exactly one uniform variate.
int sample(const Categorical& p, Rng& rng);

// beta = 1 + 1/alpha; alpha = +infinity maps to beta = 1.
double beta_from_alpha(double alpha);

}  // namespace mdsampler::dist

#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mdsampler/dist.hpp"
#include "mdsampler/model.hpp"
#include "mdsampler/state.hpp"

namespace mdsampler::oracle {

/// Dense joint distribution over S^D, row-major with coordinate 1 slowest.
/// This is the exactly computable stand-in for a data distribution; every
/// sampler claim in the test suites is checked against tables like this.
class JointTable {
public:
    static constexpr double kTableCapacity = 1e6;  // max S^D entries

    JointTable(int D, int S, std::vector<double> probs);

    // Random joint with every cell's weight in [min_mass, min_mass + 1)
    // before normalization, so conditioning events have positive mass.
    static JointTable random(int D, int S, Rng& rng, double min_mass = 0.05);

    int D() const { return d_; }
    int S() const { return s_; }
    size_t size() const { return probs_.size(); }
    const std::vector<double>& probs() const { return probs_; }

    size_t index_of(std::span<const int> x) const;
    double prob(std::span<const int> x) const { return probs_[index_of(x)]; }
    void decode(size_t index, std::vector<int>& x) const;

    // JSON round-trip: {"D": int, "S": int, "probs": [flat row-major]}.
    std::string to_json() const;
    static JointTable from_json(const std::string& text);
    void save(const std::string& path) const;
    static JointTable load(const std::string& path);

private:
    int d_;
    int s_;
    std::vector<double> probs_;
};

// Exact conditional of coordinate i given the unmasked part of `state`
// (everything with a committed token), by summation over the free
// coordinates. Conditioning on a zero-probability event is a
// ConditioningError.
dist::Categorical conditional(const JointTable& q, int i, const cts::MaskState& state);
dist::Categorical conditional(const JointTable& q, int i, std::span<const int> J,
                              std::span<const int> x_J);

// Marginal of q restricted to the coordinates in `coords` (ascending order),
// indexed row-major in that order.
std::vector<double> marginal(const JointTable& q, std::span<const int> coords);

// Uniform-size-then-uniform-subset weight: phi(J | parent) =
// (|parent| + 1)^{-1} / C(|parent|, |J|). Sums to one over all subsets.
double phi_weight(int parent_size, int subset_size);

// All subsets of `parent` with their phi weights (subsets as sorted vectors).
std::map<std::vector<int>, double> phi_subsets(const std::vector<int>& parent);

struct KlResult {
    double nats = 0.0;
    bool infinite = false;  // support violation: q > 0 somewhere p = 0
};

// sum q log(q/p) with 0 log(0/p) := 0. A support violation is reported via
// the flag (nats = +inf), not thrown, so sweeps survive one bad pair.
KlResult kl_divergence(std::span<const double> q, std::span<const double> p);

// E_{x_J ~ q_J} H(q_{i|J}(. | x_J)).
double expected_conditional_entropy(const JointTable& q, int i, std::span<const int> J);

// Entropy of the marginal q_I.
double subset_entropy(const JointTable& q, std::span<const int> I);

/// Exact pieces of the KL ledger for a two-stage product law that unmasks I
/// first: the full divergence, its chain-rule split, and the three entropy
/// terms whose combination (a) - (b) + (c) upper-bounds it.
struct KlDecomposition {
    double chain_lhs = 0.0;   // D_KL(q || p), p = two-stage product law
    double chain_rhs1 = 0.0;  // D_KL(q_I || prod_{i in I} q_i)
    double chain_rhs2 = 0.0;  // E_{x_I} D_KL(q_{I^c|I} || prod q_{i|I})
    double term_a = 0.0;      // sum_{i in I} H(q_i)
    double term_b = 0.0;      // sum_{i in I} E_{J ~ phi, x_J} H(q_{i|J})
    double term_c = 0.0;      // E_{x_I} sum_{i not in I} H(q_{i|I})
};

// term_b is evaluated by averaging the entropy chain rule over all
// permutations of I; kl_term_b_phi below is the literal subset-weighted
// route, kept separate so the two can be compared.
KlDecomposition kl_decomposition_terms(const JointTable& q, const std::vector<int>& I);
double kl_term_b_phi(const JointTable& q, const std::vector<int>& I);

// Probabilities over the currently masked positions, aligned with
// state.masked_positions().
using PolicyKernel = std::function<std::vector<double>(const cts::MaskState&)>;

// Exact output law of the one-position-per-round choose-then-sample chain
// with exact conditionals from q and token exponent gamma, by full
// enumeration of position orders and token paths. Guard: S^D * D! <= 1e7.
// The second form takes one exponent per round (size D), e.g. to model a
// chain whose final round is unbiased.
std::vector<double> exact_cts_distribution(const JointTable& q, const PolicyKernel& kernel,
                                           double gamma);
std::vector<double> exact_cts_distribution(const JointTable& q, const PolicyKernel& kernel,
                                           std::span<const double> gamma_per_step);

/// ProductModel with exact conditionals read off a JointTable.
class TableModel : public cts::ProductModel {
public:
    explicit TableModel(JointTable table) : table_(std::move(table)) {}

    int length() const override { return table_.D(); }
    int alphabet() const override { return table_.S(); }
    dist::Categorical conditional(const cts::MaskState& state, int pos) const override;

    const JointTable& table() const { return table_; }

private:
    JointTable table_;
};

}  // namespace mdsampler::oracle

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdsampler/model.hpp"
#include "mdsampler/nanoformer.hpp"
#include "mdsampler/policies.hpp"
#include "mdsampler/schedules.hpp"
#include "mdsampler/state.hpp"

namespace mdsampler::cts {

struct RoundRecord {
    int n = 0;
    double tau = 0.0;    // scheduled selection-noise temperature
    double gamma = 1.0;  // token exponent used this round
    std::vector<int> indices;
    std::vector<int> tokens;
    std::vector<uint8_t> refreshed;  // 1 where the token came from refreshed conditionals
};

struct GenerationTrace {
    int D = 0;
    int S = 0;
    std::string driver;
    std::string policy;
    std::vector<RoundRecord> rounds;
    std::vector<int> sequence;
};

std::string trace_to_json(const GenerationTrace& trace);

/// Per-round token exponent. The derived modes force the last round to 1 so
/// the chain ends with unbiased token draws; an explicit list is taken
/// verbatim.
struct GammaSchedule {
    enum class Mode { constant_unbiased_final, maskgit_emulation, explicit_list };
    Mode mode = Mode::constant_unbiased_final;
    double value = 1.0;          // constant mode
    double alpha = 1.0;          // emulation mode
    std::vector<double> values;  // explicit mode, values[n-1]

    static GammaSchedule constant(double gamma);
    static GammaSchedule maskgit_emulation(double alpha);
    static GammaSchedule explicit_list(std::vector<double> values);

    double at(int n, int N) const;
};

/// Everything a policy may condition on for one round.
struct RoundContext {
    int n = 0;
    int N = 0;
    int k = 0;          // positions to unmask this round
    double alpha_n = 0;  // scheduled noise temperature
    double beta_n = 1;   // 1 + 1/alpha_n (1 at the final round)
    bool final_round = false;
    bool noisy_final_selection = false;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual const char* name() const = 0;
    virtual policies::Ordering order(const RoundContext& ctx, const MaskState& state,
                                     const policies::PositionProbs& conds, Rng& rng) = 0;
};

class RandomPolicy final : public Policy {
public:
    const char* name() const override { return "random"; }
    policies::Ordering order(const RoundContext&, const MaskState&, const policies::PositionProbs&,
                             Rng& rng) override;
};

class ConfidencePolicy final : public Policy {
public:
    const char* name() const override { return "confidence"; }
    policies::Ordering order(const RoundContext&, const MaskState&, const policies::PositionProbs&,
                             Rng& rng) override;
};

/// Ranks positions by perturbed log power sums; beta follows the round's
/// noise schedule unless pinned. At the final round the selection drops its
/// noise unless the context says otherwise.
class MomentPolicy final : public Policy {
public:
    explicit MomentPolicy(std::optional<double> fixed_beta = std::nullopt)
        : fixed_beta_(fixed_beta) {}
    const char* name() const override { return "moment"; }
    policies::Ordering order(const RoundContext&, const MaskState&, const policies::PositionProbs&,
                             Rng& rng) override;

private:
    std::optional<double> fixed_beta_;
};

class Halton1dPolicy final : public Policy {
public:
    const char* name() const override { return "halton"; }
    policies::Ordering order(const RoundContext&, const MaskState&, const policies::PositionProbs&,
                             Rng&) override;
};

class Halton2dPolicy final : public Policy {
public:
    Halton2dPolicy(int rows, int cols) : rows_(rows), cols_(cols) {}
    const char* name() const override { return "halton2d"; }
    policies::Ordering order(const RoundContext&, const MaskState&, const policies::PositionProbs&,
                             Rng&) override;

private:
    int rows_;
    int cols_;
};

/// Explore-then-exploit merge: the first m_n positions follow the explore
/// ordering, the rest follow the exploit ordering, with m_n shrinking to 0
/// over the schedule.
class HybridPolicy final : public Policy {
public:
    HybridPolicy(std::unique_ptr<Policy> explore, std::unique_ptr<Policy> exploit)
        : explore_(std::move(explore)), exploit_(std::move(exploit)) {}
    const char* name() const override { return "hybrid"; }
    policies::Ordering order(const RoundContext&, const MaskState&, const policies::PositionProbs&,
                             Rng& rng) override;

private:
    std::unique_ptr<Policy> explore_;
    std::unique_ptr<Policy> exploit_;
};

struct DriverOptions {
    double alpha = 6.0;  // global noise-temperature parameter
    bool noisy_final_selection = false;
};

// General choose-then-sample chain: each round queries the model once, asks
// the policy for a full ordering of the masked set, unmasks the first |I_n|
// positions with tokens from the gamma-tempered conditionals. Rounds with
// |I_n| = 0 make no model call.
GenerationTrace run_cts(const ProductModel& model, Policy& policy,
                        const schedules::UnmaskSchedule& schedule, const GammaSchedule& gamma,
                        Rng& rng, const DriverOptions& opt = {});

// Sample-then-choose chain: each round runs one sample-then-choose step on
// the current conditionals with noise temperature alpha * (1 - n/N).
GenerationTrace run_maskgit_chain(const ProductModel& model,
                                  const schedules::UnmaskSchedule& schedule, double alpha,
                                  Rng& rng);

/// How a round's positions split into the early-commit prefix A and the
/// refreshed remainder B.
struct CacheSplit {
    enum class Mode { half_schedule, fraction, none };
    Mode mode = Mode::half_schedule;
    double fraction = 0.5;  // used by Mode::fraction

    int a_count(const schedules::UnmaskSchedule& schedule, const std::vector<int>& half, int n,
                int k) const;
};

// Cached variant of run_cts on the transformer: per round, one full forward
// fills the KV cache, tokens for A come from those conditionals, then a
// partial forward refreshes the conditionals for B with A committed. With an
// empty A every round this is bit-identical to run_cts on the same seed.
GenerationTrace run_cts_cached(const nanoformer::Model& model, Policy& policy,
                               const schedules::UnmaskSchedule& schedule,
                               const GammaSchedule& gamma, Rng& rng, const CacheSplit& split,
                               const DriverOptions& opt = {});

}  // namespace mdsampler::cts

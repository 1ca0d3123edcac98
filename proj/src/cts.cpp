#include "mdsampler/cts.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "mdsampler/rounds.hpp"

namespace mdsampler::cts {

std::string trace_to_json(const GenerationTrace& trace) {
    nlohmann::json j;
    j["D"] = trace.D;
    j["S"] = trace.S;
    j["driver"] = trace.driver;
    j["policy"] = trace.policy;
    j["sequence"] = trace.sequence;
    j["rounds"] = nlohmann::json::array();
    for (const auto& r : trace.rounds) {
        nlohmann::json jr;
        jr["n"] = r.n;
        jr["tau"] = r.tau;
        jr["gamma"] = r.gamma;
        jr["indices"] = r.indices;
        jr["tokens"] = r.tokens;
        jr["refreshed"] = r.refreshed;
        j["rounds"].push_back(std::move(jr));
    }
    return j.dump();
}

GammaSchedule GammaSchedule::constant(double gamma) {
    if (!(gamma > 0.0)) throw ArgumentError("gamma schedule: gamma must be > 0");
    GammaSchedule g;
    g.mode = Mode::constant_unbiased_final;
    g.value = gamma;
    return g;
}

GammaSchedule GammaSchedule::maskgit_emulation(double alpha) {
    if (!(alpha > 0.0)) throw ArgumentError("gamma schedule: alpha must be > 0");
    GammaSchedule g;
    g.mode = Mode::maskgit_emulation;
    g.alpha = alpha;
    return g;
}

GammaSchedule GammaSchedule::explicit_list(std::vector<double> values) {
    for (double v : values) {
        if (!(v > 0.0)) throw ArgumentError("gamma schedule: entries must be > 0");
    }
    GammaSchedule g;
    g.mode = Mode::explicit_list;
    g.values = std::move(values);
    return g;
}

double GammaSchedule::at(int n, int N) const {
    if (n < 1 || n > N) throw ArgumentError("gamma schedule: n out of range");
    switch (mode) {
        case Mode::constant_unbiased_final:
            return n == N ? 1.0 : value;
        case Mode::maskgit_emulation: {
            if (n == N) return 1.0;
            const double alpha_n = schedules::gumbel_temp(alpha, n, N);
            return dist::beta_from_alpha(alpha_n);
        }
        case Mode::explicit_list:
            if (static_cast<size_t>(n) > values.size()) {
                throw ArgumentError("gamma schedule: explicit list shorter than N");
            }
            return values[static_cast<size_t>(n - 1)];
    }
    return 1.0;
}

policies::Ordering RandomPolicy::order(const RoundContext&, const MaskState& state,
                                       const policies::PositionProbs&, Rng& rng) {
    return policies::order_random(state.masked_positions(), rng);
}

policies::Ordering ConfidencePolicy::order(const RoundContext&, const MaskState&,
                                           const policies::PositionProbs& conds, Rng& rng) {
    return policies::order_confidence(conds, rng);
}

policies::Ordering MomentPolicy::order(const RoundContext& ctx, const MaskState&,
                                       const policies::PositionProbs& conds, Rng& rng) {
    const double beta = fixed_beta_.value_or(ctx.beta_n);
    if (ctx.final_round && !ctx.noisy_final_selection) {
        // Noise-free ranking of the same scores.
        std::vector<size_t> order(conds.size());
        std::vector<double> score(conds.size());
        for (size_t i = 0; i < conds.size(); ++i) {
            score[i] = dist::log_power_sum(conds[i].second, beta);
            order[i] = i;
        }
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
            if (score[a] != score[b]) return score[a] > score[b];
            return conds[a].first < conds[b].first;
        });
        policies::Ordering out;
        for (size_t i : order) out.positions.push_back(conds[i].first);
        return out;
    }
    return policies::order_moment(conds, beta, rng);
}

policies::Ordering Halton1dPolicy::order(const RoundContext&, const MaskState& state,
                                         const policies::PositionProbs&, Rng&) {
    return policies::order_halton_1d(state.D, state.masked_positions());
}

policies::Ordering Halton2dPolicy::order(const RoundContext&, const MaskState& state,
                                         const policies::PositionProbs&, Rng&) {
    if (rows_ * cols_ != state.D) throw ArgumentError("halton2d policy: grid does not match D");
    return policies::order_halton_2d(rows_, cols_, state.masked_positions());
}

policies::Ordering HybridPolicy::order(const RoundContext& ctx, const MaskState& state,
                                       const policies::PositionProbs& conds, Rng& rng) {
    const auto explore = explore_->order(ctx, state, conds, rng);
    const auto exploit = exploit_->order(ctx, state, conds, rng);
    const int m = schedules::hybrid_m(ctx.n, ctx.N, ctx.k);
    return policies::merge_orderings(explore, exploit, ctx.k, std::min(m, ctx.k));
}

namespace {

RoundContext make_context(int n, int N, int k, const DriverOptions& opt) {
    RoundContext ctx;
    ctx.n = n;
    ctx.N = N;
    ctx.k = k;
    ctx.alpha_n = schedules::gumbel_temp(opt.alpha, n, N);
    ctx.beta_n = n == N ? 1.0 : dist::beta_from_alpha(ctx.alpha_n);
    ctx.final_round = n == N;
    ctx.noisy_final_selection = opt.noisy_final_selection;
    return ctx;
}

void check_ordering(const policies::Ordering& ordering, const MaskState& state) {
    const auto masked = state.masked_positions();
    if (ordering.positions.size() != masked.size()) {
        throw InternalError("policy returned an ordering of the wrong size");
    }
    std::vector<char> seen(static_cast<size_t>(state.D), 0);
    for (int pos : ordering.positions) {
        if (pos < 0 || pos >= state.D || !state.is_masked(pos)) {
            throw InternalError("policy returned a non-masked position");
        }
        if (seen[static_cast<size_t>(pos)]) {
            throw InternalError("policy returned a duplicate position");
        }
        seen[static_cast<size_t>(pos)] = 1;
    }
}

const dist::Categorical& cond_at(const policies::PositionProbs& conds, int pos) {
    const auto it = std::lower_bound(conds.begin(), conds.end(), pos,
                                     [](const auto& entry, int p) { return entry.first < p; });
    if (it == conds.end() || it->first != pos) {
        throw InternalError("conditional table is missing a masked position");
    }
    return it->second;
}

}  // namespace

GenerationTrace run_cts(const ProductModel& model, Policy& policy,
                        const schedules::UnmaskSchedule& schedule, const GammaSchedule& gamma,
                        Rng& rng, const DriverOptions& opt) {
    if (schedule.D != model.length()) throw ArgumentError("run_cts: schedule does not match model length");

    GenerationTrace trace;
    trace.D = model.length();
    trace.S = model.alphabet();
    trace.driver = "cts";
    trace.policy = policy.name();

    MaskState state = MaskState::all_masked(trace.D);
    for (int n = 1; n <= schedule.N; ++n) {
        const int k = schedule.step_size(n);
        const auto ctx = make_context(n, schedule.N, k, opt);
        RoundRecord rec;
        rec.n = n;
        rec.tau = ctx.alpha_n;
        rec.gamma = gamma.at(n, schedule.N);
        if (k > 0) {
            const auto conds = model.conditionals(state);
            auto ordering = policy.order(ctx, state, conds, rng);
            check_ordering(ordering, state);
            for (int l = 0; l < k; ++l) {
                const int pos = ordering.positions[static_cast<size_t>(l)];
                const int tok = dist::sample(dist::temper(cond_at(conds, pos), rec.gamma), rng);
                rec.indices.push_back(pos);
                rec.tokens.push_back(tok);
                rec.refreshed.push_back(0);
            }
            for (size_t l = 0; l < rec.indices.size(); ++l) {
                state.commit(rec.indices[l], rec.tokens[l]);
            }
        }
        trace.rounds.push_back(std::move(rec));
    }
    trace.sequence = state.tokens;
    return trace;
}

GenerationTrace run_maskgit_chain(const ProductModel& model,
                                  const schedules::UnmaskSchedule& schedule, double alpha,
                                  Rng& rng) {
    if (schedule.D != model.length()) {
        throw ArgumentError("run_maskgit_chain: schedule does not match model length");
    }
    GenerationTrace trace;
    trace.D = model.length();
    trace.S = model.alphabet();
    trace.driver = "maskgit-chain";
    trace.policy = "maskgit";

    MaskState state = MaskState::all_masked(trace.D);
    for (int n = 1; n <= schedule.N; ++n) {
        const int k = schedule.step_size(n);
        const double alpha_n = schedules::gumbel_temp(alpha, n, schedule.N);
        RoundRecord rec;
        rec.n = n;
        rec.tau = alpha_n;
        rec.gamma = 1.0;  // tokens are raw per-position draws
        if (k > 0) {
            const auto conds = model.conditionals(state);
            std::vector<dist::Categorical> ps;
            ps.reserve(conds.size());
            for (const auto& [pos, c] : conds) {
                (void)pos;
                ps.push_back(c);
            }
            const auto outcome = rounds::maskgit_round(ps, k, alpha_n, rng);
            for (int l = 0; l < k; ++l) {
                const int pos = conds[static_cast<size_t>(outcome.indices[static_cast<size_t>(l)])].first;
                rec.indices.push_back(pos);
                rec.tokens.push_back(outcome.tokens[static_cast<size_t>(l)]);
                rec.refreshed.push_back(0);
            }
            for (size_t l = 0; l < rec.indices.size(); ++l) {
                state.commit(rec.indices[l], rec.tokens[l]);
            }
        }
        trace.rounds.push_back(std::move(rec));
    }
    trace.sequence = state.tokens;
    return trace;
}

int CacheSplit::a_count(const schedules::UnmaskSchedule& schedule, const std::vector<int>& half,
                        int n, int k) const {
    switch (mode) {
        case Mode::none:
            return 0;
        case Mode::fraction:
            return std::clamp(schedules::round_half_away(fraction * k), 0, k);
        case Mode::half_schedule: {
            const int a = half[static_cast<size_t>(n - 1)] -
                          schedule.cumulative[static_cast<size_t>(n - 1)];
            return std::clamp(a, 0, k);
        }
    }
    return 0;
}

GenerationTrace run_cts_cached(const nanoformer::Model& model, Policy& policy,
                               const schedules::UnmaskSchedule& schedule,
                               const GammaSchedule& gamma, Rng& rng, const CacheSplit& split,
                               const DriverOptions& opt) {
    if (schedule.D != model.length()) {
        throw ArgumentError("run_cts_cached: schedule does not match model length");
    }
    GenerationTrace trace;
    trace.D = model.length();
    trace.S = model.alphabet();
    trace.driver = "cts-cached";
    trace.policy = policy.name();

    const auto half = schedules::half_step_counts(schedule);
    MaskState state = MaskState::all_masked(trace.D);
    for (int n = 1; n <= schedule.N; ++n) {
        const int k = schedule.step_size(n);
        const auto ctx = make_context(n, schedule.N, k, opt);
        RoundRecord rec;
        rec.n = n;
        rec.tau = ctx.alpha_n;
        rec.gamma = gamma.at(n, schedule.N);
        if (k > 0) {
            const auto fwd = nanoformer::full_forward(model.params(), state);
            policies::PositionProbs conds;
            for (int pos : state.masked_positions()) {
                conds.emplace_back(pos, fwd.conds[static_cast<size_t>(pos)]);
            }
            auto ordering = policy.order(ctx, state, conds, rng);
            check_ordering(ordering, state);

            const int a_n = split.a_count(schedule, half, n, k);
            std::vector<int> round_positions(ordering.positions.begin(),
                                             ordering.positions.begin() + k);
            std::vector<std::pair<int, int>> a_tokens;
            for (int l = 0; l < a_n; ++l) {
                const int pos = round_positions[static_cast<size_t>(l)];
                const int tok = dist::sample(dist::temper(cond_at(conds, pos), rec.gamma), rng);
                a_tokens.emplace_back(pos, tok);
                rec.indices.push_back(pos);
                rec.tokens.push_back(tok);
                rec.refreshed.push_back(0);
            }
            if (a_n < k) {
                const auto refreshed =
                    nanoformer::partial_forward(model.params(), fwd.cache, state, round_positions,
                                                a_tokens);
                const auto refreshed_at = [&refreshed](int pos) -> const dist::Categorical& {
                    const auto it = std::lower_bound(refreshed.positions.begin(),
                                                     refreshed.positions.end(), pos);
                    if (it == refreshed.positions.end() || *it != pos) {
                        throw InternalError("partial forward missed a refreshed position");
                    }
                    return refreshed.conds[static_cast<size_t>(it - refreshed.positions.begin())];
                };
                for (int l = a_n; l < k; ++l) {
                    const int pos = round_positions[static_cast<size_t>(l)];
                    const int tok = dist::sample(dist::temper(refreshed_at(pos), rec.gamma), rng);
                    rec.indices.push_back(pos);
                    rec.tokens.push_back(tok);
                    rec.refreshed.push_back(1);
                }
            }
            for (size_t l = 0; l < rec.indices.size(); ++l) {
                state.commit(rec.indices[l], rec.tokens[l]);
            }
        }
        trace.rounds.push_back(std::move(rec));
    }
    trace.sequence = state.tokens;
    return trace;
}

}  // namespace mdsampler::cts

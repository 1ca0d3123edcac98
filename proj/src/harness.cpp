#include "mdsampler/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mdsampler/cts.hpp"
#include "mdsampler/metrics.hpp"
#include "mdsampler/nanoformer.hpp"
#include "mdsampler/oracle.hpp"
#include "mdsampler/policies.hpp"
#include "mdsampler/rounds.hpp"
#include "mdsampler/schedules.hpp"

namespace mdsampler::harness {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string line;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) line += ",";
        line += csv_escape(fields[i]);
    }
    return line;
}

}  // namespace

void CsvTable::sort_rows() {
    std::sort(rows.begin(), rows.end());
}

void CsvTable::write(const std::string& path, const std::string& config_json) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("csv: cannot open for writing: " + path);
    out << "# config " << config_json << "\n";
    out << join_row(header) << "\n";
    for (const auto& row : rows) out << join_row(row) << "\n";
}

std::vector<std::string> read_csv_data_rows(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("csv: cannot open for reading: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) continue;
        lines.push_back(line);
    }
    if (lines.empty()) throw ArgumentError("csv: no header row in " + path);
    lines.erase(lines.begin());  // header
    return lines;
}

std::string read_csv_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("csv: cannot open for reading: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# config ", 0) != 0) {
        throw ArgumentError("csv: missing config line in " + path);
    }
    return line.substr(9);
}

void parallel_for(int total, int threads, const std::function<void(int)>& fn) {
    if (total <= 0) return;
    threads = std::max(1, std::min(threads, total));
    if (threads == 1) {
        for (int i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    std::atomic<bool> failed{false};
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            while (!failed.load(std::memory_order_relaxed)) {
                const int i = next.fetch_add(1);
                if (i >= total) break;
                try {
                    fn(i);
                } catch (...) {
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failed.load()) throw InternalError("parallel_for: a worker task threw");
}

// ---------------------------------------------------------------------------
// tv-curve
// ---------------------------------------------------------------------------

namespace {

// One shared family of per-position distributions; the instance for a given
// N is the first N members, so curves over N are nested rather than
// re-rolled.
std::vector<dist::Categorical> tv_curve_family(uint64_t seed, int S, int count) {
    std::vector<dist::Categorical> ps;
    ps.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        Rng rng = substream_rng(seed, "tv-curve/ps", static_cast<uint64_t>(i));
        std::vector<double> w(static_cast<size_t>(S));
        for (double& v : w) v = 0.05 + uniform01(rng);
        ps.push_back(dist::Categorical::from_weights(std::move(w)));
    }
    return ps;
}

}  // namespace

std::vector<TvCurveRow> tv_curve_rows(const TvCurveConfig& cfg) {
    if (cfg.mode != "exact" && cfg.mode != "montecarlo") {
        throw ArgumentError("tv-curve: mode must be exact or montecarlo");
    }
    const int max_n = *std::max_element(cfg.Ns.begin(), cfg.Ns.end());
    const auto family = tv_curve_family(cfg.seed, cfg.S, max_n);

    std::vector<TvCurveRow> rows;
    for (int N : cfg.Ns) {
        TvCurveRow row;
        row.N = N;
        row.bound = rounds::tv_theorem_bound(N, cfg.k, cfg.S, cfg.alpha);
        std::span<const dist::Categorical> ps(family.data(), static_cast<size_t>(N));
        try {
            const double beta = dist::beta_from_alpha(cfg.alpha);
            const auto moment = rounds::moment_round_exact_pmf(ps, cfg.k, cfg.alpha, beta);
            if (cfg.mode == "exact") {
                const auto maskgit = rounds::maskgit_round_exact_pmf(ps, cfg.k, cfg.alpha);
                row.tv = metrics::tv_exact(maskgit, moment);
            } else {
                metrics::EmpiricalPmf<rounds::RoundKey> emp;
                Rng rng = substream_rng(cfg.seed, "tv-curve/mc", static_cast<uint64_t>(N));
                for (long long d = 0; d < cfg.draws; ++d) {
                    auto outcome = rounds::maskgit_round(ps, cfg.k, cfg.alpha, rng);
                    emp.add(rounds::RoundKey{std::move(outcome.indices), std::move(outcome.tokens)});
                }
                row.tv = metrics::tv_empirical(emp, moment);
            }
        } catch (const CapacityError& e) {
            row.skipped = true;
            row.note = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void cmd_tv_curve(const TvCurveConfig& cfg) {
    const auto rows = tv_curve_rows(cfg);
    CsvTable table;
    table.header = {"N", "tv", "bound", "mode", "draws"};
    for (const auto& r : rows) {
        if (r.skipped) {
            std::cerr << "tv-curve: skipped N=" << r.N << ": " << r.note << "\n";
            continue;
        }
        table.rows.push_back({std::to_string(r.N), format_double(r.tv), format_double(r.bound),
                              cfg.mode, std::to_string(cfg.mode == "montecarlo" ? cfg.draws : 0)});
    }
    table.sort_rows();
    table.write(cfg.out, to_json(cfg));
}

// ---------------------------------------------------------------------------
// cts-experiment
// ---------------------------------------------------------------------------

namespace {

std::pair<int, int> grid_shape(int D) {
    int rows = 1;
    for (int r = 1; r * r <= D; ++r) {
        if (D % r == 0) rows = r;
    }
    return {rows, D / rows};
}

std::unique_ptr<cts::Policy> make_policy(const std::string& name, int D) {
    if (name == "random") return std::make_unique<cts::RandomPolicy>();
    if (name == "confidence") return std::make_unique<cts::ConfidencePolicy>();
    if (name == "moment") return std::make_unique<cts::MomentPolicy>();
    if (name == "halton") return std::make_unique<cts::Halton1dPolicy>();
    if (name == "halton2d") {
        const auto [rows, cols] = grid_shape(D);
        return std::make_unique<cts::Halton2dPolicy>(rows, cols);
    }
    if (name == "hybrid") {
        return std::make_unique<cts::HybridPolicy>(std::make_unique<cts::Halton1dPolicy>(),
                                                   std::make_unique<cts::MomentPolicy>());
    }
    throw ArgumentError("unknown policy: " + name);
}

struct Combo {
    std::string driver;
    std::string policy;  // "maskgit" for the maskgit-chain driver
    double gamma = 1.0;  // < 0 means the emulation schedule
    double alpha = 6.0;
    int steps = 1;

    std::string key() const {
        std::string g = gamma < 0.0 ? "emulated" : format_double(gamma);
        return driver + "/" + policy + "/g" + g + "/a" + format_double(alpha) + "/s" +
               std::to_string(steps);
    }
};

struct RepResult {
    double entropy = 0.0;
    size_t outcome = 0;  // joint-table cell of the final sequence
    std::string trace_json;
};

cts::CacheSplit parse_cache_split(const std::string& text) {
    cts::CacheSplit split;
    if (text == "half") {
        split.mode = cts::CacheSplit::Mode::half_schedule;
    } else if (text == "none") {
        split.mode = cts::CacheSplit::Mode::none;
    } else if (text.rfind("fraction:", 0) == 0) {
        split.mode = cts::CacheSplit::Mode::fraction;
        split.fraction = std::stod(text.substr(9));
        if (!(split.fraction >= 0.0 && split.fraction <= 1.0)) {
            throw ArgumentError("cache_split fraction must be in [0, 1]");
        }
    } else {
        throw ArgumentError("cache_split must be half, none, or fraction:<f>");
    }
    return split;
}

}  // namespace

void cmd_cts_experiment(const CtsExperimentConfig& cfg) {
    if (cfg.reps < 1) throw ArgumentError("cts-experiment: reps must be >= 1");
    const auto schedule_kind = schedules::kind_from_string(cfg.schedule);
    const auto split = parse_cache_split(cfg.cache_split);

    // Model: one per config, shared read-only across the sweep.
    std::unique_ptr<oracle::JointTable> table;
    std::unique_ptr<cts::ProductModel> model;
    std::unique_ptr<nanoformer::Model> nano;
    if (cfg.model == "table") {
        if (!cfg.table_path.empty()) {
            table = std::make_unique<oracle::JointTable>(oracle::JointTable::load(cfg.table_path));
        } else {
            Rng rng = substream_rng(cfg.seed, "cts-experiment/table", 0);
            table = std::make_unique<oracle::JointTable>(
                oracle::JointTable::random(cfg.D, cfg.S, rng));
        }
        model = std::make_unique<oracle::TableModel>(*table);
    } else if (cfg.model == "transformer") {
        nanoformer::Hyperparams hp;
        hp.layers = cfg.layers;
        hp.d_model = cfg.d_model;
        hp.d_k = cfg.d_k;
        hp.d_ff = cfg.d_ff;
        hp.vocab = cfg.S;
        hp.seq_len = cfg.D;
        nano = std::make_unique<nanoformer::Model>(
            nanoformer::init_params(substream_seed(cfg.seed, "cts-experiment/model", 0), hp));
    } else {
        throw ArgumentError("cts-experiment: model must be transformer or table");
    }
    const cts::ProductModel& base_model = nano ? static_cast<cts::ProductModel&>(*nano)
                                               : *model;
    const int D = base_model.length();

    // Build the sweep.
    std::vector<Combo> combos;
    const std::vector<double> gammas =
        cfg.gamma_mode == "maskgit" ? std::vector<double>{-1.0} : cfg.gammas;
    if (cfg.gamma_mode != "maskgit" && cfg.gamma_mode != "constant") {
        throw ArgumentError("cts-experiment: gamma_mode must be constant or maskgit");
    }
    for (const auto& driver : cfg.drivers) {
        if (driver == "maskgit-chain") {
            for (double alpha : cfg.alphas) {
                for (int steps : cfg.steps) combos.push_back({driver, "maskgit", 1.0, alpha, steps});
            }
        } else if (driver == "cts" || driver == "cts-cached") {
            if (driver == "cts-cached" && nano == nullptr) {
                throw ArgumentError("cts-experiment: cts-cached needs the transformer model");
            }
            for (const auto& policy : cfg.policies) {
                for (double gamma : gammas) {
                    for (double alpha : cfg.alphas) {
                        for (int steps : cfg.steps) combos.push_back({driver, policy, gamma, alpha, steps});
                    }
                }
            }
        } else {
            throw ArgumentError("unknown driver: " + driver);
        }
    }

    CsvTable out;
    out.header = {"driver", "policy",   "schedule",        "steps",        "gamma",
                  "alpha",  "reps",     "D",               "S",            "mean_entropy_nats",
                  "mean_entropy_bits",  "min_entropy_nats", "max_entropy_nats", "tv_exact",
                  "tv_empirical",       "tv_scale"};

    nlohmann::json traces = nlohmann::json::array();

    for (const auto& combo : combos) {
        const auto schedule = schedules::unmask_counts(schedule_kind, D, combo.steps);
        const auto run_one = [&](int rep) -> RepResult {
            Rng rng = substream_rng(cfg.seed, "cts-experiment/" + combo.key(),
                                    static_cast<uint64_t>(rep));
            cts::GenerationTrace trace;
            if (combo.driver == "maskgit-chain") {
                trace = cts::run_maskgit_chain(base_model, schedule, combo.alpha, rng);
            } else {
                const auto policy = make_policy(combo.policy, D);
                const auto gamma = combo.gamma < 0.0
                                       ? cts::GammaSchedule::maskgit_emulation(combo.alpha)
                                       : cts::GammaSchedule::constant(combo.gamma);
                cts::DriverOptions opt;
                opt.alpha = combo.alpha;
                if (combo.driver == "cts-cached") {
                    trace = cts::run_cts_cached(*nano, *policy, schedule, gamma, rng, split, opt);
                } else {
                    trace = cts::run_cts(base_model, *policy, schedule, gamma, rng, opt);
                }
            }
            RepResult r;
            r.entropy = metrics::sequence_entropy(trace.sequence);
            if (table) r.outcome = table->index_of(trace.sequence);
            if (rep < cfg.traces_limit && !cfg.traces_out.empty()) {
                r.trace_json = cts::trace_to_json(trace);
            }
            return r;
        };

        std::vector<RepResult> results(static_cast<size_t>(cfg.reps));
        parallel_for(cfg.reps, cfg.threads, [&](int rep) { results[static_cast<size_t>(rep)] = run_one(rep); });

        // Aggregate in replication order: layout-independent by construction.
        KahanSum mean_acc;
        double min_h = results.front().entropy;
        double max_h = results.front().entropy;
        metrics::EmpiricalPmf<size_t> emp;
        for (const auto& r : results) {
            mean_acc.add(r.entropy);
            min_h = std::min(min_h, r.entropy);
            max_h = std::max(max_h, r.entropy);
            if (table) emp.add(r.outcome);
        }
        const double mean_h = mean_acc.value() / cfg.reps;

        std::string tv_exact_field;
        std::string tv_emp_field;
        std::string tv_scale_field;
        if (table) {
            std::map<size_t, double> joint;
            for (size_t t = 0; t < table->size(); ++t) joint[t] = table->probs()[t];
            tv_emp_field = format_double(metrics::tv_empirical(emp, joint));
            tv_scale_field = format_double(metrics::tv_estimation_scale(table->size(), cfg.reps));
            const bool exact_ok = combo.driver == "cts" && combo.policy == "random" &&
                                  combo.steps == D && combo.gamma >= 0.0;
            if (exact_ok) {
                std::vector<double> per_step(static_cast<size_t>(D), combo.gamma);
                per_step.back() = 1.0;  // drivers force the final round unbiased
                const auto kernel = [](const cts::MaskState& state) {
                    const size_t m = state.masked_positions().size();
                    return std::vector<double>(m, 1.0 / static_cast<double>(m));
                };
                const auto law = oracle::exact_cts_distribution(*table, kernel, per_step);
                tv_exact_field = format_double(metrics::tv_exact(law, table->probs()));
            }
        }

        out.rows.push_back({combo.driver, combo.policy, cfg.schedule, std::to_string(combo.steps),
                            combo.gamma < 0.0 ? "emulated" : format_double(combo.gamma),
                            format_double(combo.alpha), std::to_string(cfg.reps),
                            std::to_string(D), std::to_string(base_model.alphabet()),
                            format_double(mean_h), format_double(metrics::nats_to_bits(mean_h)),
                            format_double(min_h), format_double(max_h), tv_exact_field,
                            tv_emp_field, tv_scale_field});

        if (!cfg.traces_out.empty()) {
            for (int rep = 0; rep < cfg.reps && rep < cfg.traces_limit; ++rep) {
                nlohmann::json entry;
                entry["combo"] = combo.key();
                entry["rep"] = rep;
                entry["trace"] = nlohmann::json::parse(results[static_cast<size_t>(rep)].trace_json);
                traces.push_back(std::move(entry));
            }
        }
    }

    out.sort_rows();
    out.write(cfg.out, to_json(cfg));
    if (!cfg.traces_out.empty()) {
        std::ofstream tf(cfg.traces_out, std::ios::binary);
        if (!tf) throw ArgumentError("cts-experiment: cannot open traces file: " + cfg.traces_out);
        nlohmann::json doc;
        doc["config"] = nlohmann::json::parse(to_json(cfg));
        doc["traces"] = std::move(traces);
        tf << doc.dump(2) << "\n";
    }
}

// ---------------------------------------------------------------------------
// cache-demo
// ---------------------------------------------------------------------------

std::vector<CacheDemoRow> cache_demo_rows(const CacheDemoConfig& cfg) {
    if (cfg.trials < 1) throw ArgumentError("cache-demo: trials must be >= 1");
    std::vector<CacheDemoRow> rows;
    for (int L : cfg.layers_list) {
        nanoformer::Hyperparams hp;
        hp.layers = L;
        hp.d_model = cfg.d_model;
        hp.d_k = cfg.d_k;
        hp.d_ff = cfg.d_ff;
        hp.vocab = cfg.S;
        hp.seq_len = cfg.D;
        const auto params = nanoformer::init_params(
            substream_seed(cfg.seed, "cache-demo/params", static_cast<uint64_t>(L)), hp);

        for (double frac : cfg.a_fractions) {
            CacheDemoRow row;
            row.layers = L;
            row.a_fraction = frac;
            row.trials = cfg.trials;
            KahanSum err_ref, err_stale, ratio_acc;
            for (int t = 0; t < cfg.trials; ++t) {
                Rng rng = substream_rng(cfg.seed,
                                        "cache-demo/trial/L" + std::to_string(L) + "/f" +
                                            format_double(frac),
                                        static_cast<uint64_t>(t));
                // Random partially unmasked state.
                const int masked_count =
                    std::clamp(schedules::round_half_away(cfg.masked_fraction * cfg.D), 2, cfg.D);
                std::vector<int> all_positions(static_cast<size_t>(cfg.D));
                std::iota(all_positions.begin(), all_positions.end(), 0);
                const auto perm = policies::order_random(all_positions, rng);
                cts::MaskState state = cts::MaskState::all_masked(cfg.D);
                for (int i = masked_count; i < cfg.D; ++i) {
                    state.commit(perm.positions[static_cast<size_t>(i)],
                                 static_cast<int>(uniform01(rng) * cfg.S));
                }
                std::vector<int> masked(perm.positions.begin(), perm.positions.begin() + masked_count);
                const int i_count =
                    std::clamp(schedules::round_half_away(cfg.i_fraction * masked_count), 1,
                               masked_count);
                std::vector<int> I(masked.begin(), masked.begin() + i_count);
                int a_count = std::clamp(schedules::round_half_away(frac * i_count), 0, i_count);
                if (a_count == i_count) a_count = i_count - 1;  // keep B nonempty

                nanoformer::FlopCounter flops_full, flops_partial;
                const auto full = nanoformer::full_forward(params, state, &flops_full);
                std::vector<std::pair<int, int>> a_tokens;
                for (int l = 0; l < a_count; ++l) {
                    const int pos = I[static_cast<size_t>(l)];
                    a_tokens.emplace_back(pos,
                                          dist::sample(full.conds[static_cast<size_t>(pos)], rng));
                }
                const auto refreshed = nanoformer::partial_forward(params, full.cache, state, I,
                                                                   a_tokens, &flops_partial);

                cts::MaskState committed = state;
                for (const auto& [pos, tok] : a_tokens) committed.commit(pos, tok);
                const auto fresh = nanoformer::full_forward(params, committed);

                double e_ref = 0.0;
                double e_stale = 0.0;
                for (size_t b = 0; b < refreshed.positions.size(); ++b) {
                    const int pos = refreshed.positions[b];
                    for (int x = 0; x < cfg.S; ++x) {
                        const double truth = fresh.logits[static_cast<size_t>(pos)][static_cast<size_t>(x)];
                        e_ref = std::max(e_ref, std::abs(refreshed.logits[b][static_cast<size_t>(x)] - truth));
                        e_stale = std::max(e_stale,
                                           std::abs(full.logits[static_cast<size_t>(pos)][static_cast<size_t>(x)] - truth));
                    }
                }
                err_ref.add(e_ref);
                err_stale.add(e_stale);
                if (e_ref < e_stale) row.refreshed_wins += 1;
                ratio_acc.add(static_cast<double>(flops_full.attention + flops_partial.attention) /
                              static_cast<double>(flops_full.attention));
            }
            row.err_refreshed_mean = err_ref.value() / cfg.trials;
            row.err_stale_mean = err_stale.value() / cfg.trials;
            row.flop_ratio = ratio_acc.value() / cfg.trials;
            rows.push_back(row);
        }
    }
    return rows;
}

void cmd_cache_demo(const CacheDemoConfig& cfg) {
    const auto rows = cache_demo_rows(cfg);
    CsvTable table;
    table.header = {"layers",          "a_fraction",     "err_refreshed_mean", "err_stale_mean",
                    "refreshed_wins",  "trials",         "flop_ratio"};
    for (const auto& r : rows) {
        table.rows.push_back({std::to_string(r.layers), format_double(r.a_fraction),
                              format_double(r.err_refreshed_mean), format_double(r.err_stale_mean),
                              std::to_string(r.refreshed_wins), std::to_string(r.trials),
                              format_double(r.flop_ratio)});
    }
    table.sort_rows();
    table.write(cfg.out, to_json(cfg));
}

// ---------------------------------------------------------------------------
// schedule-dump
// ---------------------------------------------------------------------------

void cmd_schedule_dump(const ScheduleDumpConfig& cfg) {
    const auto schedule = schedules::unmask_counts(schedules::kind_from_string(cfg.kind), cfg.D, cfg.N);
    CsvTable table;
    table.header = {"n", "J_n", "I_n", "tau_n"};
    for (int n = 1; n <= cfg.N; ++n) {
        table.rows.push_back({std::to_string(n),
                              std::to_string(schedule.cumulative[static_cast<size_t>(n)]),
                              std::to_string(schedule.step_size(n)),
                              format_double(schedules::gumbel_temp(cfg.alpha, n, cfg.N))});
    }
    // Rows are already in n order; sorting would compare "10" < "2".
    table.write(cfg.out, to_json(cfg));
}

// ---------------------------------------------------------------------------
// Config JSON
// ---------------------------------------------------------------------------

namespace {

template <typename T>
void maybe_get(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string to_json(const TvCurveConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["k"] = c.k;
    j["S"] = c.S;
    j["alpha"] = c.alpha;
    j["Ns"] = c.Ns;
    j["mode"] = c.mode;
    j["draws"] = c.draws;
    j["out"] = c.out;
    return j.dump();
}

void from_json_overlay(const std::string& text, TvCurveConfig& c) {
    const auto j = nlohmann::json::parse(text);
    maybe_get(j, "seed", c.seed);
    maybe_get(j, "k", c.k);
    maybe_get(j, "S", c.S);
    maybe_get(j, "alpha", c.alpha);
    maybe_get(j, "Ns", c.Ns);
    maybe_get(j, "mode", c.mode);
    maybe_get(j, "draws", c.draws);
    maybe_get(j, "out", c.out);
}

std::string to_json(const CtsExperimentConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["model"] = c.model;
    j["table_path"] = c.table_path;
    j["D"] = c.D;
    j["S"] = c.S;
    j["layers"] = c.layers;
    j["d_model"] = c.d_model;
    j["d_k"] = c.d_k;
    j["d_ff"] = c.d_ff;
    j["schedule"] = c.schedule;
    j["drivers"] = c.drivers;
    j["policies"] = c.policies;
    j["gamma_mode"] = c.gamma_mode;
    j["gammas"] = c.gammas;
    j["alphas"] = c.alphas;
    j["steps"] = c.steps;
    j["reps"] = c.reps;
    j["threads"] = c.threads;
    j["traces_limit"] = c.traces_limit;
    j["cache_split"] = c.cache_split;
    j["out"] = c.out;
    j["traces_out"] = c.traces_out;
    return j.dump();
}

void from_json_overlay(const std::string& text, CtsExperimentConfig& c) {
    const auto j = nlohmann::json::parse(text);
    maybe_get(j, "seed", c.seed);
    maybe_get(j, "model", c.model);
    maybe_get(j, "table_path", c.table_path);
    maybe_get(j, "D", c.D);
    maybe_get(j, "S", c.S);
    maybe_get(j, "layers", c.layers);
    maybe_get(j, "d_model", c.d_model);
    maybe_get(j, "d_k", c.d_k);
    maybe_get(j, "d_ff", c.d_ff);
    maybe_get(j, "schedule", c.schedule);
    maybe_get(j, "drivers", c.drivers);
    maybe_get(j, "policies", c.policies);
    maybe_get(j, "gamma_mode", c.gamma_mode);
    maybe_get(j, "gammas", c.gammas);
    maybe_get(j, "alphas", c.alphas);
    maybe_get(j, "steps", c.steps);
    maybe_get(j, "reps", c.reps);
    maybe_get(j, "threads", c.threads);
    maybe_get(j, "traces_limit", c.traces_limit);
    maybe_get(j, "cache_split", c.cache_split);
    maybe_get(j, "out", c.out);
    maybe_get(j, "traces_out", c.traces_out);
}

std::string to_json(const CacheDemoConfig& c) {
    nlohmann::json j;
    j["seed"] = c.seed;
    j["layers_list"] = c.layers_list;
    j["D"] = c.D;
    j["S"] = c.S;
    j["d_model"] = c.d_model;
    j["d_k"] = c.d_k;
    j["d_ff"] = c.d_ff;
    j["trials"] = c.trials;
    j["a_fractions"] = c.a_fractions;
    j["masked_fraction"] = c.masked_fraction;
    j["i_fraction"] = c.i_fraction;
    j["out"] = c.out;
    return j.dump();
}

void from_json_overlay(const std::string& text, CacheDemoConfig& c) {
    const auto j = nlohmann::json::parse(text);
    maybe_get(j, "seed", c.seed);
    maybe_get(j, "layers_list", c.layers_list);
    maybe_get(j, "D", c.D);
    maybe_get(j, "S", c.S);
    maybe_get(j, "d_model", c.d_model);
    maybe_get(j, "d_k", c.d_k);
    maybe_get(j, "d_ff", c.d_ff);
    maybe_get(j, "trials", c.trials);
    maybe_get(j, "a_fractions", c.a_fractions);
    maybe_get(j, "masked_fraction", c.masked_fraction);
    maybe_get(j, "i_fraction", c.i_fraction);
    maybe_get(j, "out", c.out);
}

std::string to_json(const ScheduleDumpConfig& c) {
    nlohmann::json j;
    j["kind"] = c.kind;
    j["D"] = c.D;
    j["N"] = c.N;
    j["alpha"] = c.alpha;
    j["out"] = c.out;
    return j.dump();
}

void from_json_overlay(const std::string& text, ScheduleDumpConfig& c) {
    const auto j = nlohmann::json::parse(text);
    maybe_get(j, "kind", c.kind);
    maybe_get(j, "D", c.D);
    maybe_get(j, "N", c.N);
    maybe_get(j, "alpha", c.alpha);
    maybe_get(j, "out", c.out);
}

}  // namespace mdsampler::harness

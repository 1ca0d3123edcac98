// mdsampler: verification harness and experiment runner for masked-diffusion
// sampling. Subcommands: verify, tv-curve, cts-experiment, cache-demo,
// schedule-dump. Flags override values from an optional JSON --config file.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdsampler/common.hpp"
#include "mdsampler/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw mdsampler::ArgumentError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    using namespace mdsampler;

    CLI::App app{"masked-diffusion sampler verification harness"};
    app.require_subcommand(1);

    // verify ----------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run property suites");
    std::string suite = "all";
    uint64_t verify_seed = 20240501;
    verify->add_option("--suite", suite, "suite name or 'all'");
    verify->add_option("--seed", verify_seed, "master seed");

    // tv-curve ---------------------------------------------------------------
    auto* tvc = app.add_subcommand("tv-curve", "sampler-gap curve against the closed-form bound");
    harness::TvCurveConfig tv_flags;
    std::string tv_config_path;
    tvc->add_option("--k", tv_flags.k);
    tvc->add_option("--S", tv_flags.S);
    tvc->add_option("--alpha", tv_flags.alpha);
    tvc->add_option("--N", tv_flags.Ns, "list of N values");
    tvc->add_option("--mode", tv_flags.mode, "exact | montecarlo");
    tvc->add_option("--draws", tv_flags.draws);
    tvc->add_option("--seed", tv_flags.seed);
    tvc->add_option("--out", tv_flags.out);
    tvc->add_option("--config", tv_config_path, "JSON config file");

    // cts-experiment ----------------------------------------------------------
    auto* ctse = app.add_subcommand("cts-experiment", "policy/temperature/steps sweep");
    harness::CtsExperimentConfig ce_flags;
    std::string ce_config_path;
    ctse->add_option("--model", ce_flags.model, "transformer | table");
    ctse->add_option("--table", ce_flags.table_path, "JSON joint table path");
    ctse->add_option("--D", ce_flags.D);
    ctse->add_option("--S", ce_flags.S);
    ctse->add_option("--layers", ce_flags.layers);
    ctse->add_option("--d-model", ce_flags.d_model);
    ctse->add_option("--d-k", ce_flags.d_k);
    ctse->add_option("--d-ff", ce_flags.d_ff);
    ctse->add_option("--schedule", ce_flags.schedule, "uniform | cosine");
    ctse->add_option("--driver", ce_flags.drivers, "cts | maskgit-chain | cts-cached");
    ctse->add_option("--policy", ce_flags.policies,
                     "random | confidence | moment | halton | halton2d | hybrid");
    ctse->add_option("--gamma-mode", ce_flags.gamma_mode, "constant | maskgit");
    ctse->add_option("--gamma", ce_flags.gammas, "token exponents to sweep");
    ctse->add_option("--alpha", ce_flags.alphas, "noise temperatures to sweep");
    ctse->add_option("--steps", ce_flags.steps, "step counts to sweep");
    ctse->add_option("--reps", ce_flags.reps);
    ctse->add_option("--threads", ce_flags.threads);
    ctse->add_option("--traces-limit", ce_flags.traces_limit);
    ctse->add_option("--cache-split", ce_flags.cache_split, "half | none | fraction:<f>");
    ctse->add_option("--seed", ce_flags.seed);
    ctse->add_option("--out", ce_flags.out);
    ctse->add_option("--traces-out", ce_flags.traces_out);
    ctse->add_option("--config", ce_config_path, "JSON config file");

    // cache-demo ---------------------------------------------------------------
    auto* cd = app.add_subcommand("cache-demo", "partial-forward error and cost accounting");
    harness::CacheDemoConfig cd_flags;
    std::string cd_config_path;
    cd->add_option("--L", cd_flags.layers_list, "layer counts");
    cd->add_option("--D", cd_flags.D);
    cd->add_option("--S", cd_flags.S);
    cd->add_option("--d-model", cd_flags.d_model);
    cd->add_option("--d-k", cd_flags.d_k);
    cd->add_option("--d-ff", cd_flags.d_ff);
    cd->add_option("--trials", cd_flags.trials);
    cd->add_option("--a-fraction", cd_flags.a_fractions, "commit fractions");
    cd->add_option("--masked-fraction", cd_flags.masked_fraction);
    cd->add_option("--i-fraction", cd_flags.i_fraction);
    cd->add_option("--seed", cd_flags.seed);
    cd->add_option("--out", cd_flags.out);
    cd->add_option("--config", cd_config_path, "JSON config file");

    // schedule-dump ---------------------------------------------------------------
    auto* sd = app.add_subcommand("schedule-dump", "dump a schedule as CSV");
    harness::ScheduleDumpConfig sd_flags;
    std::string sd_config_path;
    sd->add_option("--kind", sd_flags.kind, "uniform | cosine");
    sd->add_option("--D", sd_flags.D);
    sd->add_option("--N", sd_flags.N);
    sd->add_option("--alpha", sd_flags.alpha);
    sd->add_option("--out", sd_flags.out);
    sd->add_option("--config", sd_config_path, "JSON config file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (verify->parsed()) {
            return harness::cmd_verify(suite, verify_seed);
        }
        if (tvc->parsed()) {
            harness::TvCurveConfig cfg;
            if (!tv_config_path.empty()) harness::from_json_overlay(slurp(tv_config_path), cfg);
            if (tvc->count("--k")) cfg.k = tv_flags.k;
            if (tvc->count("--S")) cfg.S = tv_flags.S;
            if (tvc->count("--alpha")) cfg.alpha = tv_flags.alpha;
            if (tvc->count("--N")) cfg.Ns = tv_flags.Ns;
            if (tvc->count("--mode")) cfg.mode = tv_flags.mode;
            if (tvc->count("--draws")) cfg.draws = tv_flags.draws;
            if (tvc->count("--seed")) cfg.seed = tv_flags.seed;
            if (tvc->count("--out")) cfg.out = tv_flags.out;
            harness::cmd_tv_curve(cfg);
            return 0;
        }
        if (ctse->parsed()) {
            harness::CtsExperimentConfig cfg;
            if (!ce_config_path.empty()) harness::from_json_overlay(slurp(ce_config_path), cfg);
            if (ctse->count("--model")) cfg.model = ce_flags.model;
            if (ctse->count("--table")) cfg.table_path = ce_flags.table_path;
            if (ctse->count("--D")) cfg.D = ce_flags.D;
            if (ctse->count("--S")) cfg.S = ce_flags.S;
            if (ctse->count("--layers")) cfg.layers = ce_flags.layers;
            if (ctse->count("--d-model")) cfg.d_model = ce_flags.d_model;
            if (ctse->count("--d-k")) cfg.d_k = ce_flags.d_k;
            if (ctse->count("--d-ff")) cfg.d_ff = ce_flags.d_ff;
            if (ctse->count("--schedule")) cfg.schedule = ce_flags.schedule;
            if (ctse->count("--driver")) cfg.drivers = ce_flags.drivers;
            if (ctse->count("--policy")) cfg.policies = ce_flags.policies;
            if (ctse->count("--gamma-mode")) cfg.gamma_mode = ce_flags.gamma_mode;
            if (ctse->count("--gamma")) cfg.gammas = ce_flags.gammas;
            if (ctse->count("--alpha")) cfg.alphas = ce_flags.alphas;
            if (ctse->count("--steps")) cfg.steps = ce_flags.steps;
            if (ctse->count("--reps")) cfg.reps = ce_flags.reps;
            if (ctse->count("--threads")) cfg.threads = ce_flags.threads;
            if (ctse->count("--traces-limit")) cfg.traces_limit = ce_flags.traces_limit;
            if (ctse->count("--cache-split")) cfg.cache_split = ce_flags.cache_split;
            if (ctse->count("--seed")) cfg.seed = ce_flags.seed;
            if (ctse->count("--out")) cfg.out = ce_flags.out;
            if (ctse->count("--traces-out")) cfg.traces_out = ce_flags.traces_out;
            harness::cmd_cts_experiment(cfg);
            return 0;
        }
        if (cd->parsed()) {
            harness::CacheDemoConfig cfg;
            if (!cd_config_path.empty()) harness::from_json_overlay(slurp(cd_config_path), cfg);
            if (cd->count("--L")) cfg.layers_list = cd_flags.layers_list;
            if (cd->count("--D")) cfg.D = cd_flags.D;
            if (cd->count("--S")) cfg.S = cd_flags.S;
            if (cd->count("--d-model")) cfg.d_model = cd_flags.d_model;
            if (cd->count("--d-k")) cfg.d_k = cd_flags.d_k;
            if (cd->count("--d-ff")) cfg.d_ff = cd_flags.d_ff;
            if (cd->count("--trials")) cfg.trials = cd_flags.trials;
            if (cd->count("--a-fraction")) cfg.a_fractions = cd_flags.a_fractions;
            if (cd->count("--masked-fraction")) cfg.masked_fraction = cd_flags.masked_fraction;
            if (cd->count("--i-fraction")) cfg.i_fraction = cd_flags.i_fraction;
            if (cd->count("--seed")) cfg.seed = cd_flags.seed;
            if (cd->count("--out")) cfg.out = cd_flags.out;
            harness::cmd_cache_demo(cfg);
            return 0;
        }
        if (sd->parsed()) {
            harness::ScheduleDumpConfig cfg;
            if (!sd_config_path.empty()) harness::from_json_overlay(slurp(sd_config_path), cfg);
            if (sd->count("--kind")) cfg.kind = sd_flags.kind;
            if (sd->count("--D")) cfg.D = sd_flags.D;
            if (sd->count("--N")) cfg.N = sd_flags.N;
            if (sd->count("--alpha")) cfg.alpha = sd_flags.alpha;
            if (sd->count("--out")) cfg.out = sd_flags.out;
            harness::cmd_schedule_dump(cfg);
            return 0;
        }
    } catch (const ArgumentError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

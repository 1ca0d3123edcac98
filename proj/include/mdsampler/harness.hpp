#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdsampler/common.hpp"

namespace mdsampler::harness {

// ---------------------------------------------------------------------------
// CSV emission. Files carry one `# config {...}` metadata line, then an
// RFC-4180 header row and data rows. Data rows are fully determined by the
// embedded config, independent of thread count.
// ---------------------------------------------------------------------------

std::string format_double(double v);  // %.17g, enough digits to round-trip

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void sort_rows();
    void write(const std::string& path, const std::string& config_json) const;
};

// Data rows of a CSV written by CsvTable::write (everything after the header).
std::vector<std::string> read_csv_data_rows(const std::string& path);
// The embedded config line, stripped of the "# config " prefix.
std::string read_csv_config(const std::string& path);

// Runs fn(0..total-1) on `threads` workers. Callers must write results into
// per-index slots; aggregation happens afterwards in index order.
void parallel_for(int total, int threads, const std::function<void(int)>& fn);

// ---------------------------------------------------------------------------
// verify: property suites
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

std::vector<std::string> suite_names();
std::vector<CheckResult> run_suite(const std::string& suite, uint64_t seed);

// Prints a pass/fail table; returns 0 when everything passed, 1 otherwise.
// An unknown suite name is an ArgumentError (usage error at the CLI).
int cmd_verify(const std::string& suite_filter, uint64_t seed);

// ---------------------------------------------------------------------------
// tv-curve: exact or Monte Carlo total variation between the two round
// samplers against the closed-form bound, as N grows.
// ---------------------------------------------------------------------------

struct TvCurveConfig {
    uint64_t seed = 12345;
    int k = 1;
    int S = 2;
    double alpha = 1.0;
    std::vector<int> Ns = {4, 8, 12, 16};
    std::string mode = "exact";  // exact | montecarlo
    long long draws = 1000000;
    std::string out = "tv_curve.csv";
};

struct TvCurveRow {
    int N = 0;
    double tv = 0.0;
    double bound = 0.0;
    bool skipped = false;  // capacity guard hit
    std::string note;
};

std::vector<TvCurveRow> tv_curve_rows(const TvCurveConfig& cfg);
void cmd_tv_curve(const TvCurveConfig& cfg);

// ---------------------------------------------------------------------------
// cts-experiment: sweep (driver x policy x gamma x alpha x steps) on a
// transformer- or table-backed model; emits per-combo sequence-entropy
// statistics and, for tables, TV against the true joint.
// ---------------------------------------------------------------------------

struct CtsExperimentConfig {
    uint64_t seed = 12345;
    std::string model = "transformer";  // transformer | table
    std::string table_path;             // optional JSON joint table
    int D = 24;
    int S = 12;
    int layers = 2;
    int d_model = 32;
    int d_k = 16;
    int d_ff = 64;
    std::string schedule = "uniform";  // uniform | cosine
    std::vector<std::string> drivers = {"cts"};
    std::vector<std::string> policies = {"random"};
    std::string gamma_mode = "constant";  // constant | maskgit
    std::vector<double> gammas = {1.0};
    std::vector<double> alphas = {6.0};
    std::vector<int> steps = {8};
    int reps = 256;
    int threads = 1;
    int traces_limit = 4;
    std::string cache_split = "half";  // half | none | fraction:<f>
    std::string out = "cts_experiment.csv";
    std::string traces_out;
};

void cmd_cts_experiment(const CtsExperimentConfig& cfg);

// ---------------------------------------------------------------------------
// cache-demo: refreshed-vs-stale conditional error and attention-cost ratio
// of the partial forward across depths and commit fractions.
// ---------------------------------------------------------------------------

struct CacheDemoConfig {
    uint64_t seed = 12345;
    std::vector<int> layers_list = {1, 2, 3};
    int D = 32;
    int S = 16;
    int d_model = 32;
    int d_k = 16;
    int d_ff = 64;
    int trials = 50;
    std::vector<double> a_fractions = {0.0, 0.5};
    double masked_fraction = 0.5;  // masked share of positions in test states
    double i_fraction = 0.5;       // |I| as a share of the masked set
    std::string out = "cache_demo.csv";
};

struct CacheDemoRow {
    int layers = 0;
    double a_fraction = 0.0;
    double err_refreshed_mean = 0.0;
    double err_stale_mean = 0.0;
    int refreshed_wins = 0;  // trials where refreshed error < stale error
    int trials = 0;
    double flop_ratio = 0.0;  // (full + partial) attention flops / full
};

std::vector<CacheDemoRow> cache_demo_rows(const CacheDemoConfig& cfg);
void cmd_cache_demo(const CacheDemoConfig& cfg);

// ---------------------------------------------------------------------------
// schedule-dump: (n, |J_n|, |I_n|, tau_n) rows for one schedule.
// ---------------------------------------------------------------------------

struct ScheduleDumpConfig {
    std::string kind = "cosine";
    int D = 32;
    int N = 8;
    double alpha = 6.0;
    std::string out = "schedule.csv";
};

void cmd_schedule_dump(const ScheduleDumpConfig& cfg);

// JSON round-trips used by the CLI --config file and the embedded metadata.
std::string to_json(const TvCurveConfig& cfg);
std::string to_json(const CtsExperimentConfig& cfg);
std::string to_json(const CacheDemoConfig& cfg);
std::string to_json(const ScheduleDumpConfig& cfg);
void from_json_overlay(const std::string& text, TvCurveConfig& cfg);
void from_json_overlay(const std::string& text, CtsExperimentConfig& cfg);
void from_json_overlay(const std::string& text, CacheDemoConfig& cfg);
void from_json_overlay(const std::string& text, ScheduleDumpConfig& cfg);

}  // namespace mdsampler::harness

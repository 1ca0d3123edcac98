#pragma once

#include <string>
#include <vector>

#include "mdsampler/common.hpp"

namespace mdsampler::schedules {

enum class Kind { cosine, uniform };

Kind kind_from_string(const std::string& s);
const char* to_string(Kind kind);

/// Cumulative unmasked counts |J_0|, ..., |J_N| for a D-token sequence
/// generated in N steps. Nondecreasing, |J_0| = 0, |J_N| = D.
struct UnmaskSchedule {
    Kind kind = Kind::uniform;
    int D = 0;
    int N = 0;
    std::vector<int> cumulative;  // size N + 1

    // |I_n| = |J_n| - |J_{n-1}| for n in 1..N.
    int step_size(int n) const;
};

int round_half_away(double x);

// uniform: |J_n| = round(D * n/N); cosine: |J_n| = round(D * cos((pi/2)(1 - n/N))).
// Endpoints forced to 0 and D, entries clamped nondecreasing.
UnmaskSchedule unmask_counts(Kind kind, int D, int N);

// Per-step Gumbel temperature alpha * (1 - n/N); exactly 0 at n = N (also for
// alpha = +infinity, where earlier steps stay infinite).
double gumbel_temp(double alpha, int n, int N);

// Half-step cumulative counts |J_{n-1/2}| for n in 1..N, each clamped into
// [|J_{n-1}|, |J_n|]. Used to split a round's positions into an early-commit
// prefix and a refreshed remainder.
std::vector<int> half_step_counts(const UnmaskSchedule& schedule);

// Merge-count schedule m_n = round((1 - n/N) * |I_n|), clamped to [0, |I_n|].
int hybrid_m(int n, int N, int I_n_size);

}  // namespace mdsampler::schedules

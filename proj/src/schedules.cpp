#include "mdsampler/schedules.hpp"

#include <algorithm>
#include <cmath>

namespace mdsampler::schedules {

Kind kind_from_string(const std::string& s) {
    if (s == "cosine") return Kind::cosine;
    if (s == "uniform") return Kind::uniform;
    throw ArgumentError("unknown schedule kind: " + s);
}

const char* to_string(Kind kind) {
    return kind == Kind::cosine ? "cosine" : "uniform";
}

int UnmaskSchedule::step_size(int n) const {
    if (n < 1 || n > N) throw ArgumentError("step_size: n out of range");
    return cumulative[static_cast<size_t>(n)] - cumulative[static_cast<size_t>(n - 1)];
}

int round_half_away(double x) {
    return static_cast<int>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

namespace {

double cumulative_fraction(Kind kind, double t) {
    // t in [0, 1] is the fraction of steps done.
    switch (kind) {
        case Kind::uniform: return t;
        case Kind::cosine: return std::cos((M_PI / 2.0) * (1.0 - t));
    }
    return t;
}

}  // namespace

UnmaskSchedule unmask_counts(Kind kind, int D, int N) {
    if (D < 1) throw ArgumentError("unmask_counts: D must be >= 1");
    if (N < 1 || N > D) throw ArgumentError("unmask_counts: need 1 <= N <= D");

    UnmaskSchedule s;
    s.kind = kind;
    s.D = D;
    s.N = N;
    s.cumulative.resize(static_cast<size_t>(N) + 1);
    for (int n = 0; n <= N; ++n) {
        const double t = static_cast<double>(n) / static_cast<double>(N);
        int c = round_half_away(D * cumulative_fraction(kind, t));
        c = std::clamp(c, 0, D);
        if (n > 0) c = std::max(c, s.cumulative[static_cast<size_t>(n - 1)]);
        s.cumulative[static_cast<size_t>(n)] = c;
    }
    s.cumulative.front() = 0;
    s.cumulative.back() = D;
    return s;
}

double gumbel_temp(double alpha, int n, int N) {
    if (n < 1 || n > N) throw ArgumentError("gumbel_temp: n out of range");
    if (n == N) return 0.0;
    return alpha * (1.0 - static_cast<double>(n) / static_cast<double>(N));
}

std::vector<int> half_step_counts(const UnmaskSchedule& schedule) {
    std::vector<int> half(static_cast<size_t>(schedule.N));
    for (int n = 1; n <= schedule.N; ++n) {
        const double t = (static_cast<double>(n) - 0.5) / static_cast<double>(schedule.N);
        int c = round_half_away(schedule.D * cumulative_fraction(schedule.kind, t));
        const int lo = schedule.cumulative[static_cast<size_t>(n - 1)];
        const int hi = schedule.cumulative[static_cast<size_t>(n)];
        half[static_cast<size_t>(n - 1)] = std::clamp(c, lo, hi);
    }
    return half;
}

int hybrid_m(int n, int N, int I_n_size) {
    if (n < 1 || n > N) throw ArgumentError("hybrid_m: n out of range");
    if (I_n_size < 0) throw ArgumentError("hybrid_m: negative step size");
    const double frac = 1.0 - static_cast<double>(n) / static_cast<double>(N);
    return std::clamp(round_half_away(frac * I_n_size), 0, I_n_size);
}

}  // namespace mdsampler::schedules

#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mdsampler {

// Error taxonomy shared by all modules. Callers that violate a precondition
// get ArgumentError; resource guards raise CapacityError; the rest are
// situation-specific and documented at the throwing site.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidDistributionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CacheInvalidError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

using Rng = std::mt19937_64;

// 53-bit uniform in [0, 1). Bit-identical across platforms, unlike
// std::uniform_real_distribution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

uint64_t splitmix64(uint64_t x);
uint64_t fnv1a64(std::string_view s);
uint64_t fnv1a64_bytes(const void* data, size_t n, uint64_t h = 1469598103934665603ull);

// Named substream derivation: one master seed fans out into independent
// streams keyed by (name, index), so parallel replications never share or
// overlap state regardless of scheduling.
uint64_t substream_seed(uint64_t master, std::string_view name, uint64_t index);

inline Rng substream_rng(uint64_t master, std::string_view name, uint64_t index) {
    return Rng(substream_seed(master, name, index));
}

// Kahan compensated accumulator for order-insensitive enumeration sums.
struct KahanSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double v) {
        const double y = v - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace mdsampler

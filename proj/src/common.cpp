#include "mdsampler/common.hpp"

namespace mdsampler {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t fnv1a64(std::string_view s) {
    return fnv1a64_bytes(s.data(), s.size());
}

uint64_t fnv1a64_bytes(const void* data, size_t n, uint64_t h) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

uint64_t substream_seed(uint64_t master, std::string_view name, uint64_t index) {
    const uint64_t tag = splitmix64(fnv1a64(name) ^ splitmix64(index));
    return splitmix64(master ^ tag);
}

}  // namespace mdsampler

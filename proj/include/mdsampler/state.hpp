#pragma once

#include <cstdint>
#include <vector>

#include "mdsampler/common.hpp"

namespace mdsampler::cts {

/// Partially unmasked sequence: token value per position, -1 where masked.
struct MaskState {
    int D = 0;
    std::vector<int> tokens;  // size D, -1 = masked

    static MaskState all_masked(int D);

    bool is_masked(int pos) const { return tokens[static_cast<size_t>(pos)] < 0; }
    int token(int pos) const { return tokens[static_cast<size_t>(pos)]; }
    void commit(int pos, int token);
    int unmasked_count() const;
    std::vector<int> masked_positions() const;
    std::vector<int> unmasked_positions() const;

    // Content hash used to tag derived artifacts (e.g. KV caches) so they
    // cannot be replayed against a different state.
    uint64_t fingerprint(uint64_t context_tag = 0) const;
};

}  // namespace mdsampler::cts

#include "mdsampler/state.hpp"

namespace mdsampler::cts {

MaskState MaskState::all_masked(int D) {
    if (D < 1) throw ArgumentError("mask state: D must be >= 1");
    MaskState s;
    s.D = D;
    s.tokens.assign(static_cast<size_t>(D), -1);
    return s;
}

void MaskState::commit(int pos, int token) {
    if (pos < 0 || pos >= D) throw ArgumentError("mask state: position out of range");
    if (token < 0) throw ArgumentError("mask state: negative token");
    if (!is_masked(pos)) throw InternalError("mask state: position already unmasked");
    tokens[static_cast<size_t>(pos)] = token;
}

int MaskState::unmasked_count() const {
    int c = 0;
    for (int t : tokens) c += t >= 0 ? 1 : 0;
    return c;
}

std::vector<int> MaskState::masked_positions() const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (int i = 0; i < D; ++i) {
        if (is_masked(i)) out.push_back(i);
    }
    return out;
}

std::vector<int> MaskState::unmasked_positions() const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (int i = 0; i < D; ++i) {
        if (!is_masked(i)) out.push_back(i);
    }
    return out;
}

uint64_t MaskState::fingerprint(uint64_t context_tag) const {
    uint64_t h = fnv1a64_bytes(&context_tag, sizeof(context_tag));
    h = fnv1a64_bytes(&D, sizeof(D), h);
    h = fnv1a64_bytes(tokens.data(), tokens.size() * sizeof(int), h);
    return h;
}

}  // namespace mdsampler::cts

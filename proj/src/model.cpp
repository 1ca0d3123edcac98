#include "mdsampler/model.hpp"

namespace mdsampler::cts {

std::vector<std::pair<int, dist::Categorical>> ProductModel::conditionals(const MaskState& state) const {
    std::vector<std::pair<int, dist::Categorical>> out;
    for (int pos : state.masked_positions()) {
        out.emplace_back(pos, conditional(state, pos));
    }
    return out;
}

}  // namespace mdsampler::cts

#pragma once

#include <utility>
#include <vector>

#include "mdsampler/dist.hpp"
#include "mdsampler/state.hpp"

namespace mdsampler::cts {

/// Product-model interface: per-position conditionals given the unmasked
/// part of the state. One call per round returns the whole conditional table
/// so ordering policies never need a second model evaluation.
class ProductModel {
public:
    virtual ~ProductModel() = default;

    virtual int length() const = 0;
    virtual int alphabet() const = 0;

    // Conditional at a single masked query position.
    virtual dist::Categorical conditional(const MaskState& state, int pos) const = 0;

    // Conditionals at every masked position, ascending by position. The
    // default loops over conditional(); models with a shared forward pass
    // override it.
    virtual std::vector<std::pair<int, dist::Categorical>> conditionals(const MaskState& state) const;
};

}  // namespace mdsampler::cts

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mdsampler/dist.hpp"
#include "mdsampler/model.hpp"
#include "mdsampler/state.hpp"

namespace mdsampler::nanoformer {

/// Dimensions of the toy bidirectional transformer. The vocabulary holds the
/// token alphabet plus one mask token (id == vocab) used at masked positions.
struct Hyperparams {
    int layers = 2;
    int d_model = 32;
    int d_k = 16;
    int d_ff = 64;
    int vocab = 16;    // alphabet size |S|; mask id = vocab
    int seq_len = 32;  // D
    bool use_pos_embed = true;
};

struct LayerParams {
    std::vector<double> wq, wk, wv;  // d_k x d_model
    std::vector<double> wo;          // d_model x d_k
    std::vector<double> ln1_g, ln1_b, ln2_g, ln2_b;
    std::vector<double> w1, b1;  // d_ff x d_model, d_ff
    std::vector<double> w2, b2;  // d_model x d_ff, d_model
};

/// Seeded random weights; a deterministic function of (seed, hyperparams).
/// Never trained: every claim tested against this model is about
/// inference-time approximation error.
struct TransformerParams {
    Hyperparams hp;
    uint64_t seed = 0;
    std::vector<double> tok_embed;  // (vocab + 1) x d_model
    std::vector<double> pos_embed;  // seq_len x d_model
    std::vector<LayerParams> layers;
    std::vector<double> lnf_g, lnf_b;
    std::vector<double> w_head;  // vocab x d_model

    uint64_t tag() const;  // identity hash used by cache fingerprints
};

TransformerParams init_params(uint64_t seed, const Hyperparams& hp = {});

// Flat binary blob with a one-line JSON header (shapes, seed, dtype).
void save_params(const TransformerParams& params, const std::string& path);
TransformerParams load_params(const std::string& path);

/// Per-layer key/value vectors for all positions from one full forward,
/// tagged with the fingerprint of the state it was computed from.
struct KVCache {
    int layers = 0;
    int seq_len = 0;
    int d_k = 0;
    std::vector<double> keys;    // [layer][pos][d_k]
    std::vector<double> values;  // [layer][pos][d_k]
    uint64_t fingerprint = 0;
};

struct FlopCounter {
    uint64_t attention = 0;  // multiply-adds in QK scores and AV sums
};

struct FullForward {
    std::vector<std::vector<double>> logits;  // D x vocab
    std::vector<dist::Categorical> conds;     // D entries
    KVCache cache;
};

FullForward full_forward(const TransformerParams& params, const cts::MaskState& state,
                         FlopCounter* flops = nullptr);

struct PartialForward {
    std::vector<int> positions;               // refreshed (masked) positions, ascending
    std::vector<std::vector<double>> logits;  // aligned with positions
    std::vector<dist::Categorical> conds;
};

// Re-runs the stack at the positions in I only: inputs are the committed
// tokens of a_tokens on A and mask elsewhere in I; at every layer, keys and
// values at positions outside I come from the cache, inside I they are
// recomputed. Returns refreshed conditionals on B = I \ A. The cache must
// carry the fingerprint of exactly this state or a CacheInvalidError is
// raised.
PartialForward partial_forward(const TransformerParams& params, const KVCache& cache,
                               const cts::MaskState& state, const std::vector<int>& I,
                               const std::vector<std::pair<int, int>>& a_tokens,
                               FlopCounter* flops = nullptr);

// Single-precision twins, mirroring deployment arithmetic. Probabilities are
// returned raw (a float softmax does not meet the double validation
// tolerance of Categorical).
struct FloatParams;
struct KVCacheF32 {
    int layers = 0;
    int seq_len = 0;
    int d_k = 0;
    std::vector<float> keys;
    std::vector<float> values;
    uint64_t fingerprint = 0;
};
struct FullForwardF32 {
    std::vector<std::vector<float>> logits;
    std::vector<std::vector<float>> probs;
    KVCacheF32 cache;
};
struct PartialForwardF32 {
    std::vector<int> positions;
    std::vector<std::vector<float>> logits;
    std::vector<std::vector<float>> probs;
};

struct FloatParams {
    Hyperparams hp;
    uint64_t tag = 0;
    std::vector<float> tok_embed, pos_embed;
    struct Layer {
        std::vector<float> wq, wk, wv, wo;
        std::vector<float> ln1_g, ln1_b, ln2_g, ln2_b;
        std::vector<float> w1, b1, w2, b2;
    };
    std::vector<Layer> layers;
    std::vector<float> lnf_g, lnf_b, w_head;
};

FloatParams make_float_params(const TransformerParams& params);
FullForwardF32 full_forward_f32(const FloatParams& params, const cts::MaskState& state,
                                FlopCounter* flops = nullptr);
PartialForwardF32 partial_forward_f32(const FloatParams& params, const KVCacheF32& cache,
                                      const cts::MaskState& state, const std::vector<int>& I,
                                      const std::vector<std::pair<int, int>>& a_tokens,
                                      FlopCounter* flops = nullptr);

/// ProductModel backed by the transformer; one forward per round.
class Model : public cts::ProductModel {
public:
    explicit Model(TransformerParams params) : params_(std::move(params)) {}

    int length() const override { return params_.hp.seq_len; }
    int alphabet() const override { return params_.hp.vocab; }
    dist::Categorical conditional(const cts::MaskState& state, int pos) const override;
    std::vector<std::pair<int, dist::Categorical>> conditionals(const cts::MaskState& state) const override;

    const TransformerParams& params() const { return params_; }

private:
    TransformerParams params_;
};

}  // namespace mdsampler::nanoformer

#include "mdsampler/nanoformer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mdsampler/simd.hpp"

namespace mdsampler::nanoformer {

namespace {

void validate_hp(const Hyperparams& hp) {
    if (hp.layers < 1 || hp.d_model < 1 || hp.d_k < 1 || hp.d_ff < 1 || hp.vocab < 1 ||
        hp.seq_len < 1) {
        throw ArgumentError("nanoformer: all dimensions must be >= 1");
    }
}

template <typename T>
struct LayerView {
    const T *wq, *wk, *wv, *wo;
    const T *ln1_g, *ln1_b, *ln2_g, *ln2_b;
    const T *w1, *b1, *w2, *b2;
};

template <typename T>
struct ParamsView {
    Hyperparams hp;
    uint64_t tag = 0;
    const T *tok_embed, *pos_embed;
    std::vector<LayerView<T>> layers;
    const T *lnf_g, *lnf_b, *w_head;
};

ParamsView<double> view_of(const TransformerParams& p) {
    ParamsView<double> v;
    v.hp = p.hp;
    v.tag = p.tag();
    v.tok_embed = p.tok_embed.data();
    v.pos_embed = p.pos_embed.data();
    v.layers.reserve(p.layers.size());
    for (const auto& l : p.layers) {
        v.layers.push_back({l.wq.data(), l.wk.data(), l.wv.data(), l.wo.data(), l.ln1_g.data(),
                            l.ln1_b.data(), l.ln2_g.data(), l.ln2_b.data(), l.w1.data(),
                            l.b1.data(), l.w2.data(), l.b2.data()});
    }
    v.lnf_g = p.lnf_g.data();
    v.lnf_b = p.lnf_b.data();
    v.w_head = p.w_head.data();
    return v;
}

ParamsView<float> view_of(const FloatParams& p) {
    ParamsView<float> v;
    v.hp = p.hp;
    v.tag = p.tag;
    v.tok_embed = p.tok_embed.data();
    v.pos_embed = p.pos_embed.data();
    v.layers.reserve(p.layers.size());
    for (const auto& l : p.layers) {
        v.layers.push_back({l.wq.data(), l.wk.data(), l.wv.data(), l.wo.data(), l.ln1_g.data(),
                            l.ln1_b.data(), l.ln2_g.data(), l.ln2_b.data(), l.w1.data(),
                            l.b1.data(), l.w2.data(), l.b2.data()});
    }
    v.lnf_g = p.lnf_g.data();
    v.lnf_b = p.lnf_b.data();
    v.w_head = p.w_head.data();
    return v;
}

template <typename T>
void layer_norm(const T* x, const T* gain, const T* bias, T* out, int d) {
    const T mean = simd::sum(x, static_cast<size_t>(d)) / static_cast<T>(d);
    T var = T(0);
    for (int i = 0; i < d; ++i) {
        const T c = x[i] - mean;
        var += c * c;
    }
    var /= static_cast<T>(d);
    const T inv = T(1) / std::sqrt(var + static_cast<T>(1e-5));
    for (int i = 0; i < d; ++i) out[i] = gain[i] * (x[i] - mean) * inv + bias[i];
}

template <typename T>
void matvec(const T* w, const T* x, T* out, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        out[r] = simd::dot(w + static_cast<size_t>(r) * static_cast<size_t>(cols), x,
                           static_cast<size_t>(cols));
    }
}

template <typename T>
void softmax_inplace(T* x, int n) {
    const T m = simd::max(x, static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) x[i] = std::exp(x[i] - m);
    const T z = simd::sum(x, static_cast<size_t>(n));
    simd::scale(T(1) / z, x, static_cast<size_t>(n));
}

// Runs the full stack for the given query positions. Key/value vectors for
// positions outside the query set are read from cached_k/cached_v (layer
// stride D * d_k); with a null cache the query set must cover all positions.
template <typename T>
void forward_engine(const ParamsView<T>& P, const std::vector<int>& queries,
                    const std::vector<int>& input_tokens, const T* cached_k, const T* cached_v,
                    T* cache_out_k, T* cache_out_v, std::vector<std::vector<T>>& logits_out,
                    FlopCounter* flops) {
    const int D = P.hp.seq_len;
    const int dm = P.hp.d_model;
    const int dk = P.hp.d_k;
    const int dff = P.hp.d_ff;
    const int nq = static_cast<int>(queries.size());
    const T inv_sqrt_dk = T(1) / std::sqrt(static_cast<T>(dk));

    std::vector<char> is_query(static_cast<size_t>(D), 0);
    std::vector<int> slot_of(static_cast<size_t>(D), -1);
    for (int s = 0; s < nq; ++s) {
        is_query[static_cast<size_t>(queries[static_cast<size_t>(s)])] = 1;
        slot_of[static_cast<size_t>(queries[static_cast<size_t>(s)])] = s;
    }
    if (cached_k == nullptr && nq != D) {
        throw InternalError("forward_engine: partial query set requires a cache");
    }

    // Embeddings at the query positions.
    std::vector<T> h(static_cast<size_t>(nq) * static_cast<size_t>(dm));
    for (int s = 0; s < nq; ++s) {
        const int pos = queries[static_cast<size_t>(s)];
        const int tok = input_tokens[static_cast<size_t>(s)];
        T* row = h.data() + static_cast<size_t>(s) * static_cast<size_t>(dm);
        const T* emb = P.tok_embed + static_cast<size_t>(tok) * static_cast<size_t>(dm);
        std::copy(emb, emb + dm, row);
        if (P.hp.use_pos_embed) {
            simd::axpy(T(1), P.pos_embed + static_cast<size_t>(pos) * static_cast<size_t>(dm), row,
                       static_cast<size_t>(dm));
        }
    }

    std::vector<T> u(static_cast<size_t>(dm));
    std::vector<T> qv(static_cast<size_t>(nq) * static_cast<size_t>(dk));
    std::vector<T> k_all(static_cast<size_t>(D) * static_cast<size_t>(dk));
    std::vector<T> v_all(static_cast<size_t>(D) * static_cast<size_t>(dk));
    std::vector<T> scores(static_cast<size_t>(D));
    std::vector<T> attn(static_cast<size_t>(dk));
    std::vector<T> proj(static_cast<size_t>(dm));
    std::vector<T> ff(static_cast<size_t>(dff));

    const size_t layer_stride = static_cast<size_t>(D) * static_cast<size_t>(dk);

    for (size_t l = 0; l < P.layers.size(); ++l) {
        const auto& L = P.layers[l];

        if (cached_k != nullptr) {
            std::copy(cached_k + l * layer_stride, cached_k + (l + 1) * layer_stride, k_all.begin());
            std::copy(cached_v + l * layer_stride, cached_v + (l + 1) * layer_stride, v_all.begin());
        }
        for (int s = 0; s < nq; ++s) {
            const int pos = queries[static_cast<size_t>(s)];
            const T* row = h.data() + static_cast<size_t>(s) * static_cast<size_t>(dm);
            layer_norm(row, L.ln1_g, L.ln1_b, u.data(), dm);
            matvec(L.wq, u.data(), qv.data() + static_cast<size_t>(s) * static_cast<size_t>(dk), dk, dm);
            matvec(L.wk, u.data(), k_all.data() + static_cast<size_t>(pos) * static_cast<size_t>(dk), dk, dm);
            matvec(L.wv, u.data(), v_all.data() + static_cast<size_t>(pos) * static_cast<size_t>(dk), dk, dm);
        }
        if (cache_out_k != nullptr) {
            std::copy(k_all.begin(), k_all.end(), cache_out_k + l * layer_stride);
            std::copy(v_all.begin(), v_all.end(), cache_out_v + l * layer_stride);
        }

        for (int s = 0; s < nq; ++s) {
            const T* qrow = qv.data() + static_cast<size_t>(s) * static_cast<size_t>(dk);
            for (int j = 0; j < D; ++j) {
                scores[static_cast<size_t>(j)] =
                    simd::dot(qrow, k_all.data() + static_cast<size_t>(j) * static_cast<size_t>(dk),
                              static_cast<size_t>(dk)) *
                    inv_sqrt_dk;
            }
            softmax_inplace(scores.data(), D);
            std::fill(attn.begin(), attn.end(), T(0));
            for (int j = 0; j < D; ++j) {
                simd::axpy(scores[static_cast<size_t>(j)],
                           v_all.data() + static_cast<size_t>(j) * static_cast<size_t>(dk), attn.data(),
                           static_cast<size_t>(dk));
            }
            if (flops != nullptr) {
                flops->attention += static_cast<uint64_t>(4) * static_cast<uint64_t>(dk) *
                                    static_cast<uint64_t>(D);
            }
            matvec(L.wo, attn.data(), proj.data(), dm, dk);
            T* row = h.data() + static_cast<size_t>(s) * static_cast<size_t>(dm);
            simd::axpy(T(1), proj.data(), row, static_cast<size_t>(dm));
        }

        for (int s = 0; s < nq; ++s) {
            T* row = h.data() + static_cast<size_t>(s) * static_cast<size_t>(dm);
            layer_norm(row, L.ln2_g, L.ln2_b, u.data(), dm);
            matvec(L.w1, u.data(), ff.data(), dff, dm);
            for (int r = 0; r < dff; ++r) {
                ff[static_cast<size_t>(r)] += L.b1[r];
                if (ff[static_cast<size_t>(r)] < T(0)) ff[static_cast<size_t>(r)] = T(0);
            }
            matvec(L.w2, ff.data(), proj.data(), dm, dff);
            for (int r = 0; r < dm; ++r) row[r] += proj[static_cast<size_t>(r)] + L.b2[r];
        }
    }

    logits_out.assign(static_cast<size_t>(nq), std::vector<T>(static_cast<size_t>(P.hp.vocab)));
    for (int s = 0; s < nq; ++s) {
        const T* row = h.data() + static_cast<size_t>(s) * static_cast<size_t>(dm);
        layer_norm(row, P.lnf_g, P.lnf_b, u.data(), dm);
        matvec(P.w_head, u.data(), logits_out[static_cast<size_t>(s)].data(), P.hp.vocab, dm);
    }
}

template <typename T>
std::vector<T> softmax_copy(const std::vector<T>& logits) {
    std::vector<T> probs(logits);
    softmax_inplace(probs.data(), static_cast<int>(probs.size()));
    return probs;
}

template <typename T>
std::vector<int> tokens_for_full(const Hyperparams& hp, const cts::MaskState& state) {
    if (state.D != hp.seq_len) throw ArgumentError("nanoformer: state length mismatch");
    std::vector<int> toks(static_cast<size_t>(state.D));
    for (int i = 0; i < state.D; ++i) {
        const int t = state.token(i);
        if (t >= hp.vocab) throw ArgumentError("nanoformer: token id outside alphabet");
        toks[static_cast<size_t>(i)] = t < 0 ? hp.vocab : t;
    }
    return toks;
}

struct PartialInputs {
    std::vector<int> queries;  // I, ascending
    std::vector<int> tokens;   // committed on A, mask on B
    std::vector<int> b_positions;
};

PartialInputs prepare_partial_inputs(const Hyperparams& hp, const cts::MaskState& state,
                                     const std::vector<int>& I,
                                     const std::vector<std::pair<int, int>>& a_tokens) {
    if (state.D != hp.seq_len) throw ArgumentError("nanoformer: state length mismatch");
    PartialInputs in;
    in.queries = I;
    std::sort(in.queries.begin(), in.queries.end());
    for (size_t l = 0; l < in.queries.size(); ++l) {
        const int pos = in.queries[l];
        if (pos < 0 || pos >= state.D) throw ArgumentError("partial_forward: position out of range");
        if (l > 0 && in.queries[l] == in.queries[l - 1]) {
            throw ArgumentError("partial_forward: duplicate position in I");
        }
        if (!state.is_masked(pos)) {
            throw ArgumentError("partial_forward: I must consist of masked positions");
        }
    }
    std::vector<int> committed(static_cast<size_t>(state.D), -1);
    for (const auto& [pos, tok] : a_tokens) {
        if (std::find(in.queries.begin(), in.queries.end(), pos) == in.queries.end()) {
            throw ArgumentError("partial_forward: A must be a subset of I");
        }
        if (tok < 0 || tok >= hp.vocab) throw ArgumentError("partial_forward: token id outside alphabet");
        if (committed[static_cast<size_t>(pos)] >= 0) {
            throw ArgumentError("partial_forward: duplicate position in A");
        }
        committed[static_cast<size_t>(pos)] = tok;
    }
    in.tokens.reserve(in.queries.size());
    for (int pos : in.queries) {
        const int tok = committed[static_cast<size_t>(pos)];
        in.tokens.push_back(tok < 0 ? hp.vocab : tok);
        if (tok < 0) in.b_positions.push_back(pos);
    }
    return in;
}

std::vector<double> draw_uniform_block(Rng& rng, size_t n, double scale) {
    std::vector<double> out(n);
    for (double& v : out) v = scale * (2.0 * uniform01(rng) - 1.0);
    return out;
}

}  // namespace

uint64_t TransformerParams::tag() const {
    uint64_t h = fnv1a64_bytes(&seed, sizeof(seed));
    const int fields[7] = {hp.layers,  hp.d_model, hp.d_k,
                           hp.d_ff,    hp.vocab,   hp.seq_len,
                           hp.use_pos_embed ? 1 : 0};
    h = fnv1a64_bytes(fields, sizeof(fields), h);
    return h;
}

TransformerParams init_params(uint64_t seed, const Hyperparams& hp) {
    validate_hp(hp);
    TransformerParams p;
    p.hp = hp;
    p.seed = seed;
    Rng rng(splitmix64(seed ^ 0x6e616e6f666f726dull));

    const double s_embed = 0.5;
    const double s_model = std::sqrt(3.0 / hp.d_model);
    const double s_dk = std::sqrt(3.0 / hp.d_k);
    const double s_dff = std::sqrt(3.0 / hp.d_ff);

    const size_t dm = static_cast<size_t>(hp.d_model);
    p.tok_embed = draw_uniform_block(rng, static_cast<size_t>(hp.vocab + 1) * dm, s_embed);
    p.pos_embed = draw_uniform_block(rng, static_cast<size_t>(hp.seq_len) * dm, s_embed);
    p.layers.resize(static_cast<size_t>(hp.layers));
    for (auto& l : p.layers) {
        l.wq = draw_uniform_block(rng, static_cast<size_t>(hp.d_k) * dm, s_model);
        l.wk = draw_uniform_block(rng, static_cast<size_t>(hp.d_k) * dm, s_model);
        l.wv = draw_uniform_block(rng, static_cast<size_t>(hp.d_k) * dm, s_model);
        l.wo = draw_uniform_block(rng, dm * static_cast<size_t>(hp.d_k), s_dk);
        l.ln1_g.assign(dm, 1.0);
        l.ln1_b.assign(dm, 0.0);
        l.ln2_g.assign(dm, 1.0);
        l.ln2_b.assign(dm, 0.0);
        l.w1 = draw_uniform_block(rng, static_cast<size_t>(hp.d_ff) * dm, s_model);
        l.b1.assign(static_cast<size_t>(hp.d_ff), 0.0);
        l.w2 = draw_uniform_block(rng, dm * static_cast<size_t>(hp.d_ff), s_dff);
        l.b2.assign(dm, 0.0);
    }
    p.lnf_g.assign(dm, 1.0);
    p.lnf_b.assign(dm, 0.0);
    p.w_head = draw_uniform_block(rng, static_cast<size_t>(hp.vocab) * dm, s_model);
    return p;
}

FullForward full_forward(const TransformerParams& params, const cts::MaskState& state,
                         FlopCounter* flops) {
    const auto P = view_of(params);
    const int D = P.hp.seq_len;
    std::vector<int> queries(static_cast<size_t>(D));
    std::iota(queries.begin(), queries.end(), 0);
    const auto tokens = tokens_for_full<double>(P.hp, state);

    FullForward out;
    out.cache.layers = P.hp.layers;
    out.cache.seq_len = D;
    out.cache.d_k = P.hp.d_k;
    const size_t cache_size = static_cast<size_t>(P.hp.layers) * static_cast<size_t>(D) *
                              static_cast<size_t>(P.hp.d_k);
    out.cache.keys.resize(cache_size);
    out.cache.values.resize(cache_size);
    out.cache.fingerprint = state.fingerprint(P.tag);

    forward_engine<double>(P, queries, tokens, nullptr, nullptr, out.cache.keys.data(),
                           out.cache.values.data(), out.logits, flops);

    out.conds.reserve(static_cast<size_t>(D));
    for (const auto& lg : out.logits) {
        out.conds.push_back(dist::Categorical::from_weights(softmax_copy(lg)));
    }
    return out;
}

PartialForward partial_forward(const TransformerParams& params, const KVCache& cache,
                               const cts::MaskState& state, const std::vector<int>& I,
                               const std::vector<std::pair<int, int>>& a_tokens,
                               FlopCounter* flops) {
    const auto P = view_of(params);
    if (cache.layers != P.hp.layers || cache.seq_len != P.hp.seq_len || cache.d_k != P.hp.d_k) {
        throw CacheInvalidError("partial_forward: cache shaped for different hyperparameters");
    }
    if (cache.fingerprint != state.fingerprint(P.tag)) {
        throw CacheInvalidError("partial_forward: cache fingerprint does not match this state");
    }
    const auto in = prepare_partial_inputs(P.hp, state, I, a_tokens);

    PartialForward out;
    out.positions = in.b_positions;
    if (in.queries.empty()) return out;

    std::vector<std::vector<double>> logits_all;
    forward_engine<double>(P, in.queries, in.tokens, cache.keys.data(), cache.values.data(),
                           nullptr, nullptr, logits_all, flops);

    out.logits.reserve(out.positions.size());
    out.conds.reserve(out.positions.size());
    for (size_t s = 0; s < in.queries.size(); ++s) {
        if (in.tokens[s] == P.hp.vocab) {  // masked query => refreshed output
            out.logits.push_back(logits_all[s]);
            out.conds.push_back(dist::Categorical::from_weights(softmax_copy(logits_all[s])));
        }
    }
    return out;
}

FloatParams make_float_params(const TransformerParams& params) {
    FloatParams f;
    f.hp = params.hp;
    f.tag = params.tag();
    const auto cast = [](const std::vector<double>& v) {
        return std::vector<float>(v.begin(), v.end());
    };
    f.tok_embed = cast(params.tok_embed);
    f.pos_embed = cast(params.pos_embed);
    f.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        f.layers.push_back({cast(l.wq), cast(l.wk), cast(l.wv), cast(l.wo), cast(l.ln1_g),
                            cast(l.ln1_b), cast(l.ln2_g), cast(l.ln2_b), cast(l.w1), cast(l.b1),
                            cast(l.w2), cast(l.b2)});
    }
    f.lnf_g = cast(params.lnf_g);
    f.lnf_b = cast(params.lnf_b);
    f.w_head = cast(params.w_head);
    return f;
}

FullForwardF32 full_forward_f32(const FloatParams& params, const cts::MaskState& state,
                                FlopCounter* flops) {
    const auto P = view_of(params);
    const int D = P.hp.seq_len;
    std::vector<int> queries(static_cast<size_t>(D));
    std::iota(queries.begin(), queries.end(), 0);
    const auto tokens = tokens_for_full<float>(P.hp, state);

    FullForwardF32 out;
    out.cache.layers = P.hp.layers;
    out.cache.seq_len = D;
    out.cache.d_k = P.hp.d_k;
    const size_t cache_size = static_cast<size_t>(P.hp.layers) * static_cast<size_t>(D) *
                              static_cast<size_t>(P.hp.d_k);
    out.cache.keys.resize(cache_size);
    out.cache.values.resize(cache_size);
    out.cache.fingerprint = state.fingerprint(P.tag);

    forward_engine<float>(P, queries, tokens, nullptr, nullptr, out.cache.keys.data(),
                          out.cache.values.data(), out.logits, flops);
    out.probs.reserve(out.logits.size());
    for (const auto& lg : out.logits) out.probs.push_back(softmax_copy(lg));
    return out;
}

PartialForwardF32 partial_forward_f32(const FloatParams& params, const KVCacheF32& cache,
                                      const cts::MaskState& state, const std::vector<int>& I,
                                      const std::vector<std::pair<int, int>>& a_tokens,
                                      FlopCounter* flops) {
    const auto P = view_of(params);
    if (cache.layers != P.hp.layers || cache.seq_len != P.hp.seq_len || cache.d_k != P.hp.d_k) {
        throw CacheInvalidError("partial_forward: cache shaped for different hyperparameters");
    }
    if (cache.fingerprint != state.fingerprint(P.tag)) {
        throw CacheInvalidError("partial_forward: cache fingerprint does not match this state");
    }
    const auto in = prepare_partial_inputs(P.hp, state, I, a_tokens);

    PartialForwardF32 out;
    out.positions = in.b_positions;
    if (in.queries.empty()) return out;

    std::vector<std::vector<float>> logits_all;
    forward_engine<float>(P, in.queries, in.tokens, cache.keys.data(), cache.values.data(),
                          nullptr, nullptr, logits_all, flops);
    for (size_t s = 0; s < in.queries.size(); ++s) {
        if (in.tokens[s] == P.hp.vocab) {
            out.logits.push_back(logits_all[s]);
            out.probs.push_back(softmax_copy(logits_all[s]));
        }
    }
    return out;
}

namespace {

void append_block(std::vector<const std::vector<double>*>& blocks, const std::vector<double>& v) {
    blocks.push_back(&v);
}

std::vector<const std::vector<double>*> serialization_order(const TransformerParams& p) {
    std::vector<const std::vector<double>*> blocks;
    append_block(blocks, p.tok_embed);
    append_block(blocks, p.pos_embed);
    for (const auto& l : p.layers) {
        append_block(blocks, l.wq);
        append_block(blocks, l.wk);
        append_block(blocks, l.wv);
        append_block(blocks, l.wo);
        append_block(blocks, l.ln1_g);
        append_block(blocks, l.ln1_b);
        append_block(blocks, l.ln2_g);
        append_block(blocks, l.ln2_b);
        append_block(blocks, l.w1);
        append_block(blocks, l.b1);
        append_block(blocks, l.w2);
        append_block(blocks, l.b2);
    }
    append_block(blocks, p.lnf_g);
    append_block(blocks, p.lnf_b);
    append_block(blocks, p.w_head);
    return blocks;
}

std::vector<std::vector<double>*> serialization_order(TransformerParams& p) {
    std::vector<std::vector<double>*> blocks;
    const auto const_blocks = serialization_order(static_cast<const TransformerParams&>(p));
    blocks.reserve(const_blocks.size());
    for (const auto* b : const_blocks) blocks.push_back(const_cast<std::vector<double>*>(b));
    return blocks;
}

}  // namespace

void save_params(const TransformerParams& params, const std::string& path) {
    nlohmann::json header;
    header["format"] = "nanoformer-params";
    header["dtype"] = "f64";
    header["seed"] = params.seed;
    header["hyperparams"] = {{"layers", params.hp.layers},   {"d_model", params.hp.d_model},
                             {"d_k", params.hp.d_k},         {"d_ff", params.hp.d_ff},
                             {"vocab", params.hp.vocab},     {"seq_len", params.hp.seq_len},
                             {"use_pos_embed", params.hp.use_pos_embed}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("save_params: cannot open for writing: " + path);
    out << header.dump() << "\n";
    for (const auto* block : serialization_order(params)) {
        out.write(reinterpret_cast<const char*>(block->data()),
                  static_cast<std::streamsize>(block->size() * sizeof(double)));
    }
}

TransformerParams load_params(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("load_params: cannot open for reading: " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw ArgumentError("load_params: missing header");
    const auto header = nlohmann::json::parse(header_line);
    if (header.at("format").get<std::string>() != "nanoformer-params" ||
        header.at("dtype").get<std::string>() != "f64") {
        throw ArgumentError("load_params: unrecognized header");
    }
    Hyperparams hp;
    const auto& jhp = header.at("hyperparams");
    hp.layers = jhp.at("layers").get<int>();
    hp.d_model = jhp.at("d_model").get<int>();
    hp.d_k = jhp.at("d_k").get<int>();
    hp.d_ff = jhp.at("d_ff").get<int>();
    hp.vocab = jhp.at("vocab").get<int>();
    hp.seq_len = jhp.at("seq_len").get<int>();
    hp.use_pos_embed = jhp.at("use_pos_embed").get<bool>();

    // Allocate with the right shapes, then overwrite every block from the blob.
    TransformerParams params = init_params(header.at("seed").get<uint64_t>(), hp);
    for (auto* block : serialization_order(params)) {
        in.read(reinterpret_cast<char*>(block->data()),
                static_cast<std::streamsize>(block->size() * sizeof(double)));
        if (!in) throw ArgumentError("load_params: truncated blob");
    }
    char extra;
    if (in.read(&extra, 1)) throw ArgumentError("load_params: trailing bytes after blob");
    return params;
}

dist::Categorical Model::conditional(const cts::MaskState& state, int pos) const {
    if (pos < 0 || pos >= params_.hp.seq_len) throw ArgumentError("nanoformer: position out of range");
    if (!state.is_masked(pos)) throw ArgumentError("nanoformer: query position is not masked");
    return full_forward(params_, state).conds[static_cast<size_t>(pos)];
}

std::vector<std::pair<int, dist::Categorical>> Model::conditionals(const cts::MaskState& state) const {
    const auto fwd = full_forward(params_, state);
    std::vector<std::pair<int, dist::Categorical>> out;
    for (int pos : state.masked_positions()) {
        out.emplace_back(pos, fwd.conds[static_cast<size_t>(pos)]);
    }
    return out;
}

}  // namespace mdsampler::nanoformer

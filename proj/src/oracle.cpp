#include "mdsampler/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace mdsampler::oracle {

namespace {

size_t checked_table_size(int D, int S) {
    if (D < 1 || S < 1) throw ArgumentError("joint table: D and S must be >= 1");
    double cells = 1.0;
    for (int i = 0; i < D; ++i) {
        cells *= S;
        if (cells > JointTable::kTableCapacity) {
            throw CapacityError("joint table: S^D exceeds the 1e6 cell guard");
        }
    }
    return static_cast<size_t>(cells);
}

}  // namespace

JointTable::JointTable(int D, int S, std::vector<double> probs) : d_(D), s_(S), probs_(std::move(probs)) {
    const size_t cells = checked_table_size(D, S);
    if (probs_.size() != cells) throw ArgumentError("joint table: wrong number of cells");
    KahanSum total;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw InvalidDistributionError("joint table: cells must be finite and >= 0");
        }
        total.add(p);
    }
    if (std::abs(total.value() - 1.0) > 1e-12) {
        throw InvalidDistributionError("joint table: cells must sum to 1 within 1e-12");
    }
}

JointTable JointTable::random(int D, int S, Rng& rng, double min_mass) {
    const size_t cells = checked_table_size(D, S);
    std::vector<double> w(cells);
    KahanSum total;
    for (double& v : w) {
        v = min_mass + uniform01(rng);
        total.add(v);
    }
    const double inv = 1.0 / total.value();
    KahanSum renorm;
    for (double& v : w) {
        v *= inv;
        renorm.add(v);
    }
    // Push the largest cell by the rounding residue so the sum is 1 at the
    // 1e-12 validation tolerance regardless of table size.
    auto it = std::max_element(w.begin(), w.end());
    *it += 1.0 - renorm.value();
    return JointTable(D, S, std::move(w));
}

size_t JointTable::index_of(std::span<const int> x) const {
    if (static_cast<int>(x.size()) != d_) throw ArgumentError("joint table: coordinate count mismatch");
    size_t idx = 0;
    for (int i = 0; i < d_; ++i) {
        const int c = x[static_cast<size_t>(i)];
        if (c < 0 || c >= s_) throw ArgumentError("joint table: coordinate out of range");
        idx = idx * static_cast<size_t>(s_) + static_cast<size_t>(c);
    }
    return idx;
}

void JointTable::decode(size_t index, std::vector<int>& x) const {
    x.resize(static_cast<size_t>(d_));
    for (int i = d_ - 1; i >= 0; --i) {
        x[static_cast<size_t>(i)] = static_cast<int>(index % static_cast<size_t>(s_));
        index /= static_cast<size_t>(s_);
    }
}

std::string JointTable::to_json() const {
    nlohmann::json j;
    j["D"] = d_;
    j["S"] = s_;
    j["probs"] = probs_;
    return j.dump();
}

JointTable JointTable::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    return JointTable(j.at("D").get<int>(), j.at("S").get<int>(),
                      j.at("probs").get<std::vector<double>>());
}

void JointTable::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ArgumentError("joint table: cannot open for writing: " + path);
    out << to_json() << "\n";
}

JointTable JointTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("joint table: cannot open for reading: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

dist::Categorical conditional(const JointTable& q, int i, const cts::MaskState& state) {
    if (state.D != q.D()) throw ArgumentError("conditional: state length mismatch");
    if (i < 0 || i >= q.D()) throw ArgumentError("conditional: query position out of range");
    if (!state.is_masked(i)) throw ArgumentError("conditional: query position is conditioned on");

    std::vector<KahanSum> mass(static_cast<size_t>(q.S()));
    std::vector<int> x;
    for (size_t t = 0; t < q.size(); ++t) {
        const double p = q.probs()[t];
        if (p == 0.0) continue;
        q.decode(t, x);
        bool consistent = true;
        for (int j = 0; j < q.D(); ++j) {
            if (!state.is_masked(j) && x[static_cast<size_t>(j)] != state.token(j)) {
                consistent = false;
                break;
            }
        }
        if (consistent) mass[static_cast<size_t>(x[static_cast<size_t>(i)])].add(p);
    }
    std::vector<double> weights(static_cast<size_t>(q.S()));
    double total = 0.0;
    for (int s = 0; s < q.S(); ++s) {
        weights[static_cast<size_t>(s)] = mass[static_cast<size_t>(s)].value();
        total += weights[static_cast<size_t>(s)];
    }
    if (total <= 0.0) throw ConditioningError("conditional: conditioning event has zero probability");
    return dist::Categorical::from_weights(std::move(weights));
}

dist::Categorical conditional(const JointTable& q, int i, std::span<const int> J,
                              std::span<const int> x_J) {
    if (J.size() != x_J.size()) throw ArgumentError("conditional: J and x_J size mismatch");
    cts::MaskState state = cts::MaskState::all_masked(q.D());
    for (size_t l = 0; l < J.size(); ++l) {
        state.commit(J[l], x_J[l]);
    }
    return conditional(q, i, state);
}

std::vector<double> marginal(const JointTable& q, std::span<const int> coords) {
    for (size_t l = 0; l < coords.size(); ++l) {
        if (coords[l] < 0 || coords[l] >= q.D()) throw ArgumentError("marginal: coordinate out of range");
        if (l > 0 && coords[l] <= coords[l - 1]) throw ArgumentError("marginal: coordinates must be ascending");
    }
    size_t cells = 1;
    for (size_t l = 0; l < coords.size(); ++l) cells *= static_cast<size_t>(q.S());
    std::vector<KahanSum> acc(cells);
    std::vector<int> x;
    for (size_t t = 0; t < q.size(); ++t) {
        const double p = q.probs()[t];
        if (p == 0.0) continue;
        q.decode(t, x);
        size_t idx = 0;
        for (int c : coords) idx = idx * static_cast<size_t>(q.S()) + static_cast<size_t>(x[static_cast<size_t>(c)]);
        acc[idx].add(p);
    }
    std::vector<double> out(cells);
    for (size_t t = 0; t < cells; ++t) out[t] = acc[t].value();
    return out;
}

double phi_weight(int parent_size, int subset_size) {
    if (parent_size < 0 || subset_size < 0 || subset_size > parent_size) {
        throw ArgumentError("phi_weight: need 0 <= subset_size <= parent_size");
    }
    double binom = 1.0;
    for (int l = 1; l <= subset_size; ++l) {
        binom = binom * static_cast<double>(parent_size - subset_size + l) / static_cast<double>(l);
    }
    return 1.0 / (static_cast<double>(parent_size + 1) * binom);
}

std::map<std::vector<int>, double> phi_subsets(const std::vector<int>& parent) {
    const int n = static_cast<int>(parent.size());
    if (n > 20) throw CapacityError("phi_subsets: parent set too large");
    std::map<std::vector<int>, double> out;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> subset;
        for (int l = 0; l < n; ++l) {
            if (mask & (1u << l)) subset.push_back(parent[static_cast<size_t>(l)]);
        }
        std::sort(subset.begin(), subset.end());
        out[subset] = phi_weight(n, static_cast<int>(subset.size()));
    }
    return out;
}

KlResult kl_divergence(std::span<const double> q, std::span<const double> p) {
    if (q.size() != p.size()) throw ArgumentError("kl_divergence: size mismatch");
    KlResult r;
    KahanSum acc;
    for (size_t t = 0; t < q.size(); ++t) {
        if (q[t] == 0.0) continue;
        if (p[t] <= 0.0) {
            r.infinite = true;
            r.nats = std::numeric_limits<double>::infinity();
            return r;
        }
        acc.add(q[t] * std::log(q[t] / p[t]));
    }
    r.nats = acc.value();
    return r;
}

double expected_conditional_entropy(const JointTable& q, int i, std::span<const int> J) {
    std::vector<int> coords(J.begin(), J.end());
    std::sort(coords.begin(), coords.end());
    for (int c : coords) {
        if (c == i) throw ArgumentError("expected_conditional_entropy: i must not be in J");
    }
    const auto q_J = marginal(q, coords);
    size_t cells = q_J.size();
    KahanSum acc;
    std::vector<int> x_J(coords.size());
    for (size_t t = 0; t < cells; ++t) {
        if (q_J[t] == 0.0) continue;
        size_t rem = t;
        for (size_t l = coords.size(); l-- > 0;) {
            x_J[l] = static_cast<int>(rem % static_cast<size_t>(q.S()));
            rem /= static_cast<size_t>(q.S());
        }
        const auto cond = conditional(q, i, coords, x_J);
        acc.add(q_J[t] * dist::entropy(cond));
    }
    return acc.value();
}

double subset_entropy(const JointTable& q, std::span<const int> I) {
    std::vector<int> coords(I.begin(), I.end());
    std::sort(coords.begin(), coords.end());
    const auto q_I = marginal(q, coords);
    KahanSum acc;
    for (double p : q_I) {
        if (p > 0.0) acc.add(-p * std::log(p));
    }
    return acc.value();
}

namespace {

void validate_subset(const JointTable& q, const std::vector<int>& I) {
    std::vector<bool> seen(static_cast<size_t>(q.D()), false);
    for (int i : I) {
        if (i < 0 || i >= q.D()) throw ArgumentError("kl decomposition: index out of range");
        if (seen[static_cast<size_t>(i)]) throw ArgumentError("kl decomposition: duplicate index");
        seen[static_cast<size_t>(i)] = true;
    }
}

}  // namespace

KlDecomposition kl_decomposition_terms(const JointTable& q, const std::vector<int>& I) {
    validate_subset(q, I);
    if (I.size() > 8) throw CapacityError("kl decomposition: |I| > 8 permutation guard");

    std::vector<int> I_sorted(I);
    std::sort(I_sorted.begin(), I_sorted.end());
    std::vector<int> I_comp;
    {
        std::vector<bool> in_I(static_cast<size_t>(q.D()), false);
        for (int i : I_sorted) in_I[static_cast<size_t>(i)] = true;
        for (int i = 0; i < q.D(); ++i) {
            if (!in_I[static_cast<size_t>(i)]) I_comp.push_back(i);
        }
    }

    KlDecomposition out;

    // Single-coordinate marginals.
    std::vector<std::vector<double>> q_i(static_cast<size_t>(q.D()));
    for (int i = 0; i < q.D(); ++i) {
        const int coord[1] = {i};
        q_i[static_cast<size_t>(i)] = marginal(q, coord);
    }

    // term (a): marginal entropies over I.
    for (int i : I_sorted) {
        for (double p : q_i[static_cast<size_t>(i)]) {
            if (p > 0.0) out.term_a -= p * std::log(p);
        }
    }

    // chain_rhs1: D_KL(q_I || prod_{i in I} q_i).
    const auto q_I = marginal(q, I_sorted);
    {
        KahanSum acc;
        std::vector<int> x_I(I_sorted.size());
        for (size_t t = 0; t < q_I.size(); ++t) {
            if (q_I[t] == 0.0) continue;
            size_t rem = t;
            for (size_t l = I_sorted.size(); l-- > 0;) {
                x_I[l] = static_cast<int>(rem % static_cast<size_t>(q.S()));
                rem /= static_cast<size_t>(q.S());
            }
            double prod = 1.0;
            for (size_t l = 0; l < I_sorted.size(); ++l) {
                prod *= q_i[static_cast<size_t>(I_sorted[l])][static_cast<size_t>(x_I[l])];
            }
            acc.add(q_I[t] * std::log(q_I[t] / prod));
        }
        out.chain_rhs1 = acc.value();
    }

    // chain_lhs and chain_rhs2 share the sweep over conditioning values x_I.
    {
        KahanSum lhs;
        KahanSum rhs2;
        std::vector<int> x_I(I_sorted.size());
        std::vector<int> x;
        for (size_t t = 0; t < q_I.size(); ++t) {
            if (q_I[t] == 0.0) continue;
            size_t rem = t;
            for (size_t l = I_sorted.size(); l-- > 0;) {
                x_I[l] = static_cast<int>(rem % static_cast<size_t>(q.S()));
                rem /= static_cast<size_t>(q.S());
            }
            cts::MaskState cond_state = cts::MaskState::all_masked(q.D());
            for (size_t l = 0; l < I_sorted.size(); ++l) cond_state.commit(I_sorted[l], x_I[l]);

            // Per-position conditionals given x_I.
            std::vector<std::vector<double>> cond_i(static_cast<size_t>(q.D()));
            for (int i : I_comp) {
                cond_i[static_cast<size_t>(i)] = conditional(q, i, cond_state).probs();
            }

            // Product of q_i(x_i) over I for the lhs density.
            double prod_I = 1.0;
            for (size_t l = 0; l < I_sorted.size(); ++l) {
                prod_I *= q_i[static_cast<size_t>(I_sorted[l])][static_cast<size_t>(x_I[l])];
            }

            // Walk every completion of x_I.
            KahanSum cond_kl;  // D_KL(q_{I^c|I} || prod q_{i|I}) at this x_I
            for (size_t u = 0; u < q.size(); ++u) {
                const double p_full = q.probs()[u];
                if (p_full == 0.0) continue;
                q.decode(u, x);
                bool consistent = true;
                for (size_t l = 0; l < I_sorted.size(); ++l) {
                    if (x[static_cast<size_t>(I_sorted[l])] != x_I[l]) {
                        consistent = false;
                        break;
                    }
                }
                if (!consistent) continue;

                const double q_cond = p_full / q_I[t];
                double prod_cond = 1.0;
                for (int i : I_comp) {
                    prod_cond *= cond_i[static_cast<size_t>(i)][static_cast<size_t>(x[static_cast<size_t>(i)])];
                }
                cond_kl.add(q_cond * std::log(q_cond / prod_cond));
                // Two-stage law density p(x) = prod_I * prod_cond.
                lhs.add(p_full * std::log(p_full / (prod_I * prod_cond)));
            }
            rhs2.add(q_I[t] * cond_kl.value());
        }
        out.chain_lhs = lhs.value();
        out.chain_rhs2 = rhs2.value();
    }

    // term (c): conditional entropies of the complement given x_I.
    {
        KahanSum acc;
        for (int i : I_comp) acc.add(expected_conditional_entropy(q, i, I_sorted));
        out.term_c = acc.value();
    }

    // term (b): entropy chain rule averaged over all orderings of I, with
    // the per-(i, prefix) expectations memoized across permutations.
    {
        std::map<std::pair<int, uint32_t>, double> memo;
        const auto prefix_entropy = [&](int i, const std::vector<int>& prefix) {
            uint32_t mask = 0;
            for (int j : prefix) mask |= 1u << j;
            const auto key = std::make_pair(i, mask);
            auto it = memo.find(key);
            if (it != memo.end()) return it->second;
            std::vector<int> sorted(prefix);
            std::sort(sorted.begin(), sorted.end());
            const double v = expected_conditional_entropy(q, i, sorted);
            memo.emplace(key, v);
            return v;
        };

        std::vector<int> perm(I_sorted);
        KahanSum total;
        size_t count = 0;
        do {
            KahanSum chain;
            std::vector<int> prefix;
            for (int i : perm) {
                chain.add(prefix_entropy(i, prefix));
                prefix.push_back(i);
            }
            total.add(chain.value());
            ++count;
        } while (std::next_permutation(perm.begin(), perm.end()));
        out.term_b = count > 0 ? total.value() / static_cast<double>(count) : 0.0;
    }

    return out;
}

double kl_term_b_phi(const JointTable& q, const std::vector<int>& I) {
    validate_subset(q, I);
    std::vector<int> I_sorted(I);
    std::sort(I_sorted.begin(), I_sorted.end());
    KahanSum total;
    for (int i : I_sorted) {
        std::vector<int> rest;
        for (int j : I_sorted) {
            if (j != i) rest.push_back(j);
        }
        for (const auto& [subset, weight] : phi_subsets(rest)) {
            total.add(weight * expected_conditional_entropy(q, i, subset));
        }
    }
    return total.value();
}

namespace {

void cts_enumerate(const JointTable& q, const PolicyKernel& kernel,
                   std::span<const double> gammas, int depth, cts::MaskState& state, double weight,
                   std::vector<KahanSum>& out) {
    const auto masked = state.masked_positions();
    if (masked.empty()) {
        out[q.index_of(state.tokens)].add(weight);
        return;
    }
    const auto pi = kernel(state);
    if (pi.size() != masked.size()) {
        throw ArgumentError("exact_cts_distribution: kernel size mismatch with masked set");
    }
    double pi_total = 0.0;
    for (double p : pi) {
        if (!(p >= 0.0)) throw ArgumentError("exact_cts_distribution: kernel probabilities must be >= 0");
        pi_total += p;
    }
    if (std::abs(pi_total - 1.0) > 1e-9) {
        throw ArgumentError("exact_cts_distribution: kernel probabilities must sum to 1");
    }
    const double gamma = gammas[static_cast<size_t>(depth)];
    for (size_t l = 0; l < masked.size(); ++l) {
        if (pi[l] == 0.0) continue;
        const int j = masked[l];
        const auto tempered = dist::temper(conditional(q, j, state), gamma);
        for (int s = 0; s < q.S(); ++s) {
            const double ps = tempered[s];
            if (ps == 0.0) continue;
            state.tokens[static_cast<size_t>(j)] = s;
            cts_enumerate(q, kernel, gammas, depth + 1, state, weight * pi[l] * ps, out);
            state.tokens[static_cast<size_t>(j)] = -1;
        }
    }
}

}  // namespace

std::vector<double> exact_cts_distribution(const JointTable& q, const PolicyKernel& kernel,
                                           double gamma) {
    const std::vector<double> gammas(static_cast<size_t>(q.D()), gamma);
    return exact_cts_distribution(q, kernel, gammas);
}

std::vector<double> exact_cts_distribution(const JointTable& q, const PolicyKernel& kernel,
                                           std::span<const double> gamma_per_step) {
    if (static_cast<int>(gamma_per_step.size()) != q.D()) {
        throw ArgumentError("exact_cts_distribution: need one gamma per round");
    }
    double paths = static_cast<double>(q.size());
    for (int n = q.D(); n >= 1; --n) paths *= n;
    if (paths > 1e7) {
        throw CapacityError("exact_cts_distribution: S^D * D! exceeds the 1e7 path guard");
    }
    std::vector<KahanSum> acc(q.size());
    cts::MaskState state = cts::MaskState::all_masked(q.D());
    cts_enumerate(q, kernel, gamma_per_step, 0, state, 1.0, acc);
    std::vector<double> out(q.size());
    for (size_t t = 0; t < q.size(); ++t) out[t] = acc[t].value();
    return out;
}

dist::Categorical TableModel::conditional(const cts::MaskState& state, int pos) const {
    return oracle::conditional(table_, pos, state);
}

}  // namespace mdsampler::oracle

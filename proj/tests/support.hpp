#pragma once

// Shared test utilities: brute-force oracles kept deliberately independent of
// the library implementations they check, plus small random generators.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "botune/hypergraph.hpp"
#include "botune/metrics.hpp"
#include "botune/rng.hpp"

namespace botune::testing {

// ---- brute-force derivation enumeration ------------------------------------

struct EnumDeriv {
    std::map<int, double> feats;
    Tokens yield;

    double score(const Weights& w) const {
        double s = 0.0;
        for (const auto& [idx, val] : feats) s += val * w[idx];
        return s;
    }
};

inline std::vector<EnumDeriv> enumerate_node(const Hypergraph& hg,
                                             const std::vector<std::vector<EdgeId>>& incoming,
                                             NodeId v, std::vector<std::vector<EnumDeriv>>& cache,
                                             std::vector<bool>& done, std::size_t cap) {
    if (done[v]) return cache[v];
    std::vector<EnumDeriv> out;
    for (EdgeId eid : incoming[v]) {
        const HyperEdge& e = hg.edges[eid];
        std::vector<std::vector<EnumDeriv>> parts;
        for (NodeId t : e.tails)
            parts.push_back(enumerate_node(hg, incoming, t, cache, done, cap));
        // cross product over tail derivations (arity <= 2)
        const std::size_t n0 = e.tails.empty() ? 1 : parts[0].size();
        const std::size_t n1 = e.tails.size() < 2 ? 1 : parts[1].size();
        for (std::size_t i = 0; i < n0; ++i) {
            for (std::size_t j = 0; j < n1; ++j) {
                EnumDeriv d;
                for (const auto& [idx, val] : e.features) d.feats[idx] += val;
                const EnumDeriv* sub[2] = {e.tails.size() > 0 ? &parts[0][i] : nullptr,
                                           e.tails.size() > 1 ? &parts[1][j] : nullptr};
                for (int k = 0; k < 2; ++k)
                    if (sub[k])
                        for (const auto& [idx, val] : sub[k]->feats) d.feats[idx] += val;
                for (const auto& item : e.yield_template) {
                    if (item.is_slot)
                        d.yield.insert(d.yield.end(), sub[item.slot]->yield.begin(),
                                       sub[item.slot]->yield.end());
                    else
                        d.yield.push_back(item.token);
                }
                out.push_back(std::move(d));
                if (out.size() > cap)
                    throw std::runtime_error("enumeration oracle exceeded cap");
            }
        }
    }
    cache[v] = out;
    done[v] = true;
    return out;
}

inline std::vector<EnumDeriv> enumerate_derivations(const Hypergraph& hg,
                                                    std::size_t cap = 2000000) {
    auto incoming = hg.incoming();
    std::vector<std::vector<EnumDeriv>> cache(hg.num_nodes);
    std::vector<bool> done(hg.num_nodes, false);
    return enumerate_node(hg, incoming, hg.num_nodes - 1, cache, done, cap);
}

inline double best_enumerated_score(const Hypergraph& hg, const Weights& w) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& d : enumerate_derivations(hg)) best = std::max(best, d.score(w));
    return best;
}

// ---- random small graphs (independent of the simulator's generator) --------

inline Hypergraph random_small_graph(Rng& rng, int dim, int max_nodes = 12,
                                     int max_in_edges = 3) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        Rng g = rng.fork(attempt + 1);
        Hypergraph hg;
        hg.dim = dim;
        hg.num_nodes = static_cast<int>(g.uniform_int(2, max_nodes));
        std::vector<int> in_count(hg.num_nodes, 0);
        auto make_features = [&]() {
            FeatureVec f;
            const int nnz = static_cast<int>(g.uniform_int(1, std::min(3, dim)));
            std::map<int, double> m;
            for (int i = 0; i < nnz; ++i)
                m[static_cast<int>(g.uniform_int(0, dim - 1))] = g.uniform(-2.0, 2.0);
            for (const auto& [k, v] : m) f.emplace_back(k, v);
            return f;
        };
        auto make_template = [&](int arity) {
            std::vector<YieldItem> t;
            for (int s = 0; s < arity; ++s) t.push_back(YieldItem::slot_ref(s));
            if (arity == 2 && g.bernoulli(0.3)) std::swap(t[0], t[1]);
            const int terms = static_cast<int>(g.uniform_int(arity == 0 ? 1 : 0, 2));
            for (int i = 0; i < terms; ++i)
                t.insert(t.begin() + g.uniform_int(0, static_cast<int>(t.size())),
                         YieldItem::terminal("t" + std::to_string(g.uniform_int(0, 9))));
            return t;
        };
        for (NodeId v = 0; v < hg.num_nodes; ++v) {
            const int edges = static_cast<int>(g.uniform_int(1, max_in_edges));
            for (int e = 0; e < edges; ++e) {
                HyperEdge edge;
                edge.head = v;
                const int max_arity = std::min(2, v);
                int arity = static_cast<int>(g.uniform_int(0, max_arity));
                if (v > 0 && e == 0 && arity == 0 && g.bernoulli(0.7))
                    arity = 1;  // bias internal nodes toward consuming earlier nodes
                std::vector<NodeId> pool;
                for (NodeId t = 0; t < v; ++t) pool.push_back(t);
                for (int t = 0; t < arity; ++t) {
                    const int pick = static_cast<int>(g.uniform_int(0, static_cast<int>(pool.size()) - 1));
                    edge.tails.push_back(pool[pick]);
                    pool.erase(pool.begin() + pick);
                }
                edge.features = make_features();
                edge.yield_template = make_template(static_cast<int>(edge.tails.size()));
                hg.edges.push_back(std::move(edge));
                ++in_count[v];
            }
        }
        try {
            hg.validate();
        } catch (const std::exception&) {
            continue;  // e.g. some node never used as a tail; redraw
        }
        try {
            if (enumerate_derivations(hg, 20000).empty()) continue;
        } catch (const std::exception&) {
            continue;  // too many derivations for the oracle
        }
        return hg;
    }
    throw std::runtime_error("failed to draw a valid random graph");
}

// ---- independent corpus BLEU oracle -----------------------------------------

// Direct formula evaluation with its own n-gram counting (token-vector keys).
inline double bleu_direct(const std::vector<Tokens>& cands, const std::vector<Tokens>& refs) {
    long long match[4] = {0, 0, 0, 0}, total[4] = {0, 0, 0, 0};
    long long clen = 0, rlen = 0;
    for (std::size_t s = 0; s < cands.size(); ++s) {
        clen += static_cast<long long>(cands[s].size());
        rlen += static_cast<long long>(refs[s].size());
        for (int n = 1; n <= 4; ++n) {
            std::map<std::vector<std::string>, long long> cn, rn;
            for (int i = 0; i + n <= static_cast<int>(cands[s].size()); ++i)
                ++cn[std::vector<std::string>(cands[s].begin() + i, cands[s].begin() + i + n)];
            for (int i = 0; i + n <= static_cast<int>(refs[s].size()); ++i)
                ++rn[std::vector<std::string>(refs[s].begin() + i, refs[s].begin() + i + n)];
            for (const auto& [gram, c] : cn) {
                total[n - 1] += c;
                auto it = rn.find(gram);
                if (it != rn.end()) match[n - 1] += std::min(c, it->second);
            }
        }
    }
    if (clen == 0) return 0.0;
    double logsum = 0.0;
    for (int n = 0; n < 4; ++n) {
        if (match[n] == 0) return 0.0;
        logsum += std::log(static_cast<double>(match[n]) / static_cast<double>(total[n]));
    }
    const double bp = clen >= rlen ? 1.0 : std::exp(1.0 - static_cast<double>(rlen) / clen);
    return bp * std::exp(0.25 * logsum);
}

inline Tokens random_sentence(Rng& rng, int min_len, int max_len, int vocab) {
    Tokens t;
    const int len = static_cast<int>(rng.uniform_int(min_len, max_len));
    for (int i = 0; i < len; ++i)
        t.push_back("v" + std::to_string(rng.uniform_int(0, vocab - 1)));
    return t;
}

}  // namespace botune::testing

#include "botune/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "botune/errors.hpp"
#include "botune/io.hpp"
#include "botune/rng.hpp"

namespace botune {

namespace {

constexpr double kFeatureClip = 5.0;

std::string vocab_token(int i) { return "w" + std::to_string(i); }

// Chart-style sentence graph: one or two nodes per span of a length-`depth`
// source, axiom edges on unit spans, binary edges over split points. Span
// structure keeps any derivation a proper tree (no node reuse).
struct ChartBuilder {
    const TaskParams& p;
    Rng& rng;
    Hypergraph hg;
    // nodes of each span, keyed by (start, end)
    std::map<std::pair<int, int>, std::vector<NodeId>> span_nodes;

    ChartBuilder(const TaskParams& params, Rng& r) : p(params), rng(r) {}

    FeatureVec random_features() {
        FeatureVec f;
        const int nnz = static_cast<int>(rng.uniform_int(2, 5));
        std::set<int> used;
        for (int i = 0; i < nnz; ++i)
            used.insert(static_cast<int>(rng.uniform_int(0, p.core_dims - 1)));
        for (int idx : used) {
            const double v = std::clamp(rng.normal(), -kFeatureClip, kFeatureClip);
            f.emplace_back(idx, v);
        }
        if (p.sparse_dims > 0 && rng.bernoulli(0.6)) {
            const int idx = p.core_dims + static_cast<int>(rng.uniform_int(0, p.sparse_dims - 1));
            FeatureVec sp{{idx, std::clamp(rng.normal(), -kFeatureClip, kFeatureClip)}};
            f = add_features(f, sp);
        }
        return f;
    }

    void build() {
        const int len = p.depth;
        int next_node = 0;
        // unit spans: one node each, 2..4 lexical options
        // yields must reach 4 tokens for BLEU to have 4-gram support
        const int min_toks = std::max(1, (4 + len - 1) / len);
        for (int i = 0; i < len; ++i) {
            const NodeId v = next_node++;
            span_nodes[{i, i + 1}] = {v};
            // single-token sentences degenerate to one fixed derivation
            const int options = len == 1 ? 1 : static_cast<int>(rng.uniform_int(2, 4));
            for (int o = 0; o < options; ++o) {
                HyperEdge e;
                e.head = v;
                const int toks = min_toks + (rng.bernoulli(0.3) ? 1 : 0);
                for (int t = 0; t < toks; ++t)
                    e.yield_template.push_back(YieldItem::terminal(
                        vocab_token(static_cast<int>(rng.uniform_int(0, p.vocab - 1)))));
                e.features = random_features();
                hg.edges.push_back(std::move(e));
            }
        }
        // wider spans
        for (int width = 2; width <= len; ++width) {
            for (int start = 0; start + width <= len; ++start) {
                const int end = start + width;
                const bool is_goal = width == len;
                const int node_count = is_goal ? 1 : (rng.bernoulli(0.35) ? 2 : 1);
                std::vector<NodeId> nodes;
                for (int c = 0; c < node_count; ++c) nodes.push_back(next_node++);
                span_nodes[{start, end}] = nodes;
                for (NodeId head : nodes) {
                    int added = 0;
                    for (int split = start + 1; split < end; ++split) {
                        for (NodeId left : span_nodes[{start, split}]) {
                            for (NodeId right : span_nodes[{split, end}]) {
                                // thin out wide-span charts to keep in-degree moderate
                                if (added > 0 && width > 2 && !rng.bernoulli(0.55)) continue;
                                HyperEdge e;
                                e.head = head;
                                e.tails = {left, right};
                                if (rng.bernoulli(0.15)) {
                                    e.yield_template = {YieldItem::slot_ref(1),
                                                        YieldItem::slot_ref(0)};
                                } else {
                                    e.yield_template = {YieldItem::slot_ref(0),
                                                        YieldItem::slot_ref(1)};
                                }
                                if (rng.bernoulli(0.25)) {
                                    e.yield_template.insert(
                                        e.yield_template.begin() + rng.uniform_int(0, 2),
                                        YieldItem::terminal(vocab_token(
                                            static_cast<int>(rng.uniform_int(0, p.vocab - 1)))));
                                }
                                e.features = random_features();
                                hg.edges.push_back(std::move(e));
                                ++added;
                            }
                        }
                    }
                }
            }
        }
        hg.num_nodes = next_node;
        hg.dim = p.dim();

        // coverage pass: chart thinning can leave a node unused as a tail;
        // attach it to an enclosing span so every node reaches the goal
        std::vector<std::pair<int, int>> span_of(hg.num_nodes);
        for (const auto& [span, nodes] : span_nodes)
            for (NodeId v : nodes) span_of[v] = span;
        std::vector<bool> used(hg.num_nodes, false);
        for (const auto& e : hg.edges)
            for (NodeId t : e.tails) used[t] = true;
        for (NodeId v = 0; v + 1 < hg.num_nodes; ++v) {
            if (used[v]) continue;
            const auto [i, j] = span_of[v];
            HyperEdge e;
            if (j < len) {
                e.head = span_nodes[{i, j + 1}].front();
                e.tails = {v, span_nodes[{j, j + 1}].front()};
            } else {
                e.head = span_nodes[{i - 1, j}].front();
                e.tails = {span_nodes[{i - 1, i}].front(), v};
            }
            e.yield_template = {YieldItem::slot_ref(0), YieldItem::slot_ref(1)};
            e.features = random_features();
            hg.edges.push_back(std::move(e));
            used[v] = true;
        }

        // edge ids must ascend with head topological order for readability;
        // sort edges by head, stable to keep generation order within a node
        std::stable_sort(hg.edges.begin(), hg.edges.end(),
                         [](const HyperEdge& a, const HyperEdge& b) { return a.head < b.head; });
    }
};

// Chooses one incoming edge per node of a derivation tree, top-down.
void pick_planted(const Hypergraph& hg, const std::vector<std::vector<EdgeId>>& incoming,
                  Rng& rng, NodeId v, std::map<NodeId, EdgeId>& planted) {
    if (planted.count(v)) return;
    const auto& in = incoming[v];
    const EdgeId e = in[rng.uniform_int(0, static_cast<int>(in.size()) - 1)];
    planted[v] = e;
    for (NodeId t : hg.edges[e].tails) pick_planted(hg, incoming, rng, t, planted);
}

double set_feature(HyperEdge& e, int idx, double delta) {
    for (auto& [i, v] : e.features) {
        if (i == idx) {
            v += delta;
            return v;
        }
    }
    e.features = add_features(e.features, FeatureVec{{idx, delta}});
    return delta;
}

double get_feature(const HyperEdge& e, int idx) {
    for (const auto& [i, v] : e.features)
        if (i == idx) return v;
    return 0.0;
}

// Raises the planted edge's score under w* by `delta`, spreading the bump
// over several dimensions when the clip bound saturates one. Returns false
// only when every usable dimension is exhausted.
bool boost_edge(HyperEdge& e, const Weights& wstar, const std::vector<int>& dims_by_mag,
                Rng& rng, double delta) {
    // random pick among the strongest dims first, then the rest in order
    std::vector<int> order = dims_by_mag;
    if (order.size() > 1) {
        const int top = std::min<int>(6, static_cast<int>(order.size()));
        std::swap(order[0], order[rng.uniform_int(0, top - 1)]);
    }
    double remaining = delta;
    std::vector<std::pair<int, double>> planned;
    for (int idx : order) {
        const double wj = wstar[idx];
        if (std::abs(wj) < 0.05) continue;
        const double cur = get_feature(e, idx);
        const double target = wj > 0 ? kFeatureClip : -kFeatureClip;
        const double capacity = (target - cur) * wj;  // score gain at the clip
        if (capacity <= 0.0) continue;
        const double use = std::min(remaining, capacity);
        planned.emplace_back(idx, use / wj);
        remaining -= use;
        if (remaining <= 1e-12) {
            for (const auto& [i, bump] : planned) set_feature(e, i, bump);
            return true;
        }
    }
    return false;
}

struct PlantResult {
    bool ok = false;
    Tokens reference;
};

// Adjusts planted-edge features so the planted derivation is the strict
// Viterbi argmax under w*, winning every local comparison by >= margin.
PlantResult plant_reference(Hypergraph& hg, const Weights& wstar, const TaskParams& p,
                            Rng& rng) {
    PlantResult res;
    const auto incoming = hg.incoming();
    std::map<NodeId, EdgeId> planted;
    pick_planted(hg, incoming, rng, hg.num_nodes - 1, planted);

    std::vector<int> dims_by_mag(wstar.size());
    for (int i = 0; i < wstar.size(); ++i) dims_by_mag[i] = i;
    std::sort(dims_by_mag.begin(), dims_by_mag.end(),
              [&](int a, int b) { return std::abs(wstar[a]) > std::abs(wstar[b]); });

    // sparse tasks: planted edges carry a bonus on a truly-nonzero sparse dim,
    // so recovering the sparse block genuinely matters
    std::vector<int> true_sparse;
    for (int i = p.core_dims; i < wstar.size(); ++i)
        if (wstar[i] != 0.0) true_sparse.push_back(i);
    if (!true_sparse.empty()) {
        for (const auto& [v, e] : planted) {
            const int idx = true_sparse[rng.uniform_int(
                0, static_cast<int>(true_sparse.size()) - 1)];
            const double bonus = 0.4 / std::abs(wstar[idx]) * (wstar[idx] > 0 ? 1.0 : -1.0);
            if (std::abs(get_feature(hg.edges[e], idx) + bonus) <= kFeatureClip)
                set_feature(hg.edges[e], idx, bonus);
        }
    }

    std::vector<double> inside(hg.num_nodes, 0.0);
    for (NodeId v = 0; v < hg.num_nodes; ++v) {
        const auto it = planted.find(v);
        const EdgeId pe = it == planted.end() ? -1 : it->second;
        double best_other = -std::numeric_limits<double>::infinity();
        double planted_score = 0.0;
        for (EdgeId e : incoming[v]) {
            double s = dot(hg.edges[e].features, wstar);
            for (NodeId t : hg.edges[e].tails) s += inside[t];
            if (e == pe)
                planted_score = s;
            else
                best_other = std::max(best_other, s);
        }
        if (pe < 0) {
            inside[v] = best_other;
            continue;
        }
        if (std::isfinite(best_other) && planted_score < best_other + p.margin) {
            const double delta = best_other + p.margin - planted_score;
            if (!boost_edge(hg.edges[pe], wstar, dims_by_mag, rng, delta)) return res;
            planted_score = dot(hg.edges[pe].features, wstar);
            for (NodeId t : hg.edges[pe].tails) planted_score += inside[t];
        }
        inside[v] = planted_score;
    }

    // materialize the reference yield from the planted choices
    struct Expander {
        const Hypergraph& hg;
        const std::map<NodeId, EdgeId>& planted;
        void expand(NodeId v, Tokens& out) const {
            const HyperEdge& e = hg.edges[planted.at(v)];
            for (const auto& item : e.yield_template) {
                if (item.is_slot)
                    expand(e.tails[item.slot], out);
                else
                    out.push_back(item.token);
            }
        }
    };
    Expander{hg, planted}.expand(hg.num_nodes - 1, res.reference);
    res.ok = true;
    return res;
}

struct SentenceResult {
    Hypergraph graph;
    Tokens reference;
    int attempts = 1;
};

SentenceResult generate_sentence(const TaskParams& p, const Weights& wstar, Rng base) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        Rng rng = base.fork(attempt);
        ChartBuilder builder(p, rng);
        builder.build();
        Hypergraph hg = std::move(builder.hg);
        const PlantResult plant = plant_reference(hg, wstar, p, rng);
        if (!plant.ok) continue;  // margin infeasible, redraw with a fresh stream
        hg.validate();
        return {std::move(hg), plant.reference, attempt + 1};
    }
    throw ParameterError("could not plant a reference derivation in 100 attempts");
}

Weights draw_true_weights(const TaskParams& p, Rng& rng) {
    Weights w = Weights::Zero(p.dim());
    for (int i = 0; i < p.core_dims; ++i) {
        double v;
        do {
            v = rng.uniform(-1.0, 1.0);
        } while (std::abs(v) < 0.1);  // keep every core dim identifiable
        w[i] = v;
    }
    if (p.sparse_dims > 0 && p.sparse_nonzero > 0) {
        std::set<int> chosen;
        while (static_cast<int>(chosen.size()) < std::min(p.sparse_nonzero, p.sparse_dims))
            chosen.insert(p.core_dims +
                          static_cast<int>(rng.uniform_int(0, p.sparse_dims - 1)));
        for (int idx : chosen) {
            const double mag = rng.uniform(0.3, 0.8);
            w[idx] = rng.bernoulli(0.5) ? mag : -mag;
        }
    }
    return w;
}

}  // namespace

SyntheticTask generate_task(const TaskParams& params) {
    if (params.sentences <= 0) throw ParameterError("task needs at least one sentence");
    if (params.dim() < 2) throw ParameterError("feature dimension K must be >= 2");
    if (params.vocab < 2) throw ParameterError("vocab size must be >= 2");
    if (params.depth < 1) throw ParameterError("depth must be >= 1");
    if (params.beam < 1) throw ParameterError("beam must be >= 1");
    if (params.sparse_nonzero > params.sparse_dims)
        throw ParameterError("sparse_nonzero cannot exceed sparse_dims");

    SyntheticTask task;
    task.params = params;
    Rng root(params.seed);
    Rng wrng = root.fork(7);
    task.true_weights = draw_true_weights(params, wrng);

    for (int s = 0; s < params.sentences; ++s) {
        SentenceResult sent = generate_sentence(params, task.true_weights, root.fork(100 + s));
        sent.graph.sentence_id = s;
        task.regenerated_sentences += sent.attempts - 1;
        task.dev_master.push_back(std::move(sent.graph));
        task.dev_refs.push_back(std::move(sent.reference));
    }
    for (int s = 0; s < params.test_sentences; ++s) {
        SentenceResult sent =
            generate_sentence(params, task.true_weights, root.fork(1000000 + s));
        sent.graph.sentence_id = s;
        task.regenerated_sentences += sent.attempts - 1;
        task.test_master.push_back(std::move(sent.graph));
        task.test_refs.push_back(std::move(sent.reference));
    }
    return task;
}

SyntheticTask generate_task(int num_sentences, int K, int vocab_size, int depth,
                            std::uint64_t seed) {
    TaskParams p;
    p.sentences = num_sentences;
    p.core_dims = K;
    p.vocab = vocab_size;
    p.depth = depth;
    p.seed = seed;
    return generate_task(p);
}

Hypergraph beam_prune(const Hypergraph& master, const Weights& w, int beam) {
    if (beam < 1) throw ParameterError("beam must be >= 1");
    const auto incoming = master.incoming();
    std::vector<double> inside(master.num_nodes, 0.0);
    std::vector<bool> kept(master.edges.size(), false);

    for (NodeId v = 0; v < master.num_nodes; ++v) {
        std::vector<std::pair<double, EdgeId>> scored;
        scored.reserve(incoming[v].size());
        for (EdgeId e : incoming[v]) {
            double s = dot(master.edges[e].features, w);
            for (NodeId t : master.edges[e].tails) s += inside[t];
            scored.emplace_back(s, e);
        }
        // highest score first; equal scores keep the lower edge id
        std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        const int keep = std::min<int>(beam, static_cast<int>(scored.size()));
        for (int i = 0; i < keep; ++i) kept[scored[i].second] = true;
        inside[v] = scored.empty() ? 0.0 : scored[0].first;
    }

    // reachability from the goal through kept edges
    std::vector<bool> marked(master.num_nodes, false);
    marked[master.num_nodes - 1] = true;
    for (NodeId v = master.num_nodes - 1; v >= 0; --v) {
        if (!marked[v]) continue;
        for (EdgeId e : incoming[v])
            if (kept[e])
                for (NodeId t : master.edges[e].tails) marked[t] = true;
    }

    std::vector<NodeId> remap(master.num_nodes, -1);
    int next = 0;
    for (NodeId v = 0; v < master.num_nodes; ++v)
        if (marked[v]) remap[v] = next++;

    Hypergraph out;
    out.sentence_id = master.sentence_id;
    out.dim = master.dim;
    out.num_nodes = next;
    for (EdgeId e = 0; e < static_cast<EdgeId>(master.edges.size()); ++e) {
        if (!kept[e] || !marked[master.edges[e].head]) continue;
        HyperEdge copy = master.edges[e];
        copy.head = remap[copy.head];
        for (NodeId& t : copy.tails) t = remap[t];
        out.edges.push_back(std::move(copy));
    }
    return out;
}

std::vector<Hypergraph> simulated_decode(const SyntheticTask& task, const Weights& w) {
    std::vector<Hypergraph> out;
    out.reserve(task.dev_master.size());
    for (const auto& hg : task.dev_master) out.push_back(beam_prune(hg, w, task.params.beam));
    return out;
}

namespace {

struct KbestCand {
    double score;
    EdgeId edge;
    std::array<int, 2> choice;  // candidate rank used for each tail
};

struct CandOrder {
    bool operator()(const KbestCand& a, const KbestCand& b) const {
        if (a.score != b.score) return a.score < b.score;  // max-heap on score
        if (a.edge != b.edge) return a.edge > b.edge;      // then lowest edge id
        return a.choice > b.choice;
    }
};

}  // namespace

std::vector<Derivation> kbest_derivations(const Hypergraph& hg, const Weights& w, int k) {
    if (k < 1) throw ParameterError("k must be >= 1");
    const auto incoming = hg.incoming();
    std::vector<std::vector<KbestCand>> cands(hg.num_nodes);
    std::vector<double> edge_dot(hg.edges.size());
    for (std::size_t e = 0; e < hg.edges.size(); ++e) edge_dot[e] = dot(hg.edges[e].features, w);

    for (NodeId v = 0; v < hg.num_nodes; ++v) {
        std::priority_queue<KbestCand, std::vector<KbestCand>, CandOrder> frontier;
        std::set<std::pair<EdgeId, std::array<int, 2>>> seen;
        auto push = [&](EdgeId e, std::array<int, 2> choice) {
            const auto& tails = hg.edges[e].tails;
            double s = edge_dot[e];
            for (std::size_t t = 0; t < tails.size(); ++t) {
                const auto& tc = cands[tails[t]];
                if (choice[t] >= static_cast<int>(tc.size())) return;
                s += tc[choice[t]].score;
            }
            if (seen.emplace(e, choice).second) frontier.push({s, e, choice});
        };
        for (EdgeId e : incoming[v]) push(e, {0, 0});
        auto& out = cands[v];
        while (!frontier.empty() && static_cast<int>(out.size()) < k) {
            const KbestCand top = frontier.top();
            frontier.pop();
            out.push_back(top);
            const auto& tails = hg.edges[top.edge].tails;
            for (std::size_t t = 0; t < tails.size(); ++t) {
                auto next = top.choice;
                ++next[t];
                push(top.edge, next);
            }
        }
    }

    // materialize goal candidates into full derivations
    struct Builder {
        const Hypergraph& hg;
        const std::vector<std::vector<KbestCand>>& cands;
        void walk(NodeId v, int rank, Derivation& d) const {
            const KbestCand& c = cands[v][rank];
            const HyperEdge& e = hg.edges[c.edge];
            d.edges.push_back(c.edge);
            d.features = add_features(d.features, e.features);
            for (const auto& item : e.yield_template) {
                if (item.is_slot)
                    walk(e.tails[item.slot], c.choice[item.slot], d);
                else
                    d.yield.push_back(item.token);
            }
        }
    };
    std::vector<Derivation> result;
    const NodeId goal = hg.num_nodes - 1;
    for (int rank = 0; rank < static_cast<int>(cands[goal].size()); ++rank) {
        Derivation d;
        d.score = cands[goal][rank].score;
        Builder{hg, cands}.walk(goal, rank, d);
        result.push_back(std::move(d));
    }
    return result;
}

std::vector<NBestList> simulated_decode_nbest(const SyntheticTask& task, const Weights& w,
                                              int nbest_size) {
    std::vector<NBestList> out;
    out.reserve(task.dev_master.size());
    for (const auto& master : task.dev_master) {
        const Hypergraph pruned = beam_prune(master, w, task.params.beam);
        // over-generate, then dedup by token sequence
        const auto derivs = kbest_derivations(pruned, w, 4 * nbest_size);
        NBestList list;
        list.sentence_id = master.sentence_id;
        std::set<Tokens> seen;
        for (const auto& d : derivs) {
            if (static_cast<int>(list.hyps.size()) >= nbest_size) break;
            if (!seen.insert(d.yield).second) continue;
            list.hyps.push_back({d.yield, d.features, d.score});
        }
        out.push_back(std::move(list));
    }
    return out;
}

double oracle_bleu(const SyntheticTask& task) {
    if (!task.has_true_weights) throw ParameterError("task does not carry true weights");
    CandidateSet cands;
    cands.graphs = simulated_decode(task, task.true_weights);
    return evaluate_point(task.true_weights, cands, task.dev_refs);
}

TuneTask hypergraph_task(const SyntheticTask& task) {
    TuneTask t;
    t.refs = &task.dev_refs;
    t.decode = [&task](const Weights& w) {
        CandidateSet c;
        c.graphs = simulated_decode(task, w);
        return c;
    };
    return t;
}

TuneTask nbest_task(const SyntheticTask& task, int nbest_size) {
    TuneTask t;
    t.refs = &task.dev_refs;
    t.decode = [&task, nbest_size](const Weights& w) {
        CandidateSet c;
        c.nbests = simulated_decode_nbest(task, w, nbest_size);
        return c;
    };
    return t;
}

double test_bleu(const SyntheticTask& task, const Weights& w) {
    if (task.test_master.empty()) return 0.0;
    BleuStats total;
    for (std::size_t s = 0; s < task.test_master.size(); ++s) {
        const Hypergraph pruned = beam_prune(task.test_master[s], w, task.params.beam);
        total += sentence_stats(viterbi_best(pruned, w).yield, task.test_refs[s]);
    }
    return corpus_bleu(total);
}

void save_task(const SyntheticTask& task, const std::string& dir, bool withhold_weights) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    write_hypergraphs(dir + "/dev.hg", task.dev_master);
    write_tokens_file(dir + "/dev.refs", task.dev_refs);
    if (!task.test_master.empty()) {
        write_hypergraphs(dir + "/test.hg", task.test_master);
        write_tokens_file(dir + "/test.refs", task.test_refs);
    }
    std::vector<std::pair<std::string, std::string>> kv;
    const TaskParams& p = task.params;
    kv.emplace_back("schema", "botune-task-1");
    kv.emplace_back("sentences", std::to_string(p.sentences));
    kv.emplace_back("test_sentences", std::to_string(p.test_sentences));
    kv.emplace_back("core_dims", std::to_string(p.core_dims));
    kv.emplace_back("sparse_dims", std::to_string(p.sparse_dims));
    kv.emplace_back("sparse_nonzero", std::to_string(p.sparse_nonzero));
    kv.emplace_back("vocab", std::to_string(p.vocab));
    kv.emplace_back("depth", std::to_string(p.depth));
    kv.emplace_back("beam", std::to_string(p.beam));
    kv.emplace_back("margin", format_double(p.margin));
    kv.emplace_back("seed", std::to_string(p.seed));
    if (withhold_weights || !task.has_true_weights) {
        kv.emplace_back("true_weights", "withheld");
    } else {
        std::string ws;
        for (int i = 0; i < task.true_weights.size(); ++i) {
            if (i) ws += ',';
            ws += format_double(task.true_weights[i]);
        }
        kv.emplace_back("true_weights", ws);
    }
    write_kv_file(dir + "/task.meta", kv);
}

SyntheticTask load_task(const std::string& dir) {
    const auto meta = read_kv_file(dir + "/task.meta");
    auto need = [&](const std::string& key) {
        auto it = meta.find(key);
        if (it == meta.end()) throw ParseError(dir + "/task.meta", 0, "missing key " + key);
        return it->second;
    };
    SyntheticTask task;
    TaskParams& p = task.params;
    p.sentences = std::stoi(need("sentences"));
    p.test_sentences = std::stoi(need("test_sentences"));
    p.core_dims = std::stoi(need("core_dims"));
    p.sparse_dims = std::stoi(need("sparse_dims"));
    p.sparse_nonzero = std::stoi(need("sparse_nonzero"));
    p.vocab = std::stoi(need("vocab"));
    p.depth = std::stoi(need("depth"));
    p.beam = std::stoi(need("beam"));
    p.margin = std::stod(need("margin"));
    p.seed = std::stoull(need("seed"));

    task.dev_master = read_hypergraphs(dir + "/dev.hg");
    task.dev_refs = read_tokens_file(dir + "/dev.refs");
    if (std::filesystem::exists(dir + "/test.hg")) {
        task.test_master = read_hypergraphs(dir + "/test.hg");
        task.test_refs = read_tokens_file(dir + "/test.refs");
    }
    if (task.dev_refs.size() != task.dev_master.size())
        throw AlignmentError("dev.hg and dev.refs differ in sentence count");
    if (task.test_refs.size() != task.test_master.size())
        throw AlignmentError("test.hg and test.refs differ in sentence count");

    const std::string tw = need("true_weights");
    if (tw == "withheld") {
        task.has_true_weights = false;
        task.true_weights = Weights::Zero(p.dim());
    } else {
        std::vector<double> vals;
        std::stringstream ss(tw);
        std::string item;
        while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
        if (static_cast<int>(vals.size()) != p.dim())
            throw ParseError(dir + "/task.meta", 0, "true_weights length mismatch");
        task.true_weights = Eigen::Map<Weights>(vals.data(), vals.size());
    }
    return task;
}

std::uint64_t task_fingerprint(const SyntheticTask& task) {
    std::uint64_t h = 0;
    auto mix_graphs = [&](const std::vector<Hypergraph>& graphs) {
        for (const auto& g : graphs) {
            h = Rng::mix(h, g.num_nodes);
            for (const auto& e : g.edges) {
                h = Rng::mix(h, static_cast<std::uint64_t>(e.head) * 31 + e.tails.size());
                for (const auto& [idx, val] : e.features) {
                    std::uint64_t bits;
                    static_assert(sizeof bits == sizeof val);
                    std::memcpy(&bits, &val, sizeof bits);
                    h = Rng::mix(h, bits ^ idx);
                }
            }
        }
    };
    mix_graphs(task.dev_master);
    mix_graphs(task.test_master);
    for (const auto& sent : task.dev_refs)
        for (const auto& tok : sent) h = Rng::mix(h, fnv1a_bytes(tok, 0));
    h = Rng::mix(h, task.params.seed);
    h = Rng::mix(h, task.params.beam);
    return h;
}

}  // namespace botune

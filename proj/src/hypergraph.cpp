#include "botune/hypergraph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "botune/errors.hpp"

namespace botune {

double dot(const FeatureVec& f, const Weights& w) {
    double s = 0.0;
    for (const auto& [idx, val] : f) {
        if (idx < 0 || idx >= w.size())
            throw DimensionError("feature index " + std::to_string(idx) +
                                 " out of range for weight vector of length " +
                                 std::to_string(w.size()));
        s += val * w[idx];
    }
    return s;
}

FeatureVec add_features(const FeatureVec& a, const FeatureVec& b) {
    FeatureVec out;
    out.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            out.push_back(a[i++]);
        } else if (b[j].first < a[i].first) {
            out.push_back(b[j++]);
        } else {
            out.emplace_back(a[i].first, a[i].second + b[j].second);
            ++i, ++j;
        }
    }
    for (; i < a.size(); ++i) out.push_back(a[i]);
    for (; j < b.size(); ++j) out.push_back(b[j]);
    return out;
}

std::vector<std::vector<EdgeId>> Hypergraph::incoming() const {
    std::vector<std::vector<EdgeId>> in(num_nodes);
    for (EdgeId e = 0; e < static_cast<EdgeId>(edges.size()); ++e)
        in[edges[e].head].push_back(e);
    return in;
}

void Hypergraph::validate() const {
    if (num_nodes <= 0) throw ParameterError("hypergraph has no nodes");
    std::vector<bool> has_in(num_nodes, false), has_out(num_nodes, false);
    for (const auto& e : edges) {
        if (e.head < 0 || e.head >= num_nodes)
            throw ParameterError("edge head out of range");
        if (e.tails.size() > 2)
            throw ParameterError("edge arity exceeds 2");
        has_in[e.head] = true;
        for (NodeId t : e.tails) {
            if (t < 0 || t >= e.head)
                throw ParameterError("edge tail does not precede its head in topological order");
            has_out[t] = true;
        }
        std::vector<int> slot_uses(e.tails.size(), 0);
        for (const auto& item : e.yield_template) {
            if (!item.is_slot) continue;
            if (item.slot < 0 || item.slot >= static_cast<int>(e.tails.size()))
                throw ParameterError("yield template references missing tail slot");
            ++slot_uses[item.slot];
        }
        for (int u : slot_uses)
            if (u != 1)
                throw ParameterError("yield template must reference each tail slot exactly once");
        for (const auto& [idx, val] : e.features) {
            if (idx < 0 || idx >= dim)
                throw ParameterError("feature index out of range for dimension K=" + std::to_string(dim));
            (void)val;
        }
    }
    for (NodeId v = 0; v < num_nodes; ++v) {
        if (!has_in[v])
            throw ParameterError("node " + std::to_string(v) + " has no incoming edge");
        if (v != num_nodes - 1 && !has_out[v])
            throw ParameterError("non-goal node " + std::to_string(v) + " has no path to the goal");
    }
    if (has_out[num_nodes - 1])
        throw ParameterError("goal node has outgoing edges");
}

namespace {

void expand_yield(const Hypergraph& hg, const std::vector<EdgeId>& chosen, NodeId v,
                  Tokens& out) {
    const HyperEdge& e = hg.edges[chosen[v]];
    for (const auto& item : e.yield_template) {
        if (item.is_slot)
            expand_yield(hg, chosen, e.tails[item.slot], out);
        else
            out.push_back(item.token);
    }
}

void collect_tree(const Hypergraph& hg, const std::vector<EdgeId>& chosen, NodeId v,
                  Derivation& d) {
    const EdgeId eid = chosen[v];
    d.edges.push_back(eid);
    d.features = add_features(d.features, hg.edges[eid].features);
    for (NodeId t : hg.edges[eid].tails) collect_tree(hg, chosen, t, d);
}

}  // namespace

Derivation viterbi_best(const Hypergraph& hg, const Weights& w) {
    if (hg.dim != static_cast<int>(w.size()))
        throw DimensionError("weight vector length " + std::to_string(w.size()) +
                             " does not match hypergraph dimension " + std::to_string(hg.dim));
    const double neg_inf = -std::numeric_limits<double>::infinity();
    std::vector<double> best(hg.num_nodes, neg_inf);
    std::vector<EdgeId> chosen(hg.num_nodes, -1);
    // edge ids ascend within the loop, so strict improvement keeps the lowest id
    for (EdgeId e = 0; e < static_cast<EdgeId>(hg.edges.size()); ++e) {
        const HyperEdge& edge = hg.edges[e];
        double s = dot(edge.features, w);
        for (NodeId t : edge.tails) s += best[t];
        if (s > best[edge.head]) {
            best[edge.head] = s;
            chosen[edge.head] = e;
        }
    }
    const NodeId goal = hg.num_nodes - 1;
    if (chosen[goal] < 0) throw ParameterError("goal node is underivable");

    Derivation d;
    d.score = best[goal];
    collect_tree(hg, chosen, goal, d);
    expand_yield(hg, chosen, goal, d.yield);
    return d;
}

std::vector<Derivation> rescore_all(const std::vector<Hypergraph>& hgs, const Weights& w) {
    std::vector<Derivation> out;
    out.reserve(hgs.size());
    for (const auto& hg : hgs) out.push_back(viterbi_best(hg, w));
    return out;
}

std::vector<Hypergraph> union_graphs(const std::vector<Hypergraph>& current,
                                     const std::vector<Hypergraph>& previous) {
    if (previous.empty()) return current;
    if (current.size() != previous.size())
        throw AlignmentError("hypergraph lists differ in length: " +
                             std::to_string(current.size()) + " vs " +
                             std::to_string(previous.size()));
    std::vector<Hypergraph> out;
    out.reserve(current.size());
    for (std::size_t s = 0; s < current.size(); ++s) {
        const Hypergraph& a = current[s];
        const Hypergraph& b = previous[s];
        if (a.sentence_id != b.sentence_id)
            throw AlignmentError("sentence id mismatch at position " + std::to_string(s) +
                                 ": " + std::to_string(a.sentence_id) + " vs " +
                                 std::to_string(b.sentence_id));
        if (a.dim != b.dim)
            throw DimensionError("cannot union graphs of dimension " + std::to_string(a.dim) +
                                 " and " + std::to_string(b.dim));
        Hypergraph m;
        m.sentence_id = a.sentence_id;
        m.dim = a.dim;
        m.num_nodes = a.num_nodes + b.num_nodes + 1;
        m.edges.reserve(a.edges.size() + b.edges.size() + 2);
        for (const auto& e : a.edges) m.edges.push_back(e);
        const int off = a.num_nodes;
        for (auto e : b.edges) {
            e.head += off;
            for (auto& t : e.tails) t += off;
            m.edges.push_back(std::move(e));
        }
        const NodeId goal = m.num_nodes - 1;
        HyperEdge ga{goal, {a.num_nodes - 1}, {}, {YieldItem::slot_ref(0)}};
        HyperEdge gb{goal, {off + b.num_nodes - 1}, {}, {YieldItem::slot_ref(0)}};
        m.edges.push_back(std::move(ga));
        m.edges.push_back(std::move(gb));
        out.push_back(std::move(m));
    }
    return out;
}

double count_derivations(const Hypergraph& hg) {
    std::vector<double> count(hg.num_nodes, 0.0);
    for (const auto& e : hg.edges) {
        double c = 1.0;
        for (NodeId t : e.tails) c *= count[t];
        count[e.head] += c;
    }
    return count[hg.num_nodes - 1];
}

}  // namespace botune

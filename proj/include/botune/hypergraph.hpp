#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "botune/metrics.hpp"

namespace botune {

using Weights = Eigen::VectorXd;
using NodeId = int;
using EdgeId = int;

// Sparse feature vector: (index, value) pairs sorted by index, unique indices.
using FeatureVec = std::vector<std::pair<int, double>>;

double dot(const FeatureVec& f, const Weights& w);
FeatureVec add_features(const FeatureVec& a, const FeatureVec& b);

// One item of a target-side yield template: either a literal token or a
// reference to the sub-yield of tail slot `slot`.
struct YieldItem {
    bool is_slot = false;
    int slot = 0;
    std::string token;

    static YieldItem slot_ref(int s) { return YieldItem{true, s, {}}; }
    static YieldItem terminal(std::string t) { return YieldItem{false, 0, std::move(t)}; }
    bool operator==(const YieldItem&) const = default;
};

struct HyperEdge {
    NodeId head = 0;
    std::vector<NodeId> tails;  // 0, 1 or 2 entries
    FeatureVec features;
    std::vector<YieldItem> yield_template;  // references each tail slot exactly once
    bool operator==(const HyperEdge&) const = default;
};

// Acyclic derivation forest. Node ids are 0..num_nodes-1 and the id order is
// the stored topological order: every edge's tails precede its head. The goal
// node is num_nodes-1 and has no outgoing edges.
struct Hypergraph {
    int sentence_id = 0;
    int num_nodes = 0;
    int dim = 0;  // feature dimension K
    std::vector<HyperEdge> edges;  // edge id = position

    // incoming edge ids per node, ascending
    std::vector<std::vector<EdgeId>> incoming() const;

    // Checks all structural invariants; throws ParameterError on violation.
    void validate() const;
};

// A derivation tree rooted at the goal node.
struct Derivation {
    std::vector<EdgeId> edges;  // chosen edges, one per node of the tree
    Tokens yield;
    FeatureVec features;  // exact sum of chosen edges' features
    double score = 0.0;
};

// Maximum-score derivation under w. Ties are resolved toward the lowest edge
// id at each node, so results are reproducible bit-for-bit.
Derivation viterbi_best(const Hypergraph& hg, const Weights& w);

// Per-sentence viterbi_best over a list of graphs; order preserved.
std::vector<Derivation> rescore_all(const std::vector<Hypergraph>& hgs, const Weights& w);

// Per-sentence merge whose derivation set is the union of both inputs'
// derivation sets: both graphs are joined under a fresh goal node with two
// zero-feature unary goal edges. Lists must be aligned by sentence_id.
// An empty `previous` returns `current` unchanged.
std::vector<Hypergraph> union_graphs(const std::vector<Hypergraph>& current,
                                     const std::vector<Hypergraph>& previous);

// Number of complete derivations, computed in doubles (counts grow fast).
double count_derivations(const Hypergraph& hg);

}  // namespace botune

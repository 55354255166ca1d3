#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "botune/hypergraph.hpp"
#include "botune/nbest.hpp"
#include "botune/tuner.hpp"

namespace botune {

struct TaskParams {
    int sentences = 50;
    int test_sentences = 0;
    int core_dims = 18;      // dense block (the "default decoder features" analog)
    int sparse_dims = 0;     // optional sparse block appended after the core
    int sparse_nonzero = 0;  // truly nonzero sparse weights planted in w*
    int vocab = 50;
    int depth = 6;           // source length; spans up to this width
    int beam = 4;            // decoder pruning width
    double margin = 0.5;     // planted-derivation win margin under w*
    std::uint64_t seed = 1;

    int dim() const { return core_dims + sparse_dims; }
};

// A synthetic translation task: per-sentence master hypergraphs with a
// planted weight vector w* whose Viterbi derivations yield the references
// exactly. Decoding = beam-pruning the master graphs under a weight vector,
// which makes the candidate set depend on the weights.
struct SyntheticTask {
    TaskParams params;
    std::vector<Hypergraph> dev_master;
    RefCorpus dev_refs;
    std::vector<Hypergraph> test_master;
    RefCorpus test_refs;
    Weights true_weights;
    bool has_true_weights = true;
    int regenerated_sentences = 0;  // margin-infeasible graphs that were redrawn

    int dim() const { return params.dim(); }
};

SyntheticTask generate_task(const TaskParams& params);
SyntheticTask generate_task(int num_sentences, int K, int vocab_size, int depth,
                            std::uint64_t seed);

// Beam-prunes one master graph: at each node in topological order keep the
// `beam` incoming edges with the highest Viterbi inside score under w, then
// drop nodes no longer on a path to the goal.
Hypergraph beam_prune(const Hypergraph& master, const Weights& w, int beam);

// Per-sentence pruned dev hypergraphs under w.
std::vector<Hypergraph> simulated_decode(const SyntheticTask& task, const Weights& w);

// K-best derivations of a (pruned) hypergraph, by score descending.
std::vector<Derivation> kbest_derivations(const Hypergraph& hg, const Weights& w, int k);

// N-best lists from the pruned dev graphs, deduplicated by token sequence.
std::vector<NBestList> simulated_decode_nbest(const SyntheticTask& task, const Weights& w,
                                              int nbest_size);

// Corpus BLEU of decoding with the planted weights: the known optimum.
double oracle_bleu(const SyntheticTask& task);

// Tuner wiring: decode the dev portion as hypergraphs / N-best lists.
TuneTask hypergraph_task(const SyntheticTask& task);
TuneTask nbest_task(const SyntheticTask& task, int nbest_size);

// Test-set BLEU of decoding the held-out graphs with w.
double test_bleu(const SyntheticTask& task, const Weights& w);

// Task directory layout: task.meta, dev.hg, dev.refs, test.hg, test.refs.
void save_task(const SyntheticTask& task, const std::string& dir, bool withhold_weights);
SyntheticTask load_task(const std::string& dir);

// Fingerprint over the serialized task files, for report cross-checks.
std::uint64_t task_fingerprint(const SyntheticTask& task);

}  // namespace botune

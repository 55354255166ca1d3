#pragma once

#include <vector>

#include "botune/hypergraph.hpp"
#include "botune/metrics.hpp"

namespace botune {

struct NBestHyp {
    Tokens tokens;
    FeatureVec features;
    double score = 0.0;
};

// Per-sentence candidate translations, deduplicated by token sequence.
struct NBestList {
    int sentence_id = 0;
    std::vector<NBestHyp> hyps;
};

// Index of the highest-scoring hypothesis under w; ties go to the lowest index.
int argmax_hypothesis(const NBestList& list, const Weights& w);

}  // namespace botune

#pragma once

#include <cstdint>
#include <vector>

#include "botune/metrics.hpp"
#include "botune/nbest.hpp"
#include "botune/tuner.hpp"

namespace botune {

// One linear segment of the per-sentence score envelope: hypothesis
// `hypothesis` is the argmax for step parameters in [gamma_lo, gamma_hi).
struct EnvelopeSegment {
    double gamma_lo = 0.0;  // -inf on the first segment
    double gamma_hi = 0.0;  // +inf on the last
    int hypothesis = 0;
    BleuStats stats;
};

// Upper envelope of the lines a_i + gamma * b_i, left to right. Segments
// partition the real line and the argmax changes at every boundary.
std::vector<std::pair<double, int>> upper_envelope(
    const std::vector<std::pair<double, double>>& lines);

struct LineSearchResult {
    double gamma = 0.0;
    double bleu = 0.0;
};

// Exact 1-D optimisation of corpus BLEU along w + gamma * direction via the
// piecewise-linear envelope sweep. gamma = 0 is always among the candidates.
LineSearchResult line_search(const std::vector<NBestList>& nbests, const RefCorpus& refs,
                             const Weights& w, const Weights& direction);

// Per-sentence envelope segments along a direction, with BLEU stats attached.
std::vector<EnvelopeSegment> sentence_envelope(const NBestList& nbest, const Tokens& ref,
                                               const Weights& w, const Weights& direction);

struct MertConfig {
    int outer_iters = 10;
    int nbest_size = 100;
    int random_directions = 10;  // per sweep pass, on top of the coordinate axes
    int max_passes = 50;
    std::uint64_t seed = 0;
    double min_gain = 1e-9;  // accept only strictly improving steps
};

// Classical N-best MERT: decode, merge with all accumulated lists
// (deduplicated by token sequence), and sweep line searches along coordinate
// axes plus random directions until no direction improves; stop when a
// decode adds no new hypotheses or outer_iters is reached. The task's decode
// must produce N-best candidate sets.
RunRecord mert_outer(const TuneTask& task, const MertConfig& cfg, const Weights& w0);

}  // namespace botune

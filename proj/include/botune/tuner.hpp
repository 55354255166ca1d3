#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "botune/hypergraph.hpp"
#include "botune/metrics.hpp"
#include "botune/nbest.hpp"
#include "botune/rng.hpp"
#include "botune/surrogate.hpp"

namespace botune {

enum class Variant { NBL, HG, CHG };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct TunerConfig {
    Variant variant = Variant::HG;
    double bound_b = 0.1;       // box half-width around the incumbent
    int inner_iters = 100;      // EI rounds per decode iteration
    int outer_iters = 10;       // decode iterations
    int init_samples = 10;      // initial design size (incumbent included)
    int candidate_pool = 2000;  // fresh uniform points scored per EI round
    int nbest_size = 100;       // hypotheses per sentence for the NBL variant
    std::uint64_t seed = 0;
    double plateau_tol = 5e-4;  // stop when dev BLEU gains stay below this
    int plateau_patience = 2;   // ...for this many consecutive iterations
    FitOptions fit;
};

// Axis-aligned box { x : |x_k - center_k| <= half_width }.
struct SearchBound {
    Eigen::VectorXd center;
    double half_width = 0.1;
    bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;
};

// Fixed candidate sets for one decode iteration: either pruned hypergraphs
// or N-best lists, aligned with the reference corpus by position.
struct CandidateSet {
    std::vector<Hypergraph> graphs;
    std::vector<NBestList> nbests;
    bool holds_graphs() const { return !graphs.empty() || nbests.empty(); }
    std::size_t sentences() const { return holds_graphs() ? graphs.size() : nbests.size(); }
    double total_derivations() const;
};

// Corpus BLEU of the per-sentence argmax translations under x over a fixed
// candidate set. The candidate set is not re-decoded.
double evaluate_point(const Weights& x, const CandidateSet& candidates, const RefCorpus& refs);

struct InnerRound {
    double y = 0.0;     // observed objective value
    double best = 0.0;  // running maximum (the BO score)
};

struct InnerResult {
    Eigen::VectorXd best_x;
    double best_y = 0.0;
    std::vector<InnerRound> trace;  // initial design evaluations included
    int gp_fallbacks = 0;           // rounds that fell back to a uniform point
};

// One bounded EI loop over a black-box objective: Latin hypercube initial
// design (box center always included), then inner_iters rounds of
// fit -> sample fresh candidate pool -> argmax EI -> evaluate.
InnerResult inner_bo_loop(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const SearchBound& bound, const TunerConfig& cfg, Rng& rng);

struct IterationRecord {
    int iteration = 0;
    Weights weights;               // incumbent decoded this iteration
    double dev_bleu = 0.0;         // corpus BLEU of the fresh decode
    Eigen::VectorXd x_best;        // inner-loop argmax, in search-space coords
    double bo_score = 0.0;         // best inner objective value
    std::vector<InnerRound> inner_trace;
    double candidate_derivations = 0.0;
    int gp_fallbacks = 0;
    bool ran_inner = true;         // false when the plateau rule stopped first
    double wall_ms = 0.0;          // diagnostics only; never serialized into reports
};

struct RunRecord {
    std::vector<IterationRecord> iterations;
    Weights final_weights;  // incumbent with the highest decoded dev BLEU
    double final_dev_bleu = 0.0;
    int best_iteration = 0;
    bool plateaued = false;
};

// A decodable tuning task: decode(w) produces fresh candidate sets for w.
struct TuneTask {
    std::function<CandidateSet(const Weights&)> decode;
    const RefCorpus* refs = nullptr;
};

// Geometry of the bounded search: the BO loop runs in a (possibly
// lower-dimensional) space that maps into full weight vectors around the
// incumbent. The identity geometry recovers plain weight-space search.
struct SearchGeometry {
    int dim = 0;
    std::function<Eigen::VectorXd(const Weights&)> center_of;
    std::function<Weights(const Weights&, const Eigen::VectorXd&)> apply;

    static SearchGeometry identity(int dim);
    // Search restricted to a subset of weight coordinates.
    static SearchGeometry coordinate_subset(int full_dim, std::vector<int> coords);
};

// Bounded BO tuning (Hypergraph BO and variants): per iteration decode with
// the incumbent, score it, optionally merge with the previous iteration's
// graphs (CHG), run the inner loop, and adopt its argmax. Stops at
// outer_iters or when decoded dev BLEU plateaus. Returns the incumbent with
// the highest decoded dev BLEU seen.
RunRecord outer_loop(const TuneTask& task, const TunerConfig& cfg, const Weights& w0);

RunRecord outer_loop_in_space(const TuneTask& task, const TunerConfig& cfg, const Weights& w0,
                              const SearchGeometry& geometry);

}  // namespace botune

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "botune/tuner.hpp"

namespace botune {

// Random embedding from a low-dimensional z-space into a high-dimensional
// weight block. Rows of the regularised matrix are L1-normalized, so
// |(A_reg z)_m| <= ||z||_inf : every projected update stays inside the box.
struct Embedding {
    Eigen::MatrixXd raw;   // h x l, i.i.d. standard normal entries
    Eigen::MatrixXd reg;   // raw with each row divided by its L1 norm
    Weights base;          // incumbent weights of the embedded block, length h
    double z_half_width = 0.1;
    int redrawn_rows = 0;  // all-zero rows regenerated during construction

    int high_dim() const { return static_cast<int>(reg.rows()); }
    int low_dim() const { return static_cast<int>(reg.cols()); }
};

// Draws the random matrix and L1-normalizes its rows; any all-zero row is
// redrawn. Requires l <= h.
Embedding make_embedding(int high_dim, int low_dim, Rng& rng, double z_half_width = 0.1);

// Row-wise L1 normalization with zero-row redraw; exposed for testing.
Eigen::MatrixXd regularize_rows(Eigen::MatrixXd raw, Rng& rng, int* redrawn = nullptr);

// base + A_reg z, length h.
Weights project(const Embedding& emb, const Eigen::VectorXd& z);

struct RemboConfig {
    int low_dim = 8;
    int restarts = 4;  // independent embeddings; the best run by dev BLEU wins
    double z_half_width = 0.1;
    std::uint64_t seed = 0;
};

struct RemboResult {
    RunRecord record;        // best restart's run, with the core step prepended
    RunRecord core_record;   // step 1: core-only tuning
    int best_restart = 0;
    std::uint64_t best_embedding_seed = 0;
    std::vector<double> restart_dev_bleu;
    Weights final_weights;
    double final_dev_bleu = 0.0;
};

// Two-step coordinate ascent for sparse high-dimensional weights:
// step 1 tunes the core block with the sparse block pinned at zero; step 2
// freezes the core and runs bounded BO in z-space over random embeddings of
// the sparse block. Core weights are bit-identical before and after step 2.
RemboResult rembo_tune(const TuneTask& task, const TunerConfig& cfg, const RemboConfig& rcfg,
                       const Weights& w0, int core_dims, int sparse_dims);

}  // namespace botune

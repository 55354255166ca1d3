#include "botune/embedding.hpp"

#include <cmath>

#include "botune/errors.hpp"

namespace botune {

Eigen::MatrixXd regularize_rows(Eigen::MatrixXd raw, Rng& rng, int* redrawn) {
    int redraws = 0;
    for (int m = 0; m < raw.rows(); ++m) {
        double norm = raw.row(m).cwiseAbs().sum();
        while (norm == 0.0) {
            for (int n = 0; n < raw.cols(); ++n) raw(m, n) = rng.normal();
            norm = raw.row(m).cwiseAbs().sum();
            ++redraws;
        }
        raw.row(m) /= norm;
    }
    if (redrawn) *redrawn = redraws;
    return raw;
}

Embedding make_embedding(int high_dim, int low_dim, Rng& rng, double z_half_width) {
    if (low_dim < 1) throw ParameterError("embedding low dimension must be >= 1");
    if (low_dim > high_dim)
        throw ParameterError("embedding low dimension " + std::to_string(low_dim) +
                             " exceeds block dimension " + std::to_string(high_dim));
    Embedding emb;
    emb.raw.resize(high_dim, low_dim);
    for (int m = 0; m < high_dim; ++m)
        for (int n = 0; n < low_dim; ++n) emb.raw(m, n) = rng.normal();
    emb.reg = regularize_rows(emb.raw, rng, &emb.redrawn_rows);
    emb.base = Weights::Zero(high_dim);
    emb.z_half_width = z_half_width;
    return emb;
}

Weights project(const Embedding& emb, const Eigen::VectorXd& z) {
    if (z.size() != emb.low_dim())
        throw DimensionError("projection input has length " + std::to_string(z.size()) +
                             ", embedding expects " + std::to_string(emb.low_dim()));
    return emb.base + emb.reg * z;
}

RemboResult rembo_tune(const TuneTask& task, const TunerConfig& cfg, const RemboConfig& rcfg,
                       const Weights& w0, int core_dims, int sparse_dims) {
    if (core_dims + sparse_dims != w0.size())
        throw DimensionError("core + sparse dims must equal the weight dimension");
    if (rcfg.low_dim > sparse_dims && rcfg.low_dim > 0)
        throw ParameterError("low_dim exceeds the sparse block size");

    RemboResult res;

    // step 1: tune the core block only, sparse weights fixed at zero
    Weights start = w0;
    start.tail(sparse_dims).setZero();
    std::vector<int> core_coords(core_dims);
    for (int i = 0; i < core_dims; ++i) core_coords[i] = i;
    res.core_record = outer_loop_in_space(
        task, cfg, start, SearchGeometry::coordinate_subset(w0.size(), core_coords));
    const Weights w1 = res.core_record.final_weights;

    if (rcfg.low_dim == 0 || sparse_dims == 0) {
        // degenerate configuration: plain bounded BO on the core features
        res.record = res.core_record;
        res.final_weights = w1;
        res.final_dev_bleu = res.core_record.final_dev_bleu;
        res.restart_dev_bleu = {res.final_dev_bleu};
        return res;
    }

    // step 2: freeze the core, search the sparse block through random
    // embeddings; independent restarts keep the best run by dev BLEU
    Rng root(Rng::mix(rcfg.seed, 0xe3bdULL));
    double best = -1.0;
    for (int r = 0; r < rcfg.restarts; ++r) {
        Rng erng = root.fork(r);
        const std::uint64_t emb_seed = erng.seed();
        Embedding emb = make_embedding(sparse_dims, rcfg.low_dim, erng, rcfg.z_half_width);

        SearchGeometry geom;
        geom.dim = rcfg.low_dim;
        geom.center_of = [l = rcfg.low_dim](const Weights&) {
            return Eigen::VectorXd::Zero(l).eval();
        };
        geom.apply = [&emb, core_dims, sparse_dims](const Weights& w,
                                                    const Eigen::VectorXd& z) {
            Weights out = w;
            out.tail(sparse_dims) += emb.reg * z;
            return out;
        };

        TunerConfig zcfg = cfg;
        zcfg.bound_b = rcfg.z_half_width;
        zcfg.seed = Rng::mix(cfg.seed, 0xc0ffee + r);
        RunRecord run = outer_loop_in_space(task, zcfg, w1, geom);
        res.restart_dev_bleu.push_back(run.final_dev_bleu);
        if (run.final_dev_bleu > best) {
            best = run.final_dev_bleu;
            res.record = std::move(run);
            res.best_restart = r;
            res.best_embedding_seed = emb_seed;
        }
    }
    res.final_weights = res.record.final_weights;
    res.final_dev_bleu = res.record.final_dev_bleu;
    return res;
}

}  // namespace botune

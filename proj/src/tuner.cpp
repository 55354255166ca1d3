#include "botune/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <memory>
#include <numeric>

#include "botune/errors.hpp"

namespace botune {

std::string variant_name(Variant v) {
    switch (v) {
        case Variant::NBL: return "nbl-bo";
        case Variant::HG: return "hg-bo";
        case Variant::CHG: return "chg-bo";
    }
    return "hg-bo";
}

Variant variant_from_name(const std::string& name) {
    if (name == "nbl-bo" || name == "nbl") return Variant::NBL;
    if (name == "hg-bo" || name == "hg") return Variant::HG;
    if (name == "chg-bo" || name == "chg") return Variant::CHG;
    throw ParameterError("unknown variant '" + name + "'");
}

bool SearchBound::contains(const Eigen::VectorXd& x, double tol) const {
    if (x.size() != center.size()) return false;
    return ((x - center).cwiseAbs().array() <= half_width + tol).all();
}

double CandidateSet::total_derivations() const {
    double total = 0.0;
    if (holds_graphs())
        for (const auto& g : graphs) total += count_derivations(g);
    else
        for (const auto& l : nbests) total += static_cast<double>(l.hyps.size());
    return total;
}

int argmax_hypothesis(const NBestList& list, const Weights& w) {
    if (list.hyps.empty()) throw ParameterError("empty N-best list");
    int best = 0;
    double best_score = dot(list.hyps[0].features, w);
    for (int i = 1; i < static_cast<int>(list.hyps.size()); ++i) {
        const double s = dot(list.hyps[i].features, w);
        if (s > best_score) {
            best_score = s;
            best = i;
        }
    }
    return best;
}

double evaluate_point(const Weights& x, const CandidateSet& candidates, const RefCorpus& refs) {
    if (candidates.sentences() != refs.size())
        throw AlignmentError("candidate set and reference corpus differ in length");
    BleuStats total;
    if (candidates.holds_graphs()) {
        for (std::size_t s = 0; s < candidates.graphs.size(); ++s)
            total += sentence_stats(viterbi_best(candidates.graphs[s], x).yield, refs[s]);
    } else {
        for (std::size_t s = 0; s < candidates.nbests.size(); ++s) {
            const NBestList& list = candidates.nbests[s];
            total += sentence_stats(list.hyps[argmax_hypothesis(list, x)].tokens, refs[s]);
        }
    }
    return corpus_bleu(total);
}

namespace {

// Latin hypercube in the unit box: one stratum per point and dimension.
Eigen::MatrixXd latin_hypercube(int points, int dim, Rng& rng) {
    Eigen::MatrixXd u(points, dim);
    std::vector<int> perm(points);
    for (int k = 0; k < dim; ++k) {
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = points - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.uniform_int(0, i)]);
        for (int i = 0; i < points; ++i)
            u(i, k) = (perm[i] + rng.uniform()) / points;
    }
    return u;
}

}  // namespace

InnerResult inner_bo_loop(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const SearchBound& bound, const TunerConfig& cfg, Rng& rng) {
    const int d = static_cast<int>(bound.center.size());
    if (d <= 0) throw ParameterError("inner loop needs a non-empty search space");
    if (bound.half_width <= 0.0) throw ParameterError("bound half-width must be positive");
    const Eigen::VectorXd lo = bound.center.array() - bound.half_width;
    const double width = 2.0 * bound.half_width;
    auto denorm = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        return lo + width * u;
    };

    InnerResult res;
    res.best_y = -std::numeric_limits<double>::infinity();
    const int n_init = std::max(1, cfg.init_samples);
    Eigen::MatrixXd units(n_init + std::max(0, cfg.inner_iters), d);
    Eigen::VectorXd ys(units.rows());
    int n = 0;

    auto record = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& x) {
        const double y = objective(x);
        units.row(n) = u.transpose();
        ys[n] = y;
        ++n;
        if (y > res.best_y) {
            res.best_y = y;
            res.best_x = x;
        }
        res.trace.push_back({y, res.best_y});
    };

    // initial design: the incumbent (exact, no round-trip through the unit
    // box) plus a Latin hypercube
    record(Eigen::VectorXd::Constant(d, 0.5), bound.center);
    if (n_init > 1) {
        const Eigen::MatrixXd lhs = latin_hypercube(n_init - 1, d, rng);
        for (int i = 0; i < lhs.rows(); ++i) record(lhs.row(i), denorm(lhs.row(i)));
    }

    FitOptions fit_opt = cfg.fit;
    for (int round = 0; round < cfg.inner_iters; ++round) {
        Eigen::VectorXd u_next;
        bool fell_back = false;
        try {
            GpModel model = fit(units.topRows(n), ys.head(n), fit_opt);
            fit_opt.warm_start = model.log_hyper();

            Eigen::MatrixXd pool(cfg.candidate_pool, d);
            for (int i = 0; i < pool.rows(); ++i)
                for (int k = 0; k < d; ++k) pool(i, k) = rng.uniform();
            Eigen::VectorXd means, vars;
            predict_batch(model, pool, means, vars);
            int best_idx = 0;
            double best_ei = -1.0;
            for (int i = 0; i < pool.rows(); ++i) {
                const double ei = expected_improvement({means[i], vars[i]}, res.best_y);
                if (ei > best_ei) {
                    best_ei = ei;
                    best_idx = i;
                }
            }
            u_next = pool.row(best_idx);
        } catch (const ConditioningError&) {
            fell_back = true;
        }
        if (fell_back) {
            u_next.resize(d);
            for (int k = 0; k < d; ++k) u_next[k] = rng.uniform();
            ++res.gp_fallbacks;
            fit_opt.warm_start.reset();
        }
        record(u_next, denorm(u_next));
    }
    return res;
}

SearchGeometry SearchGeometry::identity(int dim) {
    SearchGeometry g;
    g.dim = dim;
    g.center_of = [](const Weights& w) { return w; };
    g.apply = [](const Weights&, const Eigen::VectorXd& x) { return x; };
    return g;
}

SearchGeometry SearchGeometry::coordinate_subset(int full_dim, std::vector<int> coords) {
    for (int c : coords)
        if (c < 0 || c >= full_dim) throw ParameterError("coordinate index out of range");
    SearchGeometry g;
    g.dim = static_cast<int>(coords.size());
    auto shared = std::make_shared<std::vector<int>>(std::move(coords));
    g.center_of = [shared](const Weights& w) {
        Eigen::VectorXd c(shared->size());
        for (std::size_t i = 0; i < shared->size(); ++i) c[i] = w[(*shared)[i]];
        return c;
    };
    g.apply = [shared](const Weights& w, const Eigen::VectorXd& x) {
        Weights out = w;
        for (std::size_t i = 0; i < shared->size(); ++i) out[(*shared)[i]] = x[i];
        return out;
    };
    return g;
}

RunRecord outer_loop_in_space(const TuneTask& task, const TunerConfig& cfg, const Weights& w0,
                              const SearchGeometry& geometry) {
    if (!task.decode || !task.refs) throw ParameterError("task must provide decode and refs");
    if (cfg.outer_iters < 1) throw ParameterError("outer_iters must be >= 1");
    Rng rng(cfg.seed);

    RunRecord rec;
    Weights w = w0;
    std::vector<Hypergraph> prev_graphs;  // one previous iteration, CHG only
    double best_dev = -1.0;
    int plateau_run = 0;
    double prev_dev = 0.0;

    for (int iter = 0; iter < cfg.outer_iters; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        CandidateSet fresh = task.decode(w);
        if (cfg.variant != Variant::NBL && !fresh.holds_graphs())
            throw ParameterError("hypergraph variants require a hypergraph decoder");
        const double dev = evaluate_point(w, fresh, *task.refs);

        IterationRecord ir;
        ir.iteration = iter;
        ir.weights = w;
        ir.dev_bleu = dev;
        if (dev > best_dev) {
            best_dev = dev;
            rec.final_weights = w;
            rec.final_dev_bleu = dev;
            rec.best_iteration = iter;
        }

        // plateau rule on consecutive decoded scores
        if (iter > 0 && dev - prev_dev < cfg.plateau_tol)
            ++plateau_run;
        else
            plateau_run = 0;
        prev_dev = dev;
        if (plateau_run >= cfg.plateau_patience) {
            ir.ran_inner = false;
            ir.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
            rec.iterations.push_back(std::move(ir));
            rec.plateaued = true;
            break;
        }

        CandidateSet inner_cands;
        if (cfg.variant == Variant::CHG) {
            inner_cands.graphs = union_graphs(fresh.graphs, prev_graphs);
            prev_graphs = fresh.graphs;
        } else {
            inner_cands = fresh;
        }
        ir.candidate_derivations = inner_cands.total_derivations();

        SearchBound bound{geometry.center_of(w), cfg.bound_b};
        Rng inner_rng = rng.fork(0x10000 + iter);
        auto objective = [&](const Eigen::VectorXd& x) {
            return evaluate_point(geometry.apply(w, x), inner_cands, *task.refs);
        };
        InnerResult inner = inner_bo_loop(objective, bound, cfg, inner_rng);

        ir.x_best = inner.best_x;
        ir.bo_score = inner.best_y;
        ir.inner_trace = std::move(inner.trace);
        ir.gp_fallbacks = inner.gp_fallbacks;
        ir.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        w = geometry.apply(w, inner.best_x);
        rec.iterations.push_back(std::move(ir));
    }
    return rec;
}

RunRecord outer_loop(const TuneTask& task, const TunerConfig& cfg, const Weights& w0) {
    return outer_loop_in_space(task, cfg, w0,
                               SearchGeometry::identity(static_cast<int>(w0.size())));
}

}  // namespace botune

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "botune/embedding.hpp"
#include "botune/io.hpp"
#include "botune/mert.hpp"
#include "botune/metrics.hpp"
#include "botune/rng.hpp"
#include "botune/simulator.hpp"
#include "botune/surrogate.hpp"
#include "botune/tuner.hpp"

namespace py = pybind11;
using namespace botune;

namespace {

py::dict record_dict(const RunRecord& rec) {
    py::dict d;
    py::list iters;
    for (const auto& it : rec.iterations) {
        py::dict ij;
        ij["iteration"] = it.iteration;
        ij["weights"] = it.weights;
        ij["dev_bleu"] = it.dev_bleu;
        ij["bo_score"] = it.bo_score;
        ij["ran_inner"] = it.ran_inner;
        py::list ys, bests;
        for (const auto& r : it.inner_trace) {
            ys.append(r.y);
            bests.append(r.best);
        }
        ij["inner_ys"] = ys;
        ij["inner_best"] = bests;
        ij["candidate_derivations"] = it.candidate_derivations;
        iters.append(ij);
    }
    d["iterations"] = iters;
    d["final_weights"] = rec.final_weights;
    d["final_dev_bleu"] = rec.final_dev_bleu;
    d["best_iteration"] = rec.best_iteration;
    d["plateaued"] = rec.plateaued;
    return d;
}

TunerConfig config_from_kwargs(const std::string& variant, double bound, int inner_iters,
                               int outer_iters, int init_samples, int candidate_pool,
                               int nbest_size, std::uint64_t seed, double plateau_tol) {
    TunerConfig cfg;
    cfg.variant = variant_from_name(variant);
    cfg.bound_b = bound;
    cfg.inner_iters = inner_iters;
    cfg.outer_iters = outer_iters;
    cfg.init_samples = init_samples;
    cfg.candidate_pool = candidate_pool;
    cfg.nbest_size = nbest_size;
    cfg.seed = seed;
    cfg.plateau_tol = plateau_tol;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian-optimisation tuning of linear translation-model weights";

    // ---- metrics ----
    py::class_<BleuStats>(m, "BleuStats")
        .def(py::init<>())
        .def_readonly("matches", &BleuStats::matches)
        .def_readonly("totals", &BleuStats::totals)
        .def_readonly("cand_len", &BleuStats::cand_len)
        .def_readonly("ref_len", &BleuStats::ref_len)
        .def("__add__", [](const BleuStats& a, const BleuStats& b) { return a + b; });
    m.def("sentence_stats", &sentence_stats, py::arg("candidate"), py::arg("reference"));
    m.def("corpus_bleu", &corpus_bleu, py::arg("stats"));
    m.def("smoothed_sentence_bleu", &smoothed_sentence_bleu, py::arg("candidate"),
          py::arg("reference"));

    // ---- hypergraphs ----
    py::class_<Hypergraph>(m, "Hypergraph")
        .def_readonly("sentence_id", &Hypergraph::sentence_id)
        .def_readonly("num_nodes", &Hypergraph::num_nodes)
        .def_readonly("dim", &Hypergraph::dim)
        .def_property_readonly(
            "num_edges", [](const Hypergraph& h) { return h.edges.size(); })
        .def("validate", &Hypergraph::validate)
        .def("__repr__", [](const Hypergraph& h) {
            return "<Hypergraph sentence_id=" + std::to_string(h.sentence_id) + " nodes=" +
                   std::to_string(h.num_nodes) + " edges=" + std::to_string(h.edges.size()) +
                   ">";
        });
    py::class_<Derivation>(m, "Derivation")
        .def_readonly("yield_tokens", &Derivation::yield)
        .def_readonly("score", &Derivation::score)
        .def_readonly("edges", &Derivation::edges)
        .def_readonly("features", &Derivation::features);
    m.def("viterbi_best", &viterbi_best, py::arg("hypergraph"), py::arg("weights"));
    m.def("rescore_all", &rescore_all, py::arg("hypergraphs"), py::arg("weights"));
    m.def("union_graphs", &union_graphs, py::arg("current"), py::arg("previous"));
    m.def("count_derivations", &count_derivations, py::arg("hypergraph"));
    m.def("read_hypergraphs", &read_hypergraphs, py::arg("path"));
    m.def("write_hypergraphs", &write_hypergraphs, py::arg("path"), py::arg("hypergraphs"));

    // ---- GP surrogate ----
    py::class_<GpModel>(m, "GpModel")
        .def_readonly("lengthscales", &GpModel::lengthscales)
        .def_readonly("signal_var", &GpModel::signal_var)
        .def_readonly("noise_var", &GpModel::noise_var)
        .def_readonly("log_marginal", &GpModel::log_marginal);
    py::class_<Posterior>(m, "Posterior")
        .def(py::init([](double mean, double variance) {
                 return Posterior{mean, variance};
             }),
             py::arg("mean"), py::arg("variance"))
        .def_readonly("mean", &Posterior::mean)
        .def_readonly("variance", &Posterior::variance);
    m.def(
        "matern52",
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
           const Eigen::VectorXd& lengthscales, double signal_var) {
            return matern52(x, x2, lengthscales, signal_var);
        },
        py::arg("x"), py::arg("x2"), py::arg("lengthscales"), py::arg("signal_var"));
    m.def(
        "gp_fit",
        [](const Eigen::MatrixXd& xs, const Eigen::VectorXd& ys) { return fit(xs, ys); },
        py::arg("xs"), py::arg("ys"));
    m.def("gp_predict", &predict, py::arg("model"), py::arg("x"));
    m.def("expected_improvement", &expected_improvement, py::arg("posterior"),
          py::arg("best_y"));

    // ---- synthetic tasks and tuning ----
    py::class_<TaskParams>(m, "TaskParams")
        .def(py::init<>())
        .def_readwrite("sentences", &TaskParams::sentences)
        .def_readwrite("test_sentences", &TaskParams::test_sentences)
        .def_readwrite("core_dims", &TaskParams::core_dims)
        .def_readwrite("sparse_dims", &TaskParams::sparse_dims)
        .def_readwrite("sparse_nonzero", &TaskParams::sparse_nonzero)
        .def_readwrite("vocab", &TaskParams::vocab)
        .def_readwrite("depth", &TaskParams::depth)
        .def_readwrite("beam", &TaskParams::beam)
        .def_readwrite("margin", &TaskParams::margin)
        .def_readwrite("seed", &TaskParams::seed);
    py::class_<SyntheticTask>(m, "SyntheticTask")
        .def_readonly("params", &SyntheticTask::params)
        .def_readonly("true_weights", &SyntheticTask::true_weights)
        .def_readonly("dev_refs", &SyntheticTask::dev_refs)
        .def_readonly("test_refs", &SyntheticTask::test_refs)
        .def_property_readonly("dim", &SyntheticTask::dim)
        .def("__repr__", [](const SyntheticTask& t) {
            return "<SyntheticTask sentences=" + std::to_string(t.params.sentences) +
                   " dim=" + std::to_string(t.dim()) + ">";
        });
    m.def("generate_task", py::overload_cast<const TaskParams&>(&generate_task),
          py::arg("params"));
    m.def("simulated_decode", &simulated_decode, py::arg("task"), py::arg("weights"));
    m.def("oracle_bleu", &oracle_bleu, py::arg("task"));
    m.def("test_bleu", &test_bleu, py::arg("task"), py::arg("weights"));
    m.def("save_task", &save_task, py::arg("task"), py::arg("dir"),
          py::arg("withhold_weights") = false);
    m.def("load_task", &load_task, py::arg("dir"));
    m.def("beam_prune", &beam_prune, py::arg("master"), py::arg("weights"), py::arg("beam"));
    m.def("kbest_derivations", &kbest_derivations, py::arg("hypergraph"), py::arg("weights"),
          py::arg("k"));

    m.def(
        "tune",
        [](const SyntheticTask& task, const std::string& variant, const Eigen::VectorXd& w0,
           double bound, int inner_iters, int outer_iters, int init_samples,
           int candidate_pool, int nbest_size, std::uint64_t seed, double plateau_tol) {
            const TunerConfig cfg =
                config_from_kwargs(variant, bound, inner_iters, outer_iters, init_samples,
                                   candidate_pool, nbest_size, seed, plateau_tol);
            const TuneTask t = cfg.variant == Variant::NBL
                                   ? nbest_task(task, cfg.nbest_size)
                                   : hypergraph_task(task);
            return record_dict(outer_loop(t, cfg, w0));
        },
        py::arg("task"), py::arg("variant"), py::arg("w0"), py::arg("bound") = 0.1,
        py::arg("inner_iters") = 100, py::arg("outer_iters") = 10,
        py::arg("init_samples") = 10, py::arg("candidate_pool") = 2000,
        py::arg("nbest_size") = 100, py::arg("seed") = 0, py::arg("plateau_tol") = 5e-4,
        "Run one bounded-BO tuning variant (nbl-bo, hg-bo, chg-bo) on a synthetic task.");

    m.def(
        "tune_mert",
        [](const SyntheticTask& task, const Eigen::VectorXd& w0, int outer_iters,
           int nbest_size, std::uint64_t seed) {
            MertConfig cfg;
            cfg.outer_iters = outer_iters;
            cfg.nbest_size = nbest_size;
            cfg.seed = seed;
            return record_dict(mert_outer(nbest_task(task, nbest_size), cfg, w0));
        },
        py::arg("task"), py::arg("w0"), py::arg("outer_iters") = 10,
        py::arg("nbest_size") = 100, py::arg("seed") = 0,
        "Run the N-best MERT line-search baseline.");

    m.def(
        "tune_rembo",
        [](const SyntheticTask& task, const Eigen::VectorXd& w0, int low_dim, int restarts,
           double bound, int inner_iters, int outer_iters, std::uint64_t seed) {
            TunerConfig cfg;
            cfg.bound_b = bound;
            cfg.inner_iters = inner_iters;
            cfg.outer_iters = outer_iters;
            cfg.seed = seed;
            RemboConfig rcfg;
            rcfg.low_dim = low_dim;
            rcfg.restarts = restarts;
            rcfg.seed = seed;
            const RemboResult res =
                rembo_tune(hypergraph_task(task), cfg, rcfg, w0, task.params.core_dims,
                           task.params.sparse_dims);
            py::dict d = record_dict(res.record);
            d["final_weights"] = res.final_weights;
            d["final_dev_bleu"] = res.final_dev_bleu;
            d["best_restart"] = res.best_restart;
            d["restart_dev_bleu"] = res.restart_dev_bleu;
            return d;
        },
        py::arg("task"), py::arg("w0"), py::arg("low_dim") = 8, py::arg("restarts") = 4,
        py::arg("bound") = 0.1, py::arg("inner_iters") = 100, py::arg("outer_iters") = 10,
        py::arg("seed") = 0,
        "Two-step random-embedding tuning for tasks with a sparse feature block.");

    // ---- embeddings and MERT primitives ----
    py::class_<Embedding>(m, "Embedding")
        .def_readonly("raw", &Embedding::raw)
        .def_readonly("reg", &Embedding::reg)
        .def_readonly("base", &Embedding::base)
        .def_property_readonly("low_dim", &Embedding::low_dim)
        .def_property_readonly("high_dim", &Embedding::high_dim);
    m.def(
        "make_embedding",
        [](int high_dim, int low_dim, std::uint64_t seed, double z_half_width) {
            Rng rng(seed);
            return make_embedding(high_dim, low_dim, rng, z_half_width);
        },
        py::arg("high_dim"), py::arg("low_dim"), py::arg("seed") = 0,
        py::arg("z_half_width") = 0.1);
    m.def("project", &project, py::arg("embedding"), py::arg("z"));

    m.def(
        "line_search",
        [](const std::vector<NBestList>& nbests, const RefCorpus& refs, const Weights& w,
           const Weights& direction) {
            const auto res = line_search(nbests, refs, w, direction);
            return py::make_tuple(res.gamma, res.bleu);
        },
        py::arg("nbests"), py::arg("refs"), py::arg("weights"), py::arg("direction"));
    py::class_<NBestHyp>(m, "NBestHyp")
        .def(py::init([](Tokens tokens, FeatureVec features, double score) {
                 return NBestHyp{std::move(tokens), std::move(features), score};
             }),
             py::arg("tokens"), py::arg("features"), py::arg("score") = 0.0)
        .def_readonly("tokens", &NBestHyp::tokens)
        .def_readonly("features", &NBestHyp::features)
        .def_readonly("score", &NBestHyp::score);
    py::class_<NBestList>(m, "NBestList")
        .def(py::init([](int sentence_id, std::vector<NBestHyp> hyps) {
                 return NBestList{sentence_id, std::move(hyps)};
             }),
             py::arg("sentence_id"), py::arg("hyps"))
        .def_readonly("sentence_id", &NBestList::sentence_id)
        .def_readonly("hyps", &NBestList::hyps);
    m.def("simulated_decode_nbest", &simulated_decode_nbest, py::arg("task"),
          py::arg("weights"), py::arg("nbest_size"));
    m.def("read_nbest", &read_nbest, py::arg("path"));
    m.def("write_nbest", &write_nbest, py::arg("path"), py::arg("lists"));
}

// botune: synthetic translation-task generation, weight tuning (bounded
// Bayesian optimisation over hypergraphs / N-best lists, random-embedding
// variant, N-best MERT baseline), and report comparison.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>

#include "botune/embedding.hpp"
#include "botune/errors.hpp"
#include "botune/io.hpp"
#include "botune/mert.hpp"
#include "botune/report.hpp"
#include "botune/rng.hpp"
#include "botune/simulator.hpp"
#include "botune/tuner.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace botune;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct GenerateArgs {
    TaskParams params;
    std::string out;
    bool withhold = false;
};

struct TuneArgs {
    std::string task_dir;
    std::string out;
    std::string variant = "hg-bo";
    std::vector<double> bounds{0.1};
    TunerConfig cfg;
    MertConfig mert;
    RemboConfig rembo;
    int beam_override = 0;
    std::string init_weights;
    double perturb = -1.0;
    bool dump_nbest = false;
};

ordered_json config_json(const TuneArgs& a, double bound) {
    ordered_json j;
    j["task"] = a.task_dir;
    j["variant"] = a.variant;
    j["bound"] = bound;
    j["inner_iters"] = a.cfg.inner_iters;
    j["outer_iters"] = a.cfg.outer_iters;
    j["init_samples"] = a.cfg.init_samples;
    j["candidate_pool"] = a.cfg.candidate_pool;
    j["nbest_size"] = a.cfg.nbest_size;
    j["beam_override"] = a.beam_override;
    j["seed"] = a.cfg.seed;
    j["plateau_tol"] = a.cfg.plateau_tol;
    j["plateau_patience"] = a.cfg.plateau_patience;
    j["low_dim"] = a.rembo.low_dim;
    j["restarts"] = a.rembo.restarts;
    j["init_weights"] = a.init_weights;
    j["perturb"] = a.perturb;
    return j;
}

Weights initial_weights(const TuneArgs& a, const SyntheticTask& task) {
    if (!a.init_weights.empty() && a.perturb >= 0.0)
        throw ParameterError("--init-weights and --perturb are mutually exclusive");
    if (!a.init_weights.empty()) {
        Weights w = read_weights(a.init_weights);
        if (w.size() != task.dim())
            throw DimensionError("initial weights length " + std::to_string(w.size()) +
                                 " does not match task dimension " +
                                 std::to_string(task.dim()));
        return w;
    }
    if (a.perturb >= 0.0) {
        if (!task.has_true_weights)
            throw ParameterError("--perturb requires a task with recorded true weights");
        Weights w = task.true_weights;
        Rng rng(Rng::mix(a.cfg.seed, 0x9e2bULL));
        for (int k = 0; k < w.size(); ++k) w[k] += (rng.bernoulli(0.5) ? 1 : -1) * a.perturb;
        return w;
    }
    return Weights::Zero(task.dim());
}

int run_generate(const GenerateArgs& a) {
    const SyntheticTask task = generate_task(a.params);
    save_task(task, a.out, a.withhold);
    if (task.regenerated_sentences > 0)
        std::cerr << "note: " << task.regenerated_sentences
                  << " sentence graph(s) redrawn to satisfy the planted margin\n";
    std::cout << "task written to " << a.out << " (fingerprint "
              << hex64(task_fingerprint(task)) << ")\n";
    return 0;
}

void write_outputs(const std::string& dir, const ordered_json& report, const RunRecord& rec) {
    fs::create_directories(dir);
    write_text_file(dir + "/report.json", report.dump(2) + "\n");
    write_weights(dir + "/weights.txt", rec.final_weights);
    write_text_file(dir + "/trace.csv", trace_csv(rec));
    write_text_file(dir + "/timings.txt", timings_text(rec));
}

int run_tune(const TuneArgs& a) {
    SyntheticTask task = load_task(a.task_dir);
    if (a.beam_override > 0) task.params.beam = a.beam_override;
    const std::uint64_t fingerprint = task_fingerprint(task);
    const Weights w0 = initial_weights(a, task);

    const bool sweep = a.bounds.size() > 1;
    for (double bound : a.bounds) {
        TunerConfig cfg = a.cfg;
        cfg.bound_b = bound;
        cfg.variant = a.variant == "mert" || a.variant == "rembo"
                          ? Variant::HG
                          : variant_from_name(a.variant);

        const std::string out_dir =
            sweep ? a.out + "/bound_" + format_double(bound) : a.out;

        RunRecord rec;
        ordered_json extra;
        if (a.variant == "mert") {
            MertConfig mc = a.mert;
            mc.outer_iters = cfg.outer_iters;
            mc.nbest_size = cfg.nbest_size;
            mc.seed = cfg.seed;
            rec = mert_outer(nbest_task(task, mc.nbest_size), mc, w0);
        } else if (a.variant == "rembo") {
            if (task.params.sparse_dims <= 0)
                throw ParameterError("rembo needs a task with a sparse feature block");
            RemboConfig rc = a.rembo;
            rc.seed = cfg.seed;
            const RemboResult rr = rembo_tune(hypergraph_task(task), cfg, rc, w0,
                                              task.params.core_dims, task.params.sparse_dims);
            rec = rr.record;
            extra["rembo"] = {{"best_restart", rr.best_restart},
                              {"embedding_seed", rr.best_embedding_seed},
                              {"restart_dev_bleu", rr.restart_dev_bleu},
                              {"core_step", run_record_json(rr.core_record)}};
            rec.final_weights = rr.final_weights;
            rec.final_dev_bleu = rr.final_dev_bleu;
        } else if (a.variant == "nbl-bo") {
            rec = outer_loop(nbest_task(task, cfg.nbest_size), cfg, w0);
        } else {
            rec = outer_loop(hypergraph_task(task), cfg, w0);
        }

        ordered_json cfg_json = config_json(a, bound);
        ordered_json report;
        report["tool"] = "botune";
        report["schema"] = 1;
        report["variant"] = a.variant;
        report["config"] = cfg_json;
        report["config_hash"] = hex64(fnv1a_bytes(cfg_json.dump(), 0));
        report["task"] = {{"path", a.task_dir}, {"fingerprint", hex64(fingerprint)}};
        const ordered_json run = run_record_json(rec);
        report["iterations"] = run["iterations"];
        report["final"] = run["final"];
        if (!task.test_master.empty())
            report["final"]["test_bleu"] = test_bleu(task, rec.final_weights);
        if (task.has_true_weights)
            report["final"]["oracle_dev_bleu"] = oracle_bleu(task);
        for (auto& [k, v] : extra.items()) report[k] = v;

        write_outputs(out_dir, report, rec);
        if (a.dump_nbest) {
            write_nbest(out_dir + "/final.nbest",
                        simulated_decode_nbest(task, rec.final_weights, a.cfg.nbest_size));
        }
        std::cout << a.variant << " bound=" << format_double(bound)
                  << " dev=" << format_double(rec.final_dev_bleu);
        if (!task.test_master.empty())
            std::cout << " test=" << format_double(test_bleu(task, rec.final_weights));
        std::cout << " iterations=" << rec.iterations.size() << " -> " << out_dir << "\n";
    }
    return 0;
}

struct ReportRow {
    std::string path;
    std::string variant;
    std::uint64_t seed = 0;
    std::string task_fp;
    double dev = 0.0;
    double test = 0.0;
    bool has_test = false;
    int best_iteration = 0;
    int iterations = 0;
};

int run_compare(const std::vector<std::string>& paths, const std::string& csv_out) {
    if (paths.size() < 2) throw ParameterError("compare needs at least two reports");
    std::vector<ReportRow> rows;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw ParseError(p, 0, "cannot open report");
        ordered_json j;
        try {
            in >> j;
        } catch (const std::exception& e) {
            throw ParseError(p, 0, std::string("invalid report JSON: ") + e.what());
        }
        ReportRow r;
        r.path = p;
        r.variant = j.at("variant").get<std::string>();
        r.seed = j.at("config").at("seed").get<std::uint64_t>();
        r.task_fp = j.at("task").at("fingerprint").get<std::string>();
        r.dev = j.at("final").at("dev_bleu").get<double>();
        if (j.at("final").contains("test_bleu")) {
            r.test = j.at("final").at("test_bleu").get<double>();
            r.has_test = true;
        }
        r.best_iteration = j.at("final").at("best_iteration").get<int>();
        r.iterations = static_cast<int>(j.at("iterations").size());
        rows.push_back(std::move(r));
    }
    for (const auto& r : rows) {
        if (r.task_fp != rows[0].task_fp)
            throw AlignmentError("reports come from different tasks: " + rows[0].path +
                                 " vs " + r.path);
    }

    std::ostringstream table, csv;
    table << "variant      seed        dev_bleu    test_bleu   best_iter  iterations\n";
    csv << "variant,seed,dev_bleu,test_bleu,best_iteration,iterations\n";
    for (const auto& r : rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %-11llu %-11.6f %-11s %-10d %d\n",
                      r.variant.c_str(), static_cast<unsigned long long>(r.seed), r.dev,
                      r.has_test ? format_double(r.test).c_str() : "-", r.best_iteration,
                      r.iterations);
        table << line;
        csv << r.variant << ',' << r.seed << ',' << format_double(r.dev) << ','
            << (r.has_test ? format_double(r.test) : "") << ',' << r.best_iteration << ','
            << r.iterations << '\n';
    }

    // per-variant aggregates over seeds
    std::map<std::string, std::vector<const ReportRow*>> groups;
    for (const auto& r : rows) groups[r.variant].push_back(&r);
    table << "\nvariant      runs  dev_mean    dev_variance  test_mean   iters_to_best\n";
    csv << "\nvariant,runs,dev_mean,dev_variance,test_mean,mean_best_iteration\n";
    for (const auto& [variant, members] : groups) {
        const double n = static_cast<double>(members.size());
        double dev_mean = 0.0, test_mean = 0.0, best_mean = 0.0;
        for (const auto* r : members) {
            dev_mean += r->dev;
            test_mean += r->test;
            best_mean += r->best_iteration;
        }
        dev_mean /= n;
        test_mean /= n;
        best_mean /= n;
        double dev_var = 0.0;
        for (const auto* r : members) dev_var += (r->dev - dev_mean) * (r->dev - dev_mean);
        dev_var /= n;
        char line[160];
        std::snprintf(line, sizeof line, "%-12s %-5zu %-11.6f %-13.3e %-11.6f %.1f\n",
                      variant.c_str(), members.size(), dev_mean, dev_var, test_mean,
                      best_mean);
        table << line;
        csv << variant << ',' << members.size() << ',' << format_double(dev_mean) << ','
            << format_double(dev_var) << ',' << format_double(test_mean) << ','
            << format_double(best_mean) << '\n';
    }
    if (rows.size() == 2) {
        char line[120];
        std::snprintf(line, sizeof line, "\ndelta (first - second): dev %+.6f  test %+.6f\n",
                      rows[0].dev - rows[1].dev, rows[0].test - rows[1].test);
        table << line;
    }

    std::cout << table.str();
    if (!csv_out.empty()) write_text_file(csv_out, csv.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian-optimisation tuning of linear translation-model weights "
                 "over synthetic hypergraph tasks"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cmd_gen = app.add_subcommand("generate", "generate a synthetic translation task");
    cmd_gen->set_config("--config", "", "flat key = value configuration file");
    cmd_gen->add_option("--out", gen.out, "output task directory")->required();
    cmd_gen->add_option("--sentences", gen.params.sentences, "dev sentences");
    cmd_gen->add_option("--test-sentences", gen.params.test_sentences, "held-out sentences");
    cmd_gen->add_option("--features", gen.params.core_dims, "core feature dimension (>= 2)");
    cmd_gen->add_option("--sparse", gen.params.sparse_dims, "sparse feature block size");
    cmd_gen->add_option("--sparse-nonzero", gen.params.sparse_nonzero,
                        "truly nonzero sparse weights");
    cmd_gen->add_option("--vocab", gen.params.vocab, "vocabulary size");
    cmd_gen->add_option("--depth", gen.params.depth, "source sentence length");
    cmd_gen->add_option("--beam", gen.params.beam, "decoder beam width");
    cmd_gen->add_option("--margin", gen.params.margin, "planted win margin");
    cmd_gen->add_option("--seed", gen.params.seed, "generation seed");
    cmd_gen->add_flag("--withhold-weights", gen.withhold,
                      "do not record the planted weights in task.meta");

    TuneArgs tune;
    auto* cmd_tune = app.add_subcommand("tune", "tune weights on a generated task");
    cmd_tune->set_config("--config", "", "flat key = value configuration file");
    cmd_tune->add_option("--task", tune.task_dir, "task directory")->required();
    cmd_tune->add_option("--out", tune.out, "output directory")->required();
    cmd_tune
        ->add_option("--variant", tune.variant, "nbl-bo | hg-bo | chg-bo | rembo | mert")
        ->check(CLI::IsMember({"nbl-bo", "hg-bo", "chg-bo", "rembo", "mert"}));
    cmd_tune->add_option("--bound", tune.bounds, "search bound half-width(s)")
        ->delimiter(',');
    cmd_tune->add_option("--inner-iters", tune.cfg.inner_iters, "BO rounds per iteration");
    cmd_tune->add_option("--outer-iters", tune.cfg.outer_iters, "decode iterations");
    cmd_tune->add_option("--init-samples", tune.cfg.init_samples, "initial design size");
    cmd_tune->add_option("--pool", tune.cfg.candidate_pool, "EI candidate pool size");
    cmd_tune->add_option("--nbest-size", tune.cfg.nbest_size, "N-best list size");
    cmd_tune->add_option("--beam", tune.beam_override, "override the task beam width");
    cmd_tune->add_option("--seed", tune.cfg.seed, "run seed");
    cmd_tune->add_option("--plateau-tol", tune.cfg.plateau_tol,
                         "dev BLEU plateau tolerance (negative disables)");
    cmd_tune->add_option("--low-dim", tune.rembo.low_dim, "rembo z-space dimension");
    cmd_tune->add_option("--restarts", tune.rembo.restarts, "rembo embedding restarts");
    cmd_tune->add_option("--init-weights", tune.init_weights, "initial weights file");
    cmd_tune->add_option("--perturb", tune.perturb,
                         "start from the true weights perturbed by +-delta");
    cmd_tune->add_flag("--dump-nbest", tune.dump_nbest,
                       "write final N-best lists next to the report");

    std::vector<std::string> report_paths;
    std::string csv_out;
    auto* cmd_cmp = app.add_subcommand("compare", "summarize tuning reports side by side");
    cmd_cmp->add_option("reports", report_paths, "report.json paths")->expected(-2);
    cmd_cmp->add_option("--csv", csv_out, "also write the summary as CSV");

    try {
        app.parse(argc, argv);
        if (cmd_gen->parsed()) return run_generate(gen);
        if (cmd_tune->parsed()) return run_tune(tune);
        return run_compare(report_paths, csv_out);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const AlignmentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const ConditioningError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

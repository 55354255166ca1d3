#include "botune/report.hpp"

#include <fstream>

#include "botune/errors.hpp"
#include "botune/io.hpp"

namespace botune {

namespace {

nlohmann::ordered_json vector_json(const Eigen::VectorXd& v) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

}  // namespace

nlohmann::ordered_json run_record_json(const RunRecord& rec) {
    nlohmann::ordered_json j;
    j["iterations"] = nlohmann::ordered_json::array();
    for (const auto& it : rec.iterations) {
        nlohmann::ordered_json ij;
        ij["iteration"] = it.iteration;
        ij["weights"] = vector_json(it.weights);
        ij["dev_bleu"] = it.dev_bleu;
        ij["ran_inner"] = it.ran_inner;
        if (it.ran_inner) {
            ij["x_best"] = vector_json(it.x_best);
            ij["bo_score"] = it.bo_score;
            nlohmann::ordered_json trace = nlohmann::ordered_json::array();
            for (const auto& r : it.inner_trace) {
                trace.push_back(nlohmann::ordered_json{{"y", r.y}, {"best", r.best}});
            }
            ij["inner_trace"] = std::move(trace);
            ij["candidate_derivations"] = it.candidate_derivations;
            ij["gp_fallbacks"] = it.gp_fallbacks;
        }
        j["iterations"].push_back(std::move(ij));
    }
    j["final"] = {{"best_iteration", rec.best_iteration},
                  {"dev_bleu", rec.final_dev_bleu},
                  {"weights", vector_json(rec.final_weights)},
                  {"plateaued", rec.plateaued}};
    return j;
}

std::string trace_csv(const RunRecord& rec) {
    std::string out = "iteration,bo_score,dev_bleu\n";
    for (const auto& it : rec.iterations) {
        out += std::to_string(it.iteration);
        out += ',';
        if (it.ran_inner) out += format_double(it.bo_score);
        out += ',';
        out += format_double(it.dev_bleu);
        out += '\n';
    }
    return out;
}

std::string timings_text(const RunRecord& rec) {
    std::string out;
    for (const auto& it : rec.iterations) {
        out += "iteration " + std::to_string(it.iteration) + " wall_ms " +
               format_double(it.wall_ms) + "\n";
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(path, 0, "cannot open file for writing");
    out << content;
}

}  // namespace botune

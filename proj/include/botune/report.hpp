#pragma once

#include <json.hpp>
#include <string>

#include "botune/tuner.hpp"

namespace botune {

// Per-iteration run record as ordered JSON. Wall times are deliberately
// excluded: reports must be byte-identical across reruns of the same
// config+seed; timings go to a sidecar file.
nlohmann::ordered_json run_record_json(const RunRecord& rec);

// `iteration,bo_score,dev_bleu` rows for convergence plots; bo_score is
// empty on iterations that only decoded.
std::string trace_csv(const RunRecord& rec);

// Wall-clock sidecar, one line per iteration.
std::string timings_text(const RunRecord& rec);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace botune

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace botune {

using Tokens = std::vector<std::string>;
using RefCorpus = std::vector<Tokens>;

constexpr int kBleuOrder = 4;

// Additive sufficient statistics for corpus BLEU. Corpus stats are the
// component-wise sum of per-sentence stats.
struct BleuStats {
    std::array<std::int64_t, kBleuOrder> matches{};  // clipped n-gram matches
    std::array<std::int64_t, kBleuOrder> totals{};   // candidate n-gram counts
    std::int64_t cand_len = 0;
    std::int64_t ref_len = 0;

    BleuStats& operator+=(const BleuStats& o);
    BleuStats& operator-=(const BleuStats& o);
    friend BleuStats operator+(BleuStats a, const BleuStats& b) { return a += b; }
    bool operator==(const BleuStats&) const = default;
};

// Clipped n-gram statistics of a candidate against a single reference.
// Empty inputs yield zero counts.
BleuStats sentence_stats(const Tokens& candidate, const Tokens& reference);

// Corpus BLEU: BP * exp(mean log precision), n = 1..4, no smoothing.
// Returns 0 when the candidate is empty or any match count is zero.
double corpus_bleu(const BleuStats& stats);

// Per-sentence diagnostic score with +1 smoothing on n >= 2. Never used as a
// tuning objective.
double smoothed_sentence_bleu(const Tokens& candidate, const Tokens& reference);

}  // namespace botune

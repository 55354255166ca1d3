#include "botune/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace botune {

BleuStats& BleuStats::operator+=(const BleuStats& o) {
    for (int n = 0; n < kBleuOrder; ++n) {
        matches[n] += o.matches[n];
        totals[n] += o.totals[n];
    }
    cand_len += o.cand_len;
    ref_len += o.ref_len;
    return *this;
}

BleuStats& BleuStats::operator-=(const BleuStats& o) {
    for (int n = 0; n < kBleuOrder; ++n) {
        matches[n] -= o.matches[n];
        totals[n] -= o.totals[n];
    }
    cand_len -= o.cand_len;
    ref_len -= o.ref_len;
    return *this;
}

namespace {

// n-grams keyed by their tokens joined with a separator that cannot appear
// inside whitespace-split tokens.
void count_ngrams(const Tokens& toks, int n,
                  std::unordered_map<std::string, std::int64_t>& out) {
    if (static_cast<int>(toks.size()) < n) return;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string key = toks[i];
        for (int j = 1; j < n; ++j) {
            key += '\x1f';
            key += toks[i + j];
        }
        ++out[key];
    }
}

}  // namespace

BleuStats sentence_stats(const Tokens& candidate, const Tokens& reference) {
    BleuStats s;
    s.cand_len = static_cast<std::int64_t>(candidate.size());
    s.ref_len = static_cast<std::int64_t>(reference.size());
    for (int n = 1; n <= kBleuOrder; ++n) {
        std::unordered_map<std::string, std::int64_t> cand_counts, ref_counts;
        count_ngrams(candidate, n, cand_counts);
        count_ngrams(reference, n, ref_counts);
        std::int64_t total = 0, matched = 0;
        for (const auto& [key, count] : cand_counts) {
            total += count;
            auto it = ref_counts.find(key);
            if (it != ref_counts.end()) matched += std::min(count, it->second);
        }
        s.totals[n - 1] = total;
        s.matches[n - 1] = matched;
    }
    return s;
}

double corpus_bleu(const BleuStats& stats) {
    if (stats.cand_len == 0) return 0.0;
    double log_prec = 0.0;
    for (int n = 0; n < kBleuOrder; ++n) {
        if (stats.matches[n] == 0) return 0.0;
        log_prec += std::log(static_cast<double>(stats.matches[n]) /
                             static_cast<double>(stats.totals[n]));
    }
    log_prec /= kBleuOrder;
    const double bp =
        stats.cand_len >= stats.ref_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(stats.ref_len) /
                                 static_cast<double>(stats.cand_len));
    return bp * std::exp(log_prec);
}

double smoothed_sentence_bleu(const Tokens& candidate, const Tokens& reference) {
    const BleuStats s = sentence_stats(candidate, reference);
    if (s.cand_len == 0) return 0.0;
    double log_prec = 0.0;
    for (int n = 0; n < kBleuOrder; ++n) {
        const double add = n == 0 ? 0.0 : 1.0;
        const double m = static_cast<double>(s.matches[n]) + add;
        const double t = static_cast<double>(s.totals[n]) + add;
        if (m <= 0.0 || t <= 0.0) return 0.0;
        log_prec += std::log(m / t);
    }
    log_prec /= kBleuOrder;
    const double bp =
        s.cand_len >= s.ref_len
            ? 1.0
            : std::exp(1.0 - static_cast<double>(s.ref_len) /
                                 static_cast<double>(s.cand_len));
    return bp * std::exp(log_prec);
}

}  // namespace botune

#include "botune/mert.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "botune/errors.hpp"
#include "botune/rng.hpp"

namespace botune {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

// Returns (boundary, hypothesis) pairs: hypothesis i is the argmax from its
// boundary (first boundary is -inf) up to the next pair's boundary.
std::vector<std::pair<double, int>> upper_envelope(
    const std::vector<std::pair<double, double>>& lines) {
    if (lines.empty()) throw ParameterError("upper_envelope needs at least one line");
    // sort by slope, then intercept; for equal slopes only the highest
    // intercept (lowest index on ties) can be on the envelope
    std::vector<int> order(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (lines[a].second != lines[b].second) return lines[a].second < lines[b].second;
        if (lines[a].first != lines[b].first) return lines[a].first > lines[b].first;
        return a < b;
    });

    struct Entry {
        int hyp;
        double x_left;
    };
    std::vector<Entry> hull;
    for (int idx : order) {
        const double a = lines[idx].first, b = lines[idx].second;
        double x = -kInf;
        while (!hull.empty()) {
            const auto& top = hull.back();
            const double ta = lines[top.hyp].first, tb = lines[top.hyp].second;
            if (tb == b) {
                // parallel: sorted order guarantees the incumbent dominates
                x = kInf;
                break;
            }
            x = (ta - a) / (b - tb);  // intersection where idx overtakes top
            if (x <= top.x_left)
                hull.pop_back();  // top never on the envelope
            else
                break;
        }
        if (x == kInf) continue;
        if (hull.empty()) x = -kInf;
        hull.push_back({idx, x});
    }
    std::vector<std::pair<double, int>> out;
    out.reserve(hull.size());
    for (const auto& e : hull) out.emplace_back(e.x_left, e.hyp);
    return out;
}

std::vector<EnvelopeSegment> sentence_envelope(const NBestList& nbest, const Tokens& ref,
                                               const Weights& w, const Weights& direction) {
    std::vector<std::pair<double, double>> lines;
    lines.reserve(nbest.hyps.size());
    for (const auto& h : nbest.hyps)
        lines.emplace_back(dot(h.features, w), dot(h.features, direction));
    const auto env = upper_envelope(lines);
    std::vector<EnvelopeSegment> segs;
    segs.reserve(env.size());
    for (std::size_t i = 0; i < env.size(); ++i) {
        EnvelopeSegment s;
        s.gamma_lo = env[i].first;
        s.gamma_hi = i + 1 < env.size() ? env[i + 1].first : kInf;
        s.hypothesis = env[i].second;
        s.stats = sentence_stats(nbest.hyps[s.hypothesis].tokens, ref);
        segs.push_back(std::move(s));
    }
    return segs;
}

LineSearchResult line_search(const std::vector<NBestList>& nbests, const RefCorpus& refs,
                             const Weights& w, const Weights& direction) {
    if (nbests.size() != refs.size())
        throw AlignmentError("N-best lists and references differ in length");
    if (direction.size() != w.size())
        throw DimensionError("direction and weights differ in length");
    if (direction.cwiseAbs().maxCoeff() == 0.0)
        throw ParameterError("line search direction must be nonzero");

    // Events: at gamma, a sentence's stats change from the previous segment's
    // to the new segment's. Start from every sentence's leftmost segment.
    struct Event {
        double gamma;
        BleuStats remove, add;
    };
    std::vector<Event> events;
    BleuStats current;
    for (std::size_t s = 0; s < nbests.size(); ++s) {
        auto segs = sentence_envelope(nbests[s], refs[s], w, direction);
        current += segs[0].stats;
        for (std::size_t i = 1; i < segs.size(); ++i)
            events.push_back({segs[i].gamma_lo, segs[i - 1].stats, segs[i].stats});
    }
    std::sort(events.begin(), events.end(),
              [](const Event& a, const Event& b) { return a.gamma < b.gamma; });

    // sweep left to right; interval i spans [boundary_i, boundary_{i+1})
    double best_bleu = corpus_bleu(current);
    double best_lo = -kInf, best_hi = events.empty() ? kInf : events[0].gamma;
    for (std::size_t i = 0; i < events.size(); ++i) {
        current -= events[i].remove;
        current += events[i].add;
        // coincident boundaries: apply all stats changes before scoring
        if (i + 1 < events.size() && events[i + 1].gamma == events[i].gamma) continue;
        const double b = corpus_bleu(current);
        if (b > best_bleu) {  // strict: keep the leftmost best interval
            best_bleu = b;
            best_lo = events[i].gamma;
            best_hi = i + 1 < events.size() ? events[i + 1].gamma : kInf;
        }
    }

    LineSearchResult res;
    res.bleu = best_bleu;
    if (best_lo == -kInf && best_hi == kInf)
        res.gamma = 0.0;
    else if (best_lo == -kInf)
        res.gamma = best_hi - 1.0;
    else if (best_hi == kInf)
        res.gamma = best_lo + 1.0;
    else
        res.gamma = 0.5 * (best_lo + best_hi);
    return res;
}

namespace {

// Merges fresh lists into the accumulator, deduplicating by token sequence.
// Returns the number of new hypotheses.
int merge_nbest(std::vector<NBestList>& acc, const std::vector<NBestList>& fresh) {
    if (acc.empty()) {
        acc = fresh;
        int n = 0;
        for (const auto& l : fresh) n += static_cast<int>(l.hyps.size());
        return n;
    }
    if (acc.size() != fresh.size())
        throw AlignmentError("accumulated and fresh N-best lists differ in length");
    int added = 0;
    for (std::size_t s = 0; s < acc.size(); ++s) {
        if (acc[s].sentence_id != fresh[s].sentence_id)
            throw AlignmentError("sentence id mismatch while merging N-best lists");
        std::set<Tokens> seen;
        for (const auto& h : acc[s].hyps) seen.insert(h.tokens);
        for (const auto& h : fresh[s].hyps) {
            if (seen.insert(h.tokens).second) {
                acc[s].hyps.push_back(h);
                ++added;
            }
        }
    }
    return added;
}

}  // namespace

RunRecord mert_outer(const TuneTask& task, const MertConfig& cfg, const Weights& w0) {
    if (!task.decode || !task.refs) throw ParameterError("task must provide decode and refs");
    Rng rng(cfg.seed);
    const int dim = static_cast<int>(w0.size());

    RunRecord rec;
    Weights w = w0;
    std::vector<NBestList> merged;
    double best_dev = -1.0;

    for (int iter = 0; iter < cfg.outer_iters; ++iter) {
        const auto t0 = std::chrono::steady_clock::now();
        CandidateSet fresh = task.decode(w);
        if (fresh.holds_graphs())
            throw ParameterError("MERT requires an N-best decoder");
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

        const int added = merge_nbest(merged, fresh.nbests);
        ir.candidate_derivations = 0.0;
        for (const auto& l : merged) ir.candidate_derivations += static_cast<double>(l.hyps.size());
        if (iter > 0 && added == 0) {
            // candidate space is exhausted: classical MERT convergence
            ir.ran_inner = false;
            ir.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
            rec.iterations.push_back(std::move(ir));
            rec.plateaued = true;
            break;
        }

        CandidateSet merged_set;
        merged_set.nbests = merged;
        double cur = evaluate_point(w, merged_set, *task.refs);
        ir.inner_trace.push_back({cur, cur});
        Rng sweep_rng = rng.fork(0x3000 + iter);
        for (int pass = 0; pass < cfg.max_passes; ++pass) {
            double best_gain_bleu = cur;
            double best_gamma = 0.0;
            Weights best_dir;
            for (int d = 0; d < dim + cfg.random_directions; ++d) {
                Weights dir;
                if (d < dim) {
                    dir = Weights::Zero(dim);
                    dir[d] = 1.0;
                } else {
                    dir.resize(dim);
                    for (int k = 0; k < dim; ++k) dir[k] = sweep_rng.normal();
                    const double norm = dir.norm();
                    if (norm == 0.0) continue;
                    dir /= norm;
                }
                const LineSearchResult ls = line_search(merged, *task.refs, w, dir);
                if (ls.bleu > best_gain_bleu) {
                    best_gain_bleu = ls.bleu;
                    best_gamma = ls.gamma;
                    best_dir = dir;
                }
            }
            if (best_dir.size() == 0 || best_gain_bleu <= cur + cfg.min_gain) break;
            w += best_gamma * best_dir;
            cur = evaluate_point(w, merged_set, *task.refs);
            ir.inner_trace.push_back({cur, std::max(cur, ir.inner_trace.back().best)});
        }
        ir.bo_score = ir.inner_trace.back().best;
        ir.x_best = w;
        ir.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        rec.iterations.push_back(std::move(ir));
    }
    return rec;
}

}  // namespace botune

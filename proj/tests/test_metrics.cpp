#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "botune/metrics.hpp"
#include "botune/rng.hpp"
#include "support.hpp"

using namespace botune;

namespace {
Tokens toks(std::initializer_list<const char*> ts) {
    Tokens out;
    for (const char* t : ts) out.emplace_back(t);
    return out;
}
}  // namespace

TEST_CASE("identity sentence stats") {
    const auto s = sentence_stats(toks({"a", "b", "c", "d"}), toks({"a", "b", "c", "d"}));
    CHECK(s.matches == std::array<std::int64_t, 4>{4, 3, 2, 1});
    CHECK(s.totals == std::array<std::int64_t, 4>{4, 3, 2, 1});
    CHECK(s.cand_len == 4);
    CHECK(s.ref_len == 4);
    CHECK(corpus_bleu(s) == 1.0);
}

TEST_CASE("unigram matches are clipped to reference counts") {
    const auto s = sentence_stats(toks({"a", "a", "a"}), toks({"a", "b"}));
    // hand count: candidate has three 'a' unigrams, reference only one
    CHECK(s.matches[0] == 1);
    CHECK(s.totals[0] == 3);
    CHECK(s.matches[1] == 0);
    CHECK(s.cand_len == 3);
    CHECK(s.ref_len == 2);
}

TEST_CASE("empty candidate yields zero stats with ref_len set") {
    const auto s = sentence_stats({}, toks({"x", "y"}));
    CHECK(s.matches == std::array<std::int64_t, 4>{0, 0, 0, 0});
    CHECK(s.totals == std::array<std::int64_t, 4>{0, 0, 0, 0});
    CHECK(s.cand_len == 0);
    CHECK(s.ref_len == 2);
    CHECK(corpus_bleu(s) == 0.0);
}

TEST_CASE("zero higher-order matches give BLEU 0") {
    BleuStats s;
    s.matches = {2, 1, 0, 0};
    s.totals = {4, 3, 2, 1};
    s.cand_len = 4;
    s.ref_len = 4;
    CHECK(corpus_bleu(s) == 0.0);
}

TEST_CASE("corpus BLEU matches the direct-formula oracle") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        Rng t = rng.fork(trial);
        const int sentences = static_cast<int>(t.uniform_int(1, 8));
        std::vector<Tokens> cands, refs;
        BleuStats total;
        for (int s = 0; s < sentences; ++s) {
            Tokens ref = testing::random_sentence(t, 4, 12, 6);
            Tokens cand = ref;
            // perturb: random substitutions, drops, duplications
            for (auto& tok : cand)
                if (t.bernoulli(0.2)) tok = "v" + std::to_string(t.uniform_int(0, 5));
            if (t.bernoulli(0.3) && cand.size() > 4) cand.pop_back();
            if (t.bernoulli(0.3)) cand.push_back(cand.front());
            cands.push_back(cand);
            refs.push_back(ref);
            total += sentence_stats(cand, ref);
        }
        const double expect = testing::bleu_direct(cands, refs);
        CHECK(corpus_bleu(total) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("stats are additive and permutation invariant") {
    Rng rng(7);
    std::vector<BleuStats> per_sentence;
    for (int s = 0; s < 10; ++s) {
        Tokens ref = testing::random_sentence(rng, 5, 10, 5);
        Tokens cand = testing::random_sentence(rng, 5, 10, 5);
        per_sentence.push_back(sentence_stats(cand, ref));
    }
    BleuStats forward, backward;
    for (const auto& s : per_sentence) forward += s;
    for (auto it = per_sentence.rbegin(); it != per_sentence.rend(); ++it) backward += *it;
    CHECK(forward == backward);
    CHECK(corpus_bleu(forward) == corpus_bleu(backward));
}

TEST_CASE("adding a perfectly matching sentence never decreases BLEU") {
    Rng rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        Rng t = rng.fork(trial);
        BleuStats base;
        for (int s = 0; s < 5; ++s) {
            Tokens ref = testing::random_sentence(t, 4, 10, 5);
            Tokens cand = ref;
            for (auto& tok : cand)
                if (t.bernoulli(0.25)) tok = "v" + std::to_string(t.uniform_int(0, 4));
            base += sentence_stats(cand, ref);
        }
        Tokens perfect = testing::random_sentence(t, 4, 10, 5);
        BleuStats with_perfect = base + sentence_stats(perfect, perfect);
        CHECK(corpus_bleu(with_perfect) >= corpus_bleu(base));
    }
}

TEST_CASE("bleu range and exact-1 condition") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        Rng t = rng.fork(trial);
        BleuStats total;
        bool identical = true;
        for (int s = 0; s < 4; ++s) {
            Tokens ref = testing::random_sentence(t, 4, 9, 4);
            Tokens cand = t.bernoulli(0.5) ? ref : testing::random_sentence(t, 4, 9, 4);
            if (cand != ref) identical = false;
            total += sentence_stats(cand, ref);
        }
        const double b = corpus_bleu(total);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        if (identical) CHECK(b == 1.0);
    }
}

TEST_CASE("smoothed sentence score is a diagnostic in (0,1]") {
    const double b = smoothed_sentence_bleu(toks({"a", "b"}), toks({"a", "c"}));
    CHECK(b > 0.0);
    CHECK(b < 1.0);
    CHECK(smoothed_sentence_bleu(toks({"a", "b", "c", "d"}), toks({"a", "b", "c", "d"})) == 1.0);
    CHECK(smoothed_sentence_bleu({}, toks({"a"})) == 0.0);
}

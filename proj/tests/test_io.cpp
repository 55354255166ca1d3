#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "botune/errors.hpp"
#include "botune/io.hpp"
#include "botune/report.hpp"
#include "support.hpp"

using namespace botune;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("botune_io_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static int counter;
};
int TempDir::counter = 0;

}  // namespace

TEST_CASE("hypergraph files round-trip") {
    TempDir dir;
    Rng rng(404);
    std::vector<Hypergraph> graphs;
    for (int s = 0; s < 15; ++s) {
        Rng t = rng.fork(s);
        auto hg = testing::random_small_graph(t, 4);
        hg.sentence_id = s;
        graphs.push_back(std::move(hg));
    }
    const auto path = dir.file("graphs.hg");
    write_hypergraphs(path, graphs);
    const auto back = read_hypergraphs(path);
    REQUIRE(back.size() == graphs.size());
    for (std::size_t s = 0; s < graphs.size(); ++s) {
        CHECK(back[s].sentence_id == graphs[s].sentence_id);
        CHECK(back[s].num_nodes == graphs[s].num_nodes);
        CHECK(back[s].dim == graphs[s].dim);
        CHECK(back[s].edges == graphs[s].edges);
    }
}

TEST_CASE("hypergraph parse errors carry line numbers") {
    TempDir dir;
    const auto path = dir.file("bad.hg");
    write_text_file(path, "HG 0 1 1 2\nE 0 - hello nonsense\n");
    try {
        read_hypergraphs(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
    }
    write_text_file(path, "E 0 - hello -\n");
    CHECK_THROWS_AS(read_hypergraphs(path), ParseError);
    write_text_file(path, "HG 0 1 3 2\nE 0 - hello -\n");
    CHECK_THROWS_AS(read_hypergraphs(path), ParseError);  // edge count mismatch
}

TEST_CASE("reference files round-trip") {
    TempDir dir;
    RefCorpus refs = {{"a", "b"}, {}, {"x"}};
    const auto path = dir.file("refs.txt");
    write_tokens_file(path, refs);
    CHECK(read_tokens_file(path) == refs);
}

TEST_CASE("weights files round-trip exactly") {
    TempDir dir;
    Weights w(4);
    w << 0.1, -2.5e-17, 3.0, 1.0 / 3.0;
    const auto path = dir.file("weights.txt");
    write_weights(path, w);
    const Weights back = read_weights(path);
    REQUIRE(back.size() == w.size());
    for (int i = 0; i < w.size(); ++i) CHECK(back[i] == w[i]);
}

TEST_CASE("nbest files round-trip") {
    TempDir dir;
    std::vector<NBestList> lists(2);
    lists[0].sentence_id = 0;
    lists[0].hyps.push_back({{"a", "b"}, {{0, 1.5}, {3, -0.25}}, 1.25});
    lists[0].hyps.push_back({{"c"}, {{1, 2.0}}, -0.5});
    lists[1].sentence_id = 1;
    lists[1].hyps.push_back({{"d", "e", "f"}, {}, 0.0});
    const auto path = dir.file("cands.nbest");
    write_nbest(path, lists);
    const auto back = read_nbest(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].sentence_id == 0);
    CHECK(back[0].hyps.size() == 2);
    CHECK(back[0].hyps[0].tokens == Tokens{"a", "b"});
    CHECK(back[0].hyps[0].features == FeatureVec{{0, 1.5}, {3, -0.25}});
    CHECK(back[0].hyps[0].score == 1.25);
    CHECK(back[1].hyps[0].tokens == Tokens{"d", "e", "f"});
}

TEST_CASE("kv files parse with comments and spacing") {
    TempDir dir;
    const auto path = dir.file("cfg.txt");
    write_text_file(path, "# comment\nalpha = 3\n beta=x y \n\n");
    const auto kv = read_kv_file(path);
    CHECK(kv.at("alpha") == "3");
    CHECK(kv.at("beta") == "x y");
    write_text_file(path, "noequals\n");
    CHECK_THROWS_AS(read_kv_file(path), ParseError);
}

TEST_CASE("format_double round-trips through text") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double v = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform_int(-12, 12));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("missing files raise parse errors") {
    CHECK_THROWS_AS(read_hypergraphs("/nonexistent/file.hg"), ParseError);
    CHECK_THROWS_AS(fnv1a_file("/nonexistent/file"), ParseError);
}

#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "botune/hypergraph.hpp"
#include "botune/metrics.hpp"
#include "botune/nbest.hpp"

namespace botune {

// Hypergraph file: one block per sentence,
//   HG <sentence_id> <num_nodes> <num_edges> <K>
//   E <head> <tail1,...> <yield_template> <idx:val,...>
// Tail slots are written [0] and [1] inside the comma-joined template; empty
// tails/template/features fields are written as "-".
std::vector<Hypergraph> read_hypergraphs(const std::string& path);
void write_hypergraphs(const std::string& path, const std::vector<Hypergraph>& hgs);

// One sentence per line, whitespace-tokenized, aligned by line number.
RefCorpus read_tokens_file(const std::string& path);
void write_tokens_file(const std::string& path, const RefCorpus& sentences);

// One "name value" pair per line; names are f0..f{K-1}.
Weights read_weights(const std::string& path);
void write_weights(const std::string& path, const Weights& w);

// N-best file: `sent_id ||| token sequence ||| idx:val ... ||| score`.
std::vector<NBestList> read_nbest(const std::string& path);
void write_nbest(const std::string& path, const std::vector<NBestList>& lists);

// Flat `key = value` text, '#' comments.
std::map<std::string, std::string> read_kv_file(const std::string& path);
void write_kv_file(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kvs);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// FNV-1a over file bytes, for task/config fingerprints.
std::uint64_t fnv1a_file(const std::string& path);
std::uint64_t fnv1a_bytes(const std::string& bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace botune

#include "botune/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "botune/errors.hpp"

namespace botune {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find(sep, start);
        if (end == std::string::npos) {
            out.push_back(s.substr(start));
            break;
        }
        out.push_back(s.substr(start, end - start));
        start = end + 1;
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string tok;
    while (iss >> tok) out.push_back(tok);
    return out;
}

int parse_int(const std::string& s, const std::string& file, int line) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(file, line, "expected integer, got '" + s + "'");
    return v;
}

double parse_double(const std::string& s, const std::string& file, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError(file, line, "expected number, got '" + s + "'");
    }
}

FeatureVec parse_features(const std::string& field, const std::string& file, int line) {
    FeatureVec f;
    if (field == "-") return f;
    for (const auto& part : split(field, ',')) {
        auto colon = part.find(':');
        if (colon == std::string::npos)
            throw ParseError(file, line, "expected idx:val, got '" + part + "'");
        f.emplace_back(parse_int(part.substr(0, colon), file, line),
                       parse_double(part.substr(colon + 1), file, line));
    }
    std::sort(f.begin(), f.end());
    return f;
}

std::string features_to_string(const FeatureVec& f, char sep) {
    if (f.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (i) out += sep;
        out += std::to_string(f[i].first);
        out += ':';
        out += format_double(f[i].second);
    }
    return out;
}

std::vector<YieldItem> parse_template(const std::string& field, const std::string& file,
                                      int line) {
    std::vector<YieldItem> t;
    if (field == "-") return t;
    for (const auto& part : split(field, ',')) {
        if (part.size() == 3 && part[0] == '[' && part[2] == ']' && part[1] >= '0' &&
            part[1] <= '9') {
            t.push_back(YieldItem::slot_ref(part[1] - '0'));
        } else if (!part.empty()) {
            t.push_back(YieldItem::terminal(part));
        } else {
            throw ParseError(file, line, "empty yield template item");
        }
    }
    return t;
}

std::string template_to_string(const std::vector<YieldItem>& t) {
    if (t.empty()) return "-";
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ',';
        if (t[i].is_slot) {
            out += '[';
            out += static_cast<char>('0' + t[i].slot);
            out += ']';
        } else {
            out += t[i].token;
        }
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path, 0, "cannot open file for writing");
    return out;
}

}  // namespace

std::string format_double(double v) {
    // shortest form that round-trips exactly
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::stod(buf) == v) return buf;
    }
    return std::to_string(v);
}

std::vector<Hypergraph> read_hypergraphs(const std::string& path) {
    auto in = open_in(path);
    std::vector<Hypergraph> out;
    std::string line;
    int line_no = 0;
    Hypergraph* cur = nullptr;
    int expect_edges = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_ws(line);
        if (fields[0] == "HG") {
            if (cur && static_cast<int>(cur->edges.size()) != expect_edges)
                throw ParseError(path, line_no, "edge count mismatch in previous block");
            if (fields.size() != 5)
                throw ParseError(path, line_no, "HG header needs 4 fields");
            Hypergraph hg;
            hg.sentence_id = parse_int(fields[1], path, line_no);
            hg.num_nodes = parse_int(fields[2], path, line_no);
            expect_edges = parse_int(fields[3], path, line_no);
            hg.dim = parse_int(fields[4], path, line_no);
            out.push_back(std::move(hg));
            cur = &out.back();
        } else if (fields[0] == "E") {
            if (!cur) throw ParseError(path, line_no, "edge line before HG header");
            if (fields.size() != 5)
                throw ParseError(path, line_no, "E line needs 4 fields");
            HyperEdge e;
            e.head = parse_int(fields[1], path, line_no);
            if (fields[2] != "-")
                for (const auto& t : split(fields[2], ','))
                    e.tails.push_back(parse_int(t, path, line_no));
            e.yield_template = parse_template(fields[3], path, line_no);
            e.features = parse_features(fields[4], path, line_no);
            cur->edges.push_back(std::move(e));
        } else {
            throw ParseError(path, line_no, "unknown record '" + fields[0] + "'");
        }
    }
    if (cur && static_cast<int>(cur->edges.size()) != expect_edges)
        throw ParseError(path, line_no, "edge count mismatch in final block");
    for (const auto& hg : out) {
        try {
            hg.validate();
        } catch (const std::exception& e) {
            throw ParseError(path, 0, "invalid hypergraph for sentence " +
                                          std::to_string(hg.sentence_id) + ": " + e.what());
        }
    }
    return out;
}

void write_hypergraphs(const std::string& path, const std::vector<Hypergraph>& hgs) {
    auto out = open_out(path);
    for (const auto& hg : hgs) {
        out << "HG " << hg.sentence_id << ' ' << hg.num_nodes << ' ' << hg.edges.size()
            << ' ' << hg.dim << '\n';
        for (const auto& e : hg.edges) {
            out << "E " << e.head << ' ';
            if (e.tails.empty()) {
                out << '-';
            } else {
                for (std::size_t i = 0; i < e.tails.size(); ++i)
                    out << (i ? "," : "") << e.tails[i];
            }
            out << ' ' << template_to_string(e.yield_template) << ' '
                << features_to_string(e.features, ',') << '\n';
        }
    }
}

RefCorpus read_tokens_file(const std::string& path) {
    auto in = open_in(path);
    RefCorpus out;
    std::string line;
    while (std::getline(in, line)) out.push_back(split_ws(line));
    return out;
}

void write_tokens_file(const std::string& path, const RefCorpus& sentences) {
    auto out = open_out(path);
    for (const auto& s : sentences) {
        for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
        out << '\n';
    }
}

Weights read_weights(const std::string& path) {
    auto in = open_in(path);
    std::vector<double> vals;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto fields = split_ws(line);
        if (fields.size() != 2)
            throw ParseError(path, line_no, "expected 'name value'");
        vals.push_back(parse_double(fields[1], path, line_no));
    }
    Weights w(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) w[i] = vals[i];
    return w;
}

void write_weights(const std::string& path, const Weights& w) {
    auto out = open_out(path);
    for (int i = 0; i < w.size(); ++i)
        out << 'f' << i << ' ' << format_double(w[i]) << '\n';
}

std::vector<NBestList> read_nbest(const std::string& path) {
    auto in = open_in(path);
    std::vector<NBestList> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> parts;
        std::size_t start = 0;
        while (true) {
            auto pos = line.find(" ||| ", start);
            if (pos == std::string::npos) {
                parts.push_back(line.substr(start));
                break;
            }
            parts.push_back(line.substr(start, pos - start));
            start = pos + 5;
        }
        if (parts.size() != 4)
            throw ParseError(path, line_no, "expected 4 fields separated by ' ||| '");
        const int sid = parse_int(parts[0], path, line_no);
        NBestHyp hyp;
        hyp.tokens = split_ws(parts[1]);
        for (const auto& fv : split_ws(parts[2])) {
            auto colon = fv.find(':');
            if (colon == std::string::npos)
                throw ParseError(path, line_no, "expected idx:val, got '" + fv + "'");
            hyp.features.emplace_back(parse_int(fv.substr(0, colon), path, line_no),
                                      parse_double(fv.substr(colon + 1), path, line_no));
        }
        std::sort(hyp.features.begin(), hyp.features.end());
        hyp.score = parse_double(parts[3], path, line_no);
        if (out.empty() || out.back().sentence_id != sid) {
            out.push_back(NBestList{sid, {}});
        }
        out.back().hyps.push_back(std::move(hyp));
    }
    return out;
}

void write_nbest(const std::string& path, const std::vector<NBestList>& lists) {
    auto out = open_out(path);
    for (const auto& list : lists) {
        for (const auto& h : list.hyps) {
            out << list.sentence_id << " ||| ";
            for (std::size_t i = 0; i < h.tokens.size(); ++i)
                out << (i ? " " : "") << h.tokens[i];
            out << " ||| ";
            for (std::size_t i = 0; i < h.features.size(); ++i) {
                if (i) out << ' ';
                out << h.features[i].first << ':' << format_double(h.features[i].second);
            }
            out << " ||| " << format_double(h.score) << '\n';
        }
    }
}

std::map<std::string, std::string> read_kv_file(const std::string& path) {
    auto in = open_in(path);
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError(path, line_no, "expected 'key = value'");
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

void write_kv_file(const std::string& path,
                   const std::vector<std::pair<std::string, std::string>>& kvs) {
    auto out = open_out(path);
    for (const auto& [k, v] : kvs) out << k << " = " << v << '\n';
}

std::uint64_t fnv1a_bytes(const std::string& bytes, std::uint64_t h) {
    if (h == 0) h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_bytes(ss.str(), 0xcbf29ce484222325ULL);
}

}  // namespace botune

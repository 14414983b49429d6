#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "lll/apps/graph.hpp"
#include "lll/apps/hypergraph.hpp"
#include "lll/apps/ksat.hpp"
#include "lll/apps/latin.hpp"
#include "lll/error.hpp"

namespace lll::io {

namespace detail {

struct Line {
    std::size_t number = 0;
    std::vector<long long> values;
    std::string first;  // first token, for headers like "p"
};

[[noreturn]] inline void parse_fail(std::size_t line, const std::string& what) {
    fail(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + what);
}

/// Non-empty lines with integer tokens; '#' starts a comment, and lines
/// starting with `skip` are dropped. A leading non-numeric token is kept in
/// `first` when `header` is given.
inline std::vector<Line> read_lines(std::istream& in, char skip = '#', const std::string& header = "") {
    std::vector<Line> out;
    std::string text;
    std::size_t no = 0;
    while (std::getline(in, text)) {
        ++no;
        if (auto h = text.find('#'); h != std::string::npos) text.erase(h);
        std::istringstream ss(text);
        std::string tok;
        Line line;
        line.number = no;
        bool first = true;
        while (ss >> tok) {
            if (first && tok[0] == skip) break;
            if (first && !header.empty() && tok == header) {
                line.first = tok;
                first = false;
                continue;
            }
            if (!line.first.empty() && line.values.empty() && tok == "cnf") continue;
            first = false;
            try {
                std::size_t used = 0;
                const long long v = std::stoll(tok, &used);
                if (used != tok.size()) parse_fail(no, "bad integer '" + tok + "'");
                line.values.push_back(v);
            } catch (const std::logic_error&) {
                parse_fail(no, "bad integer '" + tok + "'");
            }
        }
        if (!line.values.empty() || !line.first.empty()) out.push_back(std::move(line));
    }
    return out;
}

inline std::ifstream open(const std::string& path) {
    std::ifstream f(path);
    require(static_cast<bool>(f), ErrorKind::ParseError, "cannot open " + path);
    return f;
}

}  // namespace detail

/// Optional first line "n", then "u v" pairs (0-indexed). Without the header
/// n is one more than the largest id.
inline Graph read_graph(std::istream& in) {
    auto lines = detail::read_lines(in);
    std::size_t at = 0;
    long long n = -1;
    if (!lines.empty() && lines[0].values.size() == 1) {
        n = lines[0].values[0];
        if (n < 0) detail::parse_fail(lines[0].number, "negative vertex count");
        at = 1;
    }
    std::vector<std::pair<int, int>> edges;
    long long top = -1;
    for (; at < lines.size(); ++at) {
        const auto& l = lines[at];
        if (l.values.size() != 2) detail::parse_fail(l.number, "expected 'u v'");
        for (auto v : l.values) {
            if (v < 0 || (n >= 0 && v >= n)) detail::parse_fail(l.number, "vertex out of range");
            top = std::max(top, v);
        }
        if (l.values[0] == l.values[1]) detail::parse_fail(l.number, "self-loop");
        edges.emplace_back(static_cast<int>(l.values[0]), static_cast<int>(l.values[1]));
    }
    Graph g(static_cast<std::size_t>(n >= 0 ? n : top + 1));
    for (auto [u, v] : edges)
        if (!g.has_edge(u, v)) g.add_edge(u, v);
    return g;
}

/// First line "k m n", then m lines of k vertex ids.
inline HypInstance read_hypergraph(std::istream& in) {
    auto lines = detail::read_lines(in);
    if (lines.empty() || lines[0].values.size() != 3) detail::parse_fail(lines.empty() ? 1 : lines[0].number, "expected 'k m n'");
    const auto k = lines[0].values[0], m = lines[0].values[1], n = lines[0].values[2];
    if (k < 2 || m < 0 || n < k) detail::parse_fail(lines[0].number, "bad header values");
    if (static_cast<long long>(lines.size()) - 1 != m)
        detail::parse_fail(lines.back().number, "header says " + std::to_string(m) + " edges, found " +
                                                    std::to_string(lines.size() - 1));
    HypInstance h(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        std::vector<int> e;
        for (auto v : lines[i].values) e.push_back(static_cast<int>(v));
        try {
            h.add_edge(std::move(e));
        } catch (const Error& err) {
            fail(ErrorKind::InvariantViolation, "line " + std::to_string(lines[i].number) + ": " + err.what());
        }
    }
    return h;
}

/// First line "n", then n rows of n integer color ids.
inline ColorMatrix read_color_matrix(std::istream& in) {
    auto lines = detail::read_lines(in);
    if (lines.empty() || lines[0].values.size() != 1 || lines[0].values[0] < 1)
        detail::parse_fail(lines.empty() ? 1 : lines[0].number, "expected matrix size n");
    const auto n = static_cast<std::size_t>(lines[0].values[0]);
    if (lines.size() != n + 1)
        detail::parse_fail(lines.back().number, "expected " + std::to_string(n) + " rows");
    std::vector<std::vector<int>> rows;
    for (std::size_t i = 1; i <= n; ++i) {
        if (lines[i].values.size() != n) detail::parse_fail(lines[i].number, "row has wrong length");
        rows.emplace_back(lines[i].values.begin(), lines[i].values.end());
    }
    return ColorMatrix::from_rows(rows);
}

/// DIMACS CNF. Every clause must have width k (0 takes the first clause's
/// width); repeated variables are rejected, not merged.
inline CnfInstance read_dimacs(std::istream& in, std::size_t k = 0) {
    auto lines = detail::read_lines(in, 'c', "p");
    if (lines.empty() || lines[0].first != "p" || lines[0].values.size() != 2)
        detail::parse_fail(lines.empty() ? 1 : lines[0].number, "expected 'p cnf n m'");
    CnfInstance inst;
    if (lines[0].values[0] < 1 || lines[0].values[1] < 0) detail::parse_fail(lines[0].number, "bad header values");
    inst.n = static_cast<std::size_t>(lines[0].values[0]);
    const auto m = static_cast<std::size_t>(lines[0].values[1]);
    std::vector<int> cur;
    std::size_t cur_line = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (!lines[i].first.empty()) detail::parse_fail(lines[i].number, "second header");
        for (auto v : lines[i].values) {
            if (cur.empty()) cur_line = lines[i].number;
            if (v == 0) {
                if (cur.empty()) detail::parse_fail(lines[i].number, "empty clause");
                if (k == 0) k = cur.size();
                if (cur.size() != k)
                    fail(ErrorKind::InvariantViolation, "line " + std::to_string(cur_line) + ": clause width " +
                                                            std::to_string(cur.size()) + ", expected " + std::to_string(k));
                inst.clauses.push_back(std::move(cur));
                cur.clear();
                continue;
            }
            if (static_cast<std::size_t>(v < 0 ? -v : v) > inst.n) detail::parse_fail(lines[i].number, "variable out of range");
            cur.push_back(static_cast<int>(v));
        }
    }
    if (!cur.empty()) detail::parse_fail(cur_line, "clause not terminated by 0");
    if (inst.clauses.size() != m)
        detail::parse_fail(lines.back().number, "header says " + std::to_string(m) + " clauses, found " +
                                                    std::to_string(inst.clauses.size()));
    inst.k = k;
    inst.validate();
    return inst;
}

inline Graph read_graph(const std::string& path) { auto f = detail::open(path); return read_graph(f); }
inline HypInstance read_hypergraph(const std::string& path) { auto f = detail::open(path); return read_hypergraph(f); }
inline ColorMatrix read_color_matrix(const std::string& path) { auto f = detail::open(path); return read_color_matrix(f); }
inline CnfInstance read_dimacs(const std::string& path, std::size_t k = 0) {
    auto f = detail::open(path);
    return read_dimacs(f, k);
}

}  // namespace lll::io

#pragma once

// Pair files for an external pairwise relevance scorer, and the score files
// it returns.
//
// Pair TSV, one record per line:  query_id  candidate_id  label  text_a  text_b
// Score TSV, one record per line: query_id  candidate_id  score
//
// Fields escape backslash, tab, newline and carriage return as \\ \t \n \r.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/error.hpp"
#include "nlps/evaluation.hpp"
#include "nlps/pvdbow.hpp"

namespace nlps {

struct PairExample {
    EntryId query_id;
    EntryId candidate_id;
    bool relevant = false;
    std::string text_a;  // query statement
    std::string text_b;  // candidate statement

    friend bool operator==(const PairExample&, const PairExample&) = default;
};

struct PairSplit {
    std::vector<PairExample> train;
    std::vector<PairExample> dev;
};

struct PairExportOptions {
    std::size_t negative_ratio = 4;
    double dev_fraction = 0.2;
    std::uint64_t seed = 1;
};

namespace detail {

// Uniform index in [0, n) from the platform-independent double draw.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

template <class T>
void seeded_shuffle(std::vector<T>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

}  // namespace detail

// Positives are every (query, gold) pair. Each query also gets
// negative_ratio * |gold| negatives drawn without replacement from the pool
// minus gold and the query (fewer if the pool runs out). Queries, not
// pairs, are split between train and dev. Texts are emitted verbatim.
inline PairSplit export_pairs(const Corpus& corpus, const QuerySet& qs, const PairExportOptions& options = {}) {
    if (options.negative_ratio < 1) throw ConfigError("negative ratio must be at least 1");
    if (!(options.dev_fraction >= 0.0 && options.dev_fraction < 1.0))
        throw ConfigError("dev fraction must be in [0, 1)");
    std::mt19937_64 rng(options.seed);

    std::vector<std::size_t> order(qs.queries.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    detail::seeded_shuffle(order, rng);
    auto n_dev = static_cast<std::size_t>(std::llround(options.dev_fraction * static_cast<double>(order.size())));
    std::vector<char> is_dev(order.size(), 0);
    for (std::size_t i = 0; i < n_dev; ++i) is_dev[order[i]] = 1;

    PairSplit out;
    for (std::size_t qi = 0; qi < qs.queries.size(); ++qi) {
        const Query& q = qs.queries[qi];
        std::vector<PairExample>& dest = is_dev[qi] ? out.dev : out.train;
        std::set<std::string_view> gold(q.gold.begin(), q.gold.end());
        for (const EntryId& g : q.gold) dest.push_back({q.id, g, true, q.text, corpus.at(g).statement_text});

        std::vector<const EntryId*> negatives;
        for (const EntryId& c : qs.candidates) {
            if (c != q.id && !gold.count(c)) negatives.push_back(&c);
        }
        std::size_t want = std::min(negatives.size(), options.negative_ratio * q.gold.size());
        // partial Fisher-Yates; chosen negatives are emitted in id order
        for (std::size_t i = 0; i < want; ++i)
            std::swap(negatives[i], negatives[i + detail::uniform_index(rng, negatives.size() - i)]);
        negatives.resize(want);
        std::sort(negatives.begin(), negatives.end(), [](const EntryId* a, const EntryId* b) { return *a < *b; });
        for (const EntryId* c : negatives) dest.push_back({q.id, *c, false, q.text, corpus.at(*c).statement_text});
    }
    return out;
}

inline std::string tsv_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string tsv_unescape(std::string_view s, std::size_t offset) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i == s.size()) throw ParseError("dangling backslash in TSV field", offset + i);
        switch (s[i]) {
            case '\\': out.push_back('\\'); break;
            case 't': out.push_back('\t'); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            default: throw ParseError(std::string("unknown escape \\") + s[i] + " in TSV field", offset + i);
        }
    }
    return out;
}

namespace detail {

struct TsvRecord {
    std::vector<std::string> fields;
    std::size_t offset = 0;
};

inline std::vector<TsvRecord> read_tsv(std::string_view data, std::size_t columns) {
    std::vector<TsvRecord> out;
    std::size_t pos = 0;
    while (pos < data.size()) {
        std::size_t eol = data.find('\n', pos);
        if (eol == std::string_view::npos) eol = data.size();
        std::string_view line = data.substr(pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) {
            TsvRecord rec{{}, pos};
            std::size_t start = 0;
            while (true) {
                std::size_t tab = line.find('\t', start);
                std::string_view f = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
                rec.fields.push_back(tsv_unescape(f, pos + start));
                if (tab == std::string_view::npos) break;
                start = tab + 1;
            }
            if (rec.fields.size() != columns) {
                throw ParseError("expected " + std::to_string(columns) + " tab-separated fields, found " +
                                     std::to_string(rec.fields.size()),
                                 pos);
            }
            out.push_back(std::move(rec));
        }
        pos = eol + 1;
    }
    return out;
}

}  // namespace detail

inline std::string write_pairs_tsv(const std::vector<PairExample>& pairs) {
    std::string out;
    for (const PairExample& p : pairs) {
        out += tsv_escape(p.query_id) + '\t' + tsv_escape(p.candidate_id) + '\t' + (p.relevant ? "relevant" : "irrelevant") +
               '\t' + tsv_escape(p.text_a) + '\t' + tsv_escape(p.text_b) + '\n';
    }
    return out;
}

inline std::vector<PairExample> read_pairs_tsv(std::string_view data) {
    std::vector<PairExample> out;
    for (auto& rec : detail::read_tsv(data, 5)) {
        bool relevant;
        if (rec.fields[2] == "relevant") relevant = true;
        else if (rec.fields[2] == "irrelevant") relevant = false;
        else throw ParseError("label must be relevant or irrelevant, got '" + rec.fields[2] + "'", rec.offset);
        out.push_back({rec.fields[0], rec.fields[1], relevant, rec.fields[3], rec.fields[4]});
    }
    return out;
}

struct ScoreRecord {
    EntryId query_id;
    EntryId candidate_id;
    double score = 0.0;
};

inline std::string format_score(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline std::string write_scores_tsv(const std::vector<ScoreRecord>& records) {
    std::string out;
    for (const ScoreRecord& r : records)
        out += tsv_escape(r.query_id) + '\t' + tsv_escape(r.candidate_id) + '\t' + format_score(r.score) + '\n';
    return out;
}

// Parses a score file. With a corpus, every id must name one of its entries.
inline ScoreTable read_scores_tsv(std::string_view data, const Corpus* corpus = nullptr) {
    ScoreTable table;
    for (auto& rec : detail::read_tsv(data, 3)) {
        const std::string& s = rec.fields[2];
        double score = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), score);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ParseError("bad score '" + s + "'", rec.offset);
        if (!std::isfinite(score)) throw ParseError("non-finite score '" + s + "'", rec.offset);
        for (int i = 0; i < 2; ++i) {
            if (corpus && !corpus->contains(rec.fields[i]))
                throw LookupError("score file names unknown entry '" + rec.fields[i] + "'");
        }
        if (!table[rec.fields[0]].emplace(rec.fields[1], score).second)
            throw ParseError("duplicate score for (" + rec.fields[0] + ", " + rec.fields[1] + ")", rec.offset);
    }
    return table;
}

}  // namespace nlps

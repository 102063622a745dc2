#pragma once

// Cosine ranking of candidate entries against a query.

#include <algorithm>
#include <concepts>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/error.hpp"

namespace nlps {

template <class M>
concept VectorModel = requires(const M& m, std::string_view s, const typename M::Vector& v) {
    { m.contains(s) } -> std::convertible_to<bool>;
    { m.vector_of(s) } -> std::convertible_to<typename M::Vector>;
    { m.vector_for_text(s) } -> std::convertible_to<typename M::Vector>;
    { M::cosine(v, v) } -> std::convertible_to<double>;
    { M::is_zero(v) } -> std::convertible_to<bool>;
};

struct RankedItem {
    EntryId id;
    double score = 0.0;

    friend bool operator==(const RankedItem&, const RankedItem&) = default;
};

struct RankedList {
    EntryId query_id;
    std::vector<RankedItem> items;  // score descending, then id ascending
    bool zero_query = false;        // query vector had no known terms

    std::vector<EntryId> ids() const {
        std::vector<EntryId> out;
        out.reserve(items.size());
        for (const RankedItem& it : items) out.push_back(it.id);
        return out;
    }
};

// A query given as raw text rather than a corpus entry.
struct QueryText {
    EntryId id;  // used only to exclude the query from its own ranking
    std::string text;
};

inline void sort_ranking(std::vector<RankedItem>& items) {
    std::sort(items.begin(), items.end(), [](const RankedItem& a, const RankedItem& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

template <VectorModel M>
RankedList rank_vector(const M& model, EntryId query_id, const typename M::Vector& query,
                       const std::vector<EntryId>& candidates) {
    if (candidates.empty()) throw ConfigError("cannot rank an empty candidate list");
    RankedList out;
    out.query_id = std::move(query_id);
    out.zero_query = M::is_zero(query);
    std::set<EntryId> seen;
    for (const EntryId& c : candidates) {
        if (!model.contains(c)) throw LookupError("candidate '" + c + "' not in model");
        if (c == out.query_id || !seen.insert(c).second) continue;
        double score = out.zero_query ? 0.0 : M::cosine(query, model.vector_of(c));
        out.items.push_back({c, score});
    }
    sort_ranking(out.items);
    return out;
}

template <VectorModel M>
RankedList rank(const M& model, std::string_view query_id, const std::vector<EntryId>& candidates) {
    return rank_vector(model, EntryId(query_id), model.vector_of(query_id), candidates);
}

template <VectorModel M>
RankedList rank(const M& model, const QueryText& query, const std::vector<EntryId>& candidates) {
    return rank_vector(model, query.id, model.vector_for_text(query.text), candidates);
}

}  // namespace nlps

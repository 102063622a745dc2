#pragma once

// Corpus and premise-graph statistics.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "nlps/corpus.hpp"
#include "nlps/corpus_io.hpp"
#include "nlps/graph.hpp"
#include "nlps/text.hpp"

namespace nlps {

struct GraphStats {
    std::map<EntryKind, std::size_t> counts_by_kind;
    std::size_t total_entries = 0;
    std::map<std::size_t, std::size_t> premise_count_histogram;    // #premises -> #entries (>= 1 premise)
    std::map<std::size_t, std::size_t> dependant_count_histogram;  // #dependants -> #entries (>= 1 dependant)
    std::size_t entries_with_1_to_5_premises = 0;
    std::size_t entries_with_1_to_3_dependants = 0;
    std::size_t node_count = 0;
    std::size_t edge_count = 0;
    std::optional<std::pair<EntryId, std::size_t>> max_premise_entry;  // ties -> smallest id
    double avg_symbols_per_statement = 0.0;  // Unicode scalars per statement_text
    std::map<std::string, std::size_t> entries_per_category;
    std::vector<std::vector<EntryId>> cycles;
};

inline std::size_t histogram_range(const std::map<std::size_t, std::size_t>& h, std::size_t lo, std::size_t hi) {
    std::size_t n = 0;
    for (auto it = h.lower_bound(lo); it != h.end() && it->first <= hi; ++it) n += it->second;
    return n;
}

inline GraphStats compute_stats(const Corpus& corpus, const PremiseGraph& graph) {
    GraphStats s;
    s.counts_by_kind = corpus.counts_by_kind();
    s.total_entries = corpus.size();
    s.node_count = graph.node_count();
    s.edge_count = graph.edge_count();

    std::size_t symbols = 0;
    for (const Entry& e : corpus.entries()) {
        symbols += text::utf8_length(e.statement_text);
        for (const std::string& c : e.categories) ++s.entries_per_category[c];
    }
    if (!corpus.empty()) s.avg_symbols_per_statement = static_cast<double>(symbols) / static_cast<double>(corpus.size());

    for (std::size_t v = 0; v < graph.node_count(); ++v) {
        if (std::size_t out = graph.out_degree(v); out > 0) {
            ++s.premise_count_histogram[out];
            if (!s.max_premise_entry || out > s.max_premise_entry->second)
                s.max_premise_entry = std::make_pair(graph.nodes()[v], out);
        }
        if (std::size_t in = graph.in_degree(v); in > 0) ++s.dependant_count_histogram[in];
    }
    s.entries_with_1_to_5_premises = histogram_range(s.premise_count_histogram, 1, 5);
    s.entries_with_1_to_3_dependants = histogram_range(s.dependant_count_histogram, 1, 3);
    s.cycles = find_cycles(graph);
    return s;
}

inline json to_json(const GraphStats& s) {
    auto hist = [](const std::map<std::size_t, std::size_t>& h) {
        json j = json::object();
        for (const auto& [k, v] : h) j[std::to_string(k)] = v;
        return j;
    };
    json by_kind = json::object();
    for (const auto& [k, n] : s.counts_by_kind) by_kind[std::string(to_string(k))] = n;
    json j{
        {"counts_by_kind", by_kind},
        {"total_entries", s.total_entries},
        {"node_count", s.node_count},
        {"edge_count", s.edge_count},
        {"premise_count_histogram", hist(s.premise_count_histogram)},
        {"dependant_count_histogram", hist(s.dependant_count_histogram)},
        {"entries_with_1_to_5_premises", s.entries_with_1_to_5_premises},
        {"entries_with_1_to_3_dependants", s.entries_with_1_to_3_dependants},
        {"avg_symbols_per_statement", s.avg_symbols_per_statement},
        {"entries_per_category", s.entries_per_category},
        {"cycles", s.cycles},
    };
    j["max_premise_entry"] = s.max_premise_entry
                                 ? json{{"id", s.max_premise_entry->first}, {"count", s.max_premise_entry->second}}
                                 : json(nullptr);
    return j;
}

}  // namespace nlps

#pragma once

// Premise selection evaluation: queries, k-hop gold sets, average precision
// and MAP.
//
// AveP(q) = (1/|gold|) * sum over gold g of precision@rank(g), where gold
// items missing from the ranking contribute 0. MAP is the mean AveP over
// queries with a nonempty gold set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "nlps/corpus.hpp"
#include "nlps/corpus_io.hpp"
#include "nlps/error.hpp"
#include "nlps/graph.hpp"
#include "nlps/model_io.hpp"
#include "nlps/parallel.hpp"
#include "nlps/ranking.hpp"
#include "nlps/tokenizer.hpp"

namespace nlps {

enum class Method { TfIdf, PvDbow, ExternalScores };

inline std::string_view to_string(Method m) noexcept {
    switch (m) {
        case Method::TfIdf: return "tfidf";
        case Method::PvDbow: return "pvdbow";
        case Method::ExternalScores: return "external-scores";
    }
    return "?";
}

inline Method method_from_string(std::string_view s) {
    for (Method m : {Method::TfIdf, Method::PvDbow, Method::ExternalScores}) {
        if (s == to_string(m)) return m;
    }
    throw ConfigError("unknown method '" + std::string(s) + "' (expected tfidf, pvdbow or external-scores)");
}

enum class CandidatePool { AllEntries, CategoryRestricted };

inline std::string_view to_string(CandidatePool p) noexcept {
    return p == CandidatePool::AllEntries ? "all-entries" : "category-restricted";
}

struct EvaluationConfig {
    Strategy strategy = Strategy::TokenisedExpression;
    Method method = Method::TfIdf;
    std::size_t hop_k = 1;
    std::optional<std::string> category_filter;
    // Only consulted with a category filter; queries are always restricted.
    CandidatePool candidate_pool = CandidatePool::CategoryRestricted;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct Query {
    EntryId id;
    std::string text;           // statement only
    std::vector<EntryId> gold;  // sorted
};

struct QuerySet {
    std::vector<Query> queries;        // ascending id
    std::vector<EntryId> skipped;      // propositions with empty gold
    std::vector<EntryId> candidates;   // pool, ascending id
};

// Propositions (never definitions) whose k-hop premises intersected with
// the candidate pool are nonempty.
inline QuerySet make_queries(const Corpus& corpus, const PremiseGraph& graph, const EvaluationConfig& config) {
    if (config.hop_k < 1) throw ConfigError("hop count must be at least 1");
    auto in_category = [&](const Entry& e) {
        return !config.category_filter || e.categories.count(*config.category_filter) > 0;
    };
    if (config.category_filter) {
        bool known = std::any_of(corpus.entries().begin(), corpus.entries().end(), in_category);
        if (!known) throw ConfigError("unknown category '" + *config.category_filter + "'");
    }
    bool restrict_pool = config.category_filter && config.candidate_pool == CandidatePool::CategoryRestricted;

    QuerySet qs;
    std::set<EntryId> pool;
    for (const Entry& e : corpus.entries()) {
        if (!restrict_pool || in_category(e)) {
            qs.candidates.push_back(e.id);
            pool.insert(e.id);
        }
    }
    for (const Entry& e : corpus.entries()) {
        if (e.kind == EntryKind::Definition || !in_category(e)) continue;
        Query q{e.id, e.statement_text, {}};
        if (graph.contains(e.id)) {
            for (EntryId& p : k_hop_premises(graph, e.id, config.hop_k)) {
                if (pool.count(p)) q.gold.push_back(std::move(p));
            }
        }
        if (q.gold.empty()) qs.skipped.push_back(e.id);
        else qs.queries.push_back(std::move(q));
    }
    if (qs.queries.empty()) throw ConfigError("no queries with a nonempty gold premise set");
    return qs;
}

// `ranked` must not contain duplicates.
inline double average_precision(const std::vector<EntryId>& ranked, const std::vector<EntryId>& gold) {
    if (gold.empty()) throw std::logic_error("average_precision: empty gold set");
    std::set<std::string_view> g(gold.begin(), gold.end());
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (g.count(ranked[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(g.size());
}

// query id -> candidate id -> score
using ScoreTable = std::map<EntryId, std::map<EntryId, double>, std::less<>>;

struct EvaluationReport {
    EvaluationConfig config;
    std::string model_strategy;
    double map_score = 0.0;
    std::size_t num_queries = 0;
    std::map<EntryId, double> per_query;
    std::vector<EntryId> skipped_queries;
    std::vector<EntryId> zero_vector_queries;
    std::vector<EntryId> unscored_queries;  // external scores only
    double timing_ms = 0.0;
};

inline json to_json(const EvaluationConfig& c) {
    json j{{"strategy", to_string(c.strategy)},
           {"method", to_string(c.method)},
           {"hop_k", c.hop_k},
           {"candidate_pool", to_string(c.category_filter ? c.candidate_pool : CandidatePool::AllEntries)},
           {"seed", c.seed},
           {"workers", c.workers}};
    j["category_filter"] = c.category_filter ? json(*c.category_filter) : json(nullptr);
    return j;
}

inline json to_json(const EvaluationReport& r) {
    return {{"config", to_json(r.config)},
            {"map", r.map_score},
            {"num_queries", r.num_queries},
            {"per_query", r.per_query},
            {"skipped_queries", r.skipped_queries},
            {"zero_vector_queries", r.zero_vector_queries},
            {"unscored_queries", r.unscored_queries},
            {"timing_ms", r.timing_ms}};
}

namespace detail {

// Scores every pool candidate for one query; index-aligned with the pool.
// Returns false when the query vector is zero.
using PoolScorer = std::function<bool(const Query&, std::vector<double>&)>;

// AveP from pool scores under the ranking order (score desc, id asc), the
// query itself excluded.
inline double average_precision_from_scores(const std::vector<EntryId>& pool, const std::vector<double>& scores,
                                            std::string_view query_id, const std::vector<EntryId>& gold) {
    auto before = [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : pool[a] < pool[b];
    };
    std::vector<std::size_t> gold_pos;
    for (const EntryId& g : gold) {
        auto it = std::lower_bound(pool.begin(), pool.end(), g);
        if (it != pool.end() && *it == g) gold_pos.push_back(static_cast<std::size_t>(it - pool.begin()));
    }
    std::vector<std::size_t> ranks;
    if (gold_pos.size() <= 32) {
        for (std::size_t gp : gold_pos) {
            std::size_t r = 1;
            for (std::size_t i = 0; i < pool.size(); ++i) {
                if (i != gp && pool[i] != query_id && before(i, gp)) ++r;
            }
            ranks.push_back(r);
        }
    } else {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool[i] != query_id) order.push_back(i);
        }
        std::sort(order.begin(), order.end(), before);
        std::vector<std::size_t> rank_of(pool.size(), 0);
        for (std::size_t r = 0; r < order.size(); ++r) rank_of[order[r]] = r + 1;
        for (std::size_t gp : gold_pos) ranks.push_back(rank_of[gp]);
    }
    std::sort(ranks.begin(), ranks.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i) sum += static_cast<double>(i + 1) / static_cast<double>(ranks[i]);
    return sum / static_cast<double>(gold.size());
}

inline PoolScorer tfidf_scorer(const TfIdfModel& m, const std::vector<EntryId>& pool) {
    struct Index {
        std::vector<std::vector<std::pair<std::uint32_t, double>>> postings;  // term -> (pool pos, weight)
        std::vector<double> norms;
    };
    auto idx = std::make_shared<Index>();
    idx->postings.resize(m.vocabulary().size());
    for (std::uint32_t p = 0; p < pool.size(); ++p) {
        SparseVector v = m.vector_of(pool[p]);
        idx->norms.push_back(norm(v));
        for (const auto& [t, w] : v) idx->postings[t].emplace_back(p, w);
    }
    return [&m, idx](const Query& q, std::vector<double>& scores) {
        SparseVector qv = m.contains(q.id) ? m.vector_of(q.id) : m.vector_for_text(q.text);
        double nq = norm(qv);
        std::fill(scores.begin(), scores.end(), 0.0);
        if (nq == 0.0) return false;
        // terms in ascending order, so each sum accumulates like dot()
        for (const auto& [t, w] : qv)
            for (const auto& [p, dw] : idx->postings[t]) scores[p] += w * dw;
        for (std::size_t p = 0; p < scores.size(); ++p) {
            double nd = idx->norms[p];
            scores[p] = nd == 0.0 ? 0.0 : scores[p] / (nq * nd);
        }
        return true;
    };
}

inline PoolScorer pvdbow_scorer(const PvDbowModel& m, const std::vector<EntryId>& pool) {
    auto vecs = std::make_shared<std::vector<PvDbowModel::Vector>>();
    for (const EntryId& id : pool) vecs->push_back(m.vector_of(id));
    return [&m, vecs](const Query& q, std::vector<double>& scores) {
        PvDbowModel::Vector qv = m.contains(q.id) ? m.vector_of(q.id) : m.vector_for_text(q.text);
        if (PvDbowModel::is_zero(qv)) {
            std::fill(scores.begin(), scores.end(), 0.0);
            return false;
        }
        for (std::size_t p = 0; p < scores.size(); ++p) scores[p] = PvDbowModel::cosine(qv, (*vecs)[p]);
        return true;
    };
}

inline EvaluationReport run_evaluation(const Corpus& corpus, const EvaluationConfig& config,
                                       const std::function<PoolScorer(const std::vector<EntryId>&)>& make_scorer,
                                       const ScoreTable* external = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    PremiseGraph graph = build_graph(corpus);
    QuerySet qs = make_queries(corpus, graph, config);
    EvaluationReport report;
    report.config = config;
    report.skipped_queries = qs.skipped;

    std::vector<Query> queries;
    for (Query& q : qs.queries) {
        if (external && external->find(q.id) == external->end()) report.unscored_queries.push_back(q.id);
        else queries.push_back(std::move(q));
    }
    if (queries.empty()) throw ConfigError("no evaluated queries have scores");

    PoolScorer scorer = make_scorer(qs.candidates);
    std::vector<double> ap(queries.size());
    std::vector<char> zero(queries.size(), 0);
    parallel_for(queries.size(), config.workers, [&](std::size_t i) {
        std::vector<double> scores(qs.candidates.size());
        zero[i] = !scorer(queries[i], scores);
        ap[i] = average_precision_from_scores(qs.candidates, scores, queries[i].id, queries[i].gold);
    });

    double sum = 0.0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        sum += ap[i];
        report.per_query[queries[i].id] = ap[i];
        if (zero[i]) report.zero_vector_queries.push_back(queries[i].id);
    }
    report.num_queries = queries.size();
    report.map_score = sum / static_cast<double>(queries.size());
    report.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace detail

inline EvaluationReport evaluate(const Corpus& corpus, const RetrievalModel& model, const EvaluationConfig& config) {
    Strategy trained = model_strategy(model);
    if (trained != config.strategy) {
        throw ConfigError("strategy mismatch: model was trained with '" + std::string(to_string(trained)) +
                          "' but evaluation requested '" + std::string(to_string(config.strategy)) + "'");
    }
    Method expected = std::holds_alternative<TfIdfModel>(model) ? Method::TfIdf : Method::PvDbow;
    if (config.method != expected) {
        throw ConfigError("method mismatch: model file holds '" + std::string(to_string(expected)) +
                          "' but evaluation requested '" + std::string(to_string(config.method)) + "'");
    }
    EvaluationReport r = detail::run_evaluation(corpus, config, [&](const std::vector<EntryId>& pool) {
        return std::visit(
            [&](const auto& m) -> detail::PoolScorer {
                if constexpr (std::is_same_v<std::decay_t<decltype(m)>, TfIdfModel>) return detail::tfidf_scorer(m, pool);
                else return detail::pvdbow_scorer(m, pool);
            },
            model);
    });
    r.model_strategy = std::string(to_string(trained));
    return r;
}

// Candidates without a score rank below every scored candidate; queries
// without any score record are listed as unscored and left out of MAP.
inline EvaluationReport evaluate_external(const Corpus& corpus, const ScoreTable& scores, EvaluationConfig config) {
    config.method = Method::ExternalScores;
    return detail::run_evaluation(
        corpus, config,
        [&](const std::vector<EntryId>& pool) -> detail::PoolScorer {
            return [&scores, &pool](const Query& q, std::vector<double>& out) {
                const auto& row = scores.find(q.id)->second;
                for (std::size_t p = 0; p < pool.size(); ++p) {
                    auto it = row.find(pool[p]);
                    out[p] = it == row.end() ? -std::numeric_limits<double>::infinity() : it->second;
                }
                return true;
            };
        },
        &scores);
}

}  // namespace nlps

#include <gtest/gtest.h>

#include <random>

#include "fixture.hpp"
#include "nlps/evaluation.hpp"
#include "oracles.hpp"

using namespace nlps;
using Ids = std::vector<EntryId>;

namespace {

RetrievalModel tfidf_for(const Corpus& c, Strategy s = Strategy::TokenisedExpression) {
    return fit_tfidf(tokenize_corpus(c, s));
}

oracle::DenseTfIdf dense_for(const Corpus& c) {
    std::map<std::string, std::vector<std::string>> docs;
    for (const TokenStream& s : tokenize_corpus(c, Strategy::TokenisedExpression)) docs[s.source_id] = s.tokens;
    return oracle::DenseTfIdf(docs);
}

}  // namespace

TEST(AveragePrecision, Examples) {
    EXPECT_NEAR(average_precision({"g1", "n1", "g2"}, {"g1", "g2"}), (1.0 + 2.0 / 3.0) / 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(average_precision({"g1", "g2", "n1"}, {"g1", "g2"}), 1.0);
    EXPECT_DOUBLE_EQ(average_precision({"n1", "n2"}, {"g1"}), 0.0);
    EXPECT_THROW(average_precision({"a"}, {}), std::logic_error);
}

TEST(AveragePrecision, UnrankedGoldCountsInDenominator) {
    EXPECT_DOUBLE_EQ(average_precision({"g1", "n1"}, {"g1", "g2"}), 0.5);
}

TEST(AveragePrecision, TrailingIrrelevantItemsChangeNothing) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        Ids ranked, gold;
        for (int i = 0; i < 15; ++i) {
            ranked.push_back("c" + std::to_string(i));
            if (rng() % 3 == 0) gold.push_back(ranked.back());
        }
        if (gold.empty()) continue;
        std::shuffle(ranked.begin(), ranked.end(), rng);
        double before = average_precision(ranked, gold);
        for (int i = 0; i < 10; ++i) ranked.push_back("x" + std::to_string(i));
        EXPECT_EQ(average_precision(ranked, gold), before);
    }
}

TEST(AveragePrecision, FromScoresMatchesOracleOnBothPaths) {
    std::mt19937_64 rng(3);
    for (std::size_t gold_size : {3u, 32u, 33u, 60u}) {
        for (int t = 0; t < 20; ++t) {
            Ids pool;
            std::vector<double> scores;
            for (int i = 0; i < 100; ++i) {
                pool.push_back("p" + std::to_string(100 + i));
                scores.push_back(static_cast<double>(rng() % 7));
            }
            Ids shuffled = pool;
            std::shuffle(shuffled.begin(), shuffled.end(), rng);
            EntryId query = shuffled[0];
            Ids gold(shuffled.begin() + 1, shuffled.begin() + 1 + static_cast<long>(gold_size));
            std::sort(gold.begin(), gold.end());

            std::vector<std::pair<double, EntryId>> order;
            for (std::size_t i = 0; i < pool.size(); ++i)
                if (pool[i] != query) order.emplace_back(-scores[i], pool[i]);
            std::sort(order.begin(), order.end());
            Ids ranking;
            for (auto& [s, id] : order) ranking.push_back(id);
            double expect = oracle::average_precision(ranking, std::set<std::string>(gold.begin(), gold.end()));
            EXPECT_NEAR(detail::average_precision_from_scores(pool, scores, query, gold), expect, 1e-12);
        }
    }
}

TEST(Queries, FixtureOneHop) {
    const Corpus& c = fixture::corpus();
    PremiseGraph g = build_graph(c);
    QuerySet qs = make_queries(c, g, {});
    EXPECT_EQ(qs.candidates.size(), c.size());
    EXPECT_NE(std::find(qs.skipped.begin(), qs.skipped.end(), "infinitude_of_primes"), qs.skipped.end());
    for (const Query& q : qs.queries) {
        EXPECT_NE(c.at(q.id).kind, EntryKind::Definition);
        EXPECT_EQ(q.gold, k_hop_premises(g, q.id, 1));
        EXPECT_EQ(q.text, c.at(q.id).statement_text);
    }
    EXPECT_EQ(qs.queries.size() + qs.skipped.size(), c.size() - c.counts_by_kind().at(EntryKind::Definition));
}

TEST(Queries, Errors) {
    const Corpus& c = fixture::corpus();
    PremiseGraph g = build_graph(c);
    EvaluationConfig cfg;
    cfg.hop_k = 0;
    EXPECT_THROW(make_queries(c, g, cfg), ConfigError);
    cfg.hop_k = 1;
    cfg.category_filter = "No Such Category";
    EXPECT_THROW(make_queries(c, g, cfg), ConfigError);
    Corpus defs_only({fixture::corpus().at("definition:set")});
    EXPECT_THROW(make_queries(defs_only, build_graph(defs_only), {}), ConfigError);
}

TEST(Queries, CategoryFilter) {
    const Corpus& c = fixture::corpus();
    PremiseGraph g = build_graph(c);
    EvaluationConfig cfg;
    cfg.category_filter = "Number Theory";
    QuerySet restricted = make_queries(c, g, cfg);
    for (const EntryId& id : restricted.candidates) EXPECT_TRUE(c.at(id).categories.count("Number Theory"));
    for (const Query& q : restricted.queries) {
        EXPECT_TRUE(c.at(q.id).categories.count("Number Theory"));
        for (const EntryId& p : q.gold) EXPECT_TRUE(c.at(p).categories.count("Number Theory"));
    }
    cfg.candidate_pool = CandidatePool::AllEntries;
    QuerySet open = make_queries(c, g, cfg);
    EXPECT_EQ(open.candidates.size(), c.size());
    EXPECT_GE(open.queries.size(), restricted.queries.size());
}

TEST(Evaluate, MatchesBruteForceOnFixture) {
    const Corpus& c = fixture::corpus();
    for (std::size_t k : {1u, 2u, 3u}) {
        EvaluationConfig cfg;
        cfg.hop_k = k;
        EvaluationReport r = evaluate(c, tfidf_for(c), cfg);
        EXPECT_NEAR(r.map_score, oracle::map_bruteforce(c.entries(), dense_for(c), k), 1e-9) << k;
    }
}

TEST(Evaluate, MatchesBruteForceOnRandomCorpora) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 30; ++t) {
        Corpus c(oracle::random_corpus(rng, 30));
        std::size_t k = 1 + t % 3;
        EvaluationConfig cfg;
        cfg.hop_k = k;
        double expect = oracle::map_bruteforce(c.entries(), dense_for(c), k);
        if (expect == 0.0) continue;  // no queries at all
        EXPECT_NEAR(evaluate(c, tfidf_for(c), cfg).map_score, expect, 1e-9);
    }
}

TEST(Evaluate, EntryOrderAndWorkersDoNotMatter) {
    std::vector<Entry> entries = fixture::corpus().entries();
    Corpus c(entries);
    EvaluationConfig cfg;
    cfg.hop_k = 2;
    EvaluationReport ref = evaluate(c, tfidf_for(c), cfg);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 3; ++i) {
        std::shuffle(entries.begin(), entries.end(), rng);
        Corpus shuffled(entries);
        cfg.workers = 1 + static_cast<unsigned>(i) * 3;
        EvaluationReport r = evaluate(shuffled, tfidf_for(shuffled), cfg);
        EXPECT_EQ(r.per_query, ref.per_query);
        EXPECT_EQ(r.map_score, ref.map_score);
    }
}

TEST(Evaluate, PvDbowRuns) {
    const Corpus& c = fixture::corpus();
    PvDbowParams p;
    p.dim = 8;
    p.epochs = 3;
    p.min_count = 1;
    EvaluationConfig cfg;
    cfg.method = Method::PvDbow;
    EvaluationReport r = evaluate(c, train_pvdbow(tokenize_corpus(c, cfg.strategy), p), cfg);
    EXPECT_GT(r.num_queries, 0u);
    EXPECT_GE(r.map_score, 0.0);
    EXPECT_LE(r.map_score, 1.0);
}

TEST(Evaluate, StrategyMismatchNamesBoth) {
    const Corpus& c = fixture::corpus();
    EvaluationConfig cfg;
    cfg.strategy = Strategy::CharLevel;
    try {
        evaluate(c, tfidf_for(c, Strategy::ExpressionAsWord), cfg);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("'expr-word'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'char'"), std::string::npos) << msg;
    }
    cfg.strategy = Strategy::ExpressionAsWord;
    cfg.method = Method::PvDbow;
    EXPECT_THROW(evaluate(c, tfidf_for(c, Strategy::ExpressionAsWord), cfg), ConfigError);
}

TEST(Evaluate, ReportJson) {
    const Corpus& c = fixture::corpus();
    json j = to_json(evaluate(c, tfidf_for(c), {}));
    EXPECT_EQ(j.at("config").at("method"), "tfidf");
    EXPECT_EQ(j.at("config").at("category_filter"), nullptr);
    EXPECT_TRUE(j.at("map").is_number());
    EXPECT_EQ(j.at("per_query").size(), j.at("num_queries").get<std::size_t>());
}

TEST(External, MatchesOracleScores) {
    std::mt19937_64 rng(13);
    for (int t = 0; t < 20; ++t) {
        Corpus c(oracle::random_corpus(rng, 25));
        oracle::DenseTfIdf dense = dense_for(c);
        ScoreTable table;
        for (const Entry& a : c.entries())
            for (const Entry& b : c.entries()) table[a.id][b.id] = dense.cosine(a.id, b.id);
        double expect = oracle::map_bruteforce(c.entries(), dense, 1);
        if (expect == 0.0) continue;
        EXPECT_NEAR(evaluate_external(c, table, {}).map_score, expect, 1e-12);
    }
}

TEST(External, MissingCandidatesRankLastAndUnscoredQueriesReported) {
    const Corpus& c = fixture::corpus();
    QuerySet qs = make_queries(c, build_graph(c), {});
    ScoreTable table;
    const Query& first = qs.queries.front();
    table[first.id][first.gold.front()] = 0.5;
    EvaluationReport r = evaluate_external(c, table, {});
    EXPECT_EQ(r.num_queries, 1u);
    EXPECT_EQ(r.unscored_queries.size(), qs.queries.size() - 1);
    // the scored gold item first, then every other candidate tied at -inf in id order
    std::vector<std::string> ranking{first.gold.front()};
    for (const EntryId& id : qs.candidates)
        if (id != first.id && id != first.gold.front()) ranking.push_back(id);
    EXPECT_NEAR(r.map_score, oracle::average_precision(ranking, {first.gold.begin(), first.gold.end()}), 1e-15);
    EXPECT_EQ(r.config.method, Method::ExternalScores);
    EXPECT_THROW(evaluate_external(c, {}, {}), ConfigError);
}

TEST(External, AppendingLowScoredCandidatesKeepsMap) {
    const Corpus& base = fixture::corpus();
    oracle::DenseTfIdf dense = dense_for(base);
    ScoreTable table;
    for (const Entry& a : base.entries())
        for (const Entry& b : base.entries()) table[a.id][b.id] = dense.cosine(a.id, b.id);
    double before = evaluate_external(base, table, {}).map_score;

    std::vector<Entry> entries = base.entries();
    for (int i = 0; i < 5; ++i) {
        Entry e;
        e.id = "definition:extra_" + std::to_string(i);
        e.kind = EntryKind::Definition;
        e.title = e.id;
        e.statement_text = "unrelated";
        entries.push_back(e);
        for (auto& [q, row] : table) row[e.id] = -1.0 - i;
    }
    EXPECT_EQ(evaluate_external(Corpus(entries), table, {}).map_score, before);
}

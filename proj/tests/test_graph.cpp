#include <gtest/gtest.h>

#include <random>

#include "fixture.hpp"
#include "nlps/graph.hpp"
#include "nlps/stats.hpp"
#include "oracles.hpp"

using namespace nlps;
using Ids = std::vector<EntryId>;

namespace {

Entry entry(std::string id, EntryKind kind, IdSet defs = {}, IdSet props = {}) {
    Entry e;
    e.id = std::move(id);
    e.kind = kind;
    e.supporting_definitions = std::move(defs);
    if (kind != EntryKind::Definition) e.proofs.push_back({"p", std::move(props)});
    return e;
}

PremiseGraph random_digraph(std::mt19937_64& rng, std::size_t n, double p, oracle::Adjacency& adj) {
    adj.assign(n, std::vector<bool>(n, false));
    std::vector<PremiseGraph::Edge> edges;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && u(rng) < p) {
                adj[i][j] = true;
                edges.emplace_back("n" + std::to_string(100 + i), "n" + std::to_string(100 + j));
            }
    return PremiseGraph(edges);
}

}  // namespace

TEST(Graph, DirectConstruction) {
    Corpus c({entry("t1", EntryKind::Theorem, {"d1"}, {"t2"}), entry("t2", EntryKind::Theorem, {"d1"}),
              entry("d1", EntryKind::Definition)});
    PremiseGraph g = build_graph(c);
    EXPECT_EQ(g.nodes(), (Ids{"d1", "t1", "t2"}));
    EXPECT_EQ(g.edge_count(), 3u);
    EXPECT_EQ(g.edges().front(), (PremiseGraph::Edge{"t1", "d1"}));
}

TEST(Graph, DisconnectedEntryIsNotANode) {
    Corpus c({entry("t1", EntryKind::Theorem, {"d1"}), entry("d1", EntryKind::Definition),
              entry("d9", EntryKind::Definition)});
    EXPECT_FALSE(build_graph(c).contains("d9"));
}

TEST(Graph, FixtureNodesAndEdges) {
    PremiseGraph g = build_graph(fixture::corpus());
    EXPECT_EQ(g.node_count(), 10u);
    EXPECT_EQ(g.edge_count(), 14u);
    EXPECT_FALSE(g.contains("definition:set"));
    EXPECT_FALSE(g.contains("infinitude_of_primes"));
}

TEST(Graph, IndependentOfInputOrder) {
    std::vector<Entry> entries = fixture::corpus().entries();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(entries.begin(), entries.end(), rng);
        EXPECT_EQ(build_graph(Corpus(entries)).edges(), build_graph(fixture::corpus()).edges());
    }
}

TEST(Graph, NoSelfLoops) {
    PremiseGraph g(std::vector<PremiseGraph::Edge>{{"a", "a"}, {"a", "b"}, {"a", "b"}});
    EXPECT_EQ(g.edge_count(), 1u);
}

TEST(KHop, TwoHopChain) {
    Corpus c({entry("t1", EntryKind::Theorem, {}, {"t2"}), entry("t2", EntryKind::Theorem, {"d1"}),
              entry("d1", EntryKind::Definition)});
    PremiseGraph g = build_graph(c);
    EXPECT_EQ(k_hop_premises(g, "t1", 1), Ids{"t2"});
    EXPECT_EQ(k_hop_premises(g, "t1", 2), (Ids{"d1", "t2"}));
}

TEST(KHop, OneHopIsDirectPremises) {
    const Corpus& c = fixture::corpus();
    PremiseGraph g = build_graph(c);
    for (const EntryId& id : g.nodes()) {
        IdSet direct = premise_set(c.at(id));
        EXPECT_EQ(k_hop_premises(g, id, 1), Ids(direct.begin(), direct.end())) << id;
    }
}

TEST(KHop, Errors) {
    PremiseGraph g(std::vector<PremiseGraph::Edge>{{"a", "b"}});
    EXPECT_THROW(k_hop_premises(g, "zz", 1), LookupError);
    EXPECT_THROW(k_hop_premises(g, "a", 0), ConfigError);
}

TEST(KHop, MatchesOracleOnRandomDags) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        oracle::Adjacency adj;
        std::size_t n = 50;
        // upper-triangular edges only: a DAG
        PremiseGraph full = random_digraph(rng, n, 0.08, adj);
        std::vector<PremiseGraph::Edge> dag_edges;
        for (auto& [a, b] : full.edges())
            if (a < b) dag_edges.emplace_back(a, b);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) adj[i][j] = false;
        PremiseGraph g(dag_edges);
        for (std::size_t i = 0; i < n; ++i) {
            std::string id = "n" + std::to_string(100 + i);
            if (!g.contains(id)) continue;
            Ids expect;
            for (std::size_t v : oracle::reachable_within(adj, i, 3)) expect.push_back("n" + std::to_string(100 + v));
            EXPECT_EQ(k_hop_premises(g, id, 3), expect);
        }
    }
}

TEST(KHop, MonotoneAndReachesClosure) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        oracle::Adjacency adj;
        PremiseGraph g = random_digraph(rng, 30, 0.06, adj);
        for (const EntryId& id : g.nodes()) {
            Ids prev;
            for (std::size_t k = 1; k <= g.node_count() + 1; ++k) {
                Ids cur = k_hop_premises(g, id, k);
                EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
                prev = std::move(cur);
            }
            std::size_t i = std::stoul(id.substr(1)) - 100;
            Ids closure;
            for (std::size_t v : oracle::reachable_within(adj, i, adj.size())) closure.push_back("n" + std::to_string(100 + v));
            EXPECT_EQ(prev, closure);
        }
    }
}

TEST(Cycles, Reported) {
    PremiseGraph g(std::vector<PremiseGraph::Edge>{{"a", "b"}, {"b", "c"}, {"c", "a"}, {"c", "d"}, {"e", "f"}, {"f", "e"}});
    EXPECT_EQ(find_cycles(g), (std::vector<Ids>{{"a", "b", "c"}, {"e", "f"}}));
    EXPECT_EQ(k_hop_premises(g, "a", 10), (Ids{"b", "c", "d"}));
}

TEST(Cycles, FixtureIsAcyclic) { EXPECT_TRUE(find_cycles(build_graph(fixture::corpus())).empty()); }

TEST(Stats, FixtureHandCounted) {
    const Corpus& c = fixture::corpus();
    GraphStats s = compute_stats(c, build_graph(c));
    EXPECT_EQ(s.counts_by_kind.at(EntryKind::Definition), 4u);
    EXPECT_EQ(s.counts_by_kind.at(EntryKind::Theorem), 6u);
    EXPECT_EQ(s.counts_by_kind.at(EntryKind::Lemma), 1u);
    EXPECT_EQ(s.counts_by_kind.at(EntryKind::Corollary), 1u);
    EXPECT_EQ(s.total_entries, 12u);
    EXPECT_EQ(s.node_count, 10u);
    EXPECT_EQ(s.edge_count, 14u);
    EXPECT_EQ(s.premise_count_histogram, (std::map<std::size_t, std::size_t>{{1, 3}, {2, 4}, {3, 1}}));
    EXPECT_EQ(s.dependant_count_histogram, (std::map<std::size_t, std::size_t>{{1, 4}, {2, 1}, {3, 1}, {5, 1}}));
    EXPECT_EQ(s.entries_with_1_to_5_premises, 8u);
    EXPECT_EQ(s.entries_with_1_to_3_dependants, 6u);
    EXPECT_EQ(s.max_premise_entry, (std::pair<EntryId, std::size_t>{"division_theorem", 3}));
}

TEST(Stats, AverageSymbolsCountsScalars) {
    Entry a = entry("a", EntryKind::Definition);
    a.statement_text = "$x≤y$";  // 5 scalars, 7 bytes
    Entry b = entry("b", EntryKind::Definition);
    b.statement_text = "abc";
    Corpus c({a, b});
    EXPECT_DOUBLE_EQ(compute_stats(c, build_graph(c)).avg_symbols_per_statement, 4.0);
}

TEST(Stats, SingleEntryWithFivePremises) {
    std::vector<Entry> es{entry("t", EntryKind::Theorem, {"d1", "d2", "d3"}, {"u1", "u2"})};
    for (const char* d : {"d1", "d2", "d3"}) es.push_back(entry(d, EntryKind::Definition));
    for (const char* u : {"u1", "u2"}) es.push_back(entry(u, EntryKind::Theorem));
    Corpus c(es);
    EXPECT_EQ(compute_stats(c, build_graph(c)).premise_count_histogram, (std::map<std::size_t, std::size_t>{{5, 1}}));
}

TEST(Stats, HistogramsSumToNodesWithEdges) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 20; ++t) {
        Corpus c(oracle::random_corpus(rng, 20));
        PremiseGraph g = build_graph(c);
        GraphStats s = compute_stats(c, g);
        std::size_t with_premises = 0, with_dependants = 0;
        for (std::size_t v = 0; v < g.node_count(); ++v) {
            with_premises += g.out_degree(v) > 0;
            with_dependants += g.in_degree(v) > 0;
        }
        EXPECT_EQ(histogram_range(s.premise_count_histogram, 0, SIZE_MAX), with_premises);
        EXPECT_EQ(histogram_range(s.dependant_count_histogram, 0, SIZE_MAX), with_dependants);
    }
}

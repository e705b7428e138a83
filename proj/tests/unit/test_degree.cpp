#include <gtest/gtest.h>

#include <fstream>
#include <map>

#include "credigraph/degree.hpp"
#include "credigraph/errors.hpp"
#include "oracles.hpp"

using namespace credigraph;

namespace {

using EdgeList = std::vector<std::pair<std::uint64_t, std::uint64_t>>;

void write(const std::filesystem::path& p, const EdgeList& edges) {
    std::vector<Edge> e;
    for (const auto& [a, b] : edges) e.push_back({a, b});
    write_edges(p, e);
}

EdgeList as_pairs(const std::vector<Edge>& edges) {
    EdgeList out;
    for (const auto& e : edges) out.emplace_back(e.src, e.dst);
    return out;
}

}  // namespace

TEST(Degrees, Triangle) {
    oracle::TempDir dir;
    write(dir / "e", {{0, 1}, {1, 2}, {2, 0}});
    const auto t = compute_degrees(dir / "e", 3, dir / "d");
    for (NodeId v = 0; v < 3; ++v) {
        EXPECT_EQ(t.total(v), 2u);
        EXPECT_EQ(t.in()[v], 1u);
        EXPECT_EQ(t.out()[v], 1u);
    }
}

TEST(Degrees, EmptyEdgeList) {
    oracle::TempDir dir;
    write(dir / "e", {});
    const auto t = compute_degrees(dir / "e", 4, dir / "d");
    for (NodeId v = 0; v < 4; ++v) EXPECT_EQ(t.total(v), 0u);
}

TEST(Degrees, RandomGraphMatchesCounter) {
    oracle::TempDir dir;
    const auto edges = oracle::random_graph(17, 1000, 5000);
    write(dir / "e", edges);
    compute_degrees(dir / "e", 1000, dir / "d");
    const auto t = DegreeTable::open(dir / "d");
    std::map<std::uint64_t, std::uint32_t> in, out;
    for (const auto& [a, b] : edges) {
        ++out[a];
        ++in[b];
    }
    ASSERT_EQ(t.size(), 1000u);
    for (NodeId v = 0; v < 1000; ++v) {
        EXPECT_EQ(t.in()[v], in[v]);
        EXPECT_EQ(t.out()[v], out[v]);
    }
}

TEST(Degrees, OutOfRangeIdReportsOffset) {
    oracle::TempDir dir;
    write(dir / "e", {{0, 1}, {1, 2}, {2, 9}});
    try {
        compute_degrees(dir / "e", 3, dir / "d");
        FAIL() << "expected CorruptInputError";
    } catch (const CorruptInputError& e) {
        EXPECT_EQ(e.offset(), 16u + 2 * 16u);
    }
}

TEST(Degrees, BadMagic) {
    oracle::TempDir dir;
    std::ofstream(dir / "d") << "NOTADEG1 and some bytes";
    EXPECT_THROW(DegreeTable::open(dir / "d"), FormatError);
}

TEST(Filter, StarLeavesCenterIsolated) {
    oracle::TempDir dir;
    write(dir / "e", {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {5, 0}});
    const auto t = compute_degrees(dir / "e", 6, dir / "d");
    const auto g = filter_by_degree(dir / "e", t, 3, {.edges = dir / "f"});
    EXPECT_EQ(g.node_count(), 1u);
    EXPECT_TRUE(g.survivors.contains(0));
    EXPECT_EQ(g.edge_count, 0u);
    EXPECT_TRUE(read_all_edges(dir / "f").empty());
}

TEST(Filter, ThresholdZeroDropsIsolated) {
    oracle::TempDir dir;
    write(dir / "e", {{0, 1}, {1, 2}});
    const auto t = compute_degrees(dir / "e", 4, dir / "d");
    const auto g = filter_by_degree(dir / "e", t, 0, {.edges = dir / "f"});
    EXPECT_EQ(g.node_count(), 3u);
    EXPECT_FALSE(g.survivors.contains(3));
    EXPECT_EQ(g.edge_count, 2u);
}

TEST(Filter, InclusiveComparison) {
    oracle::TempDir dir;
    write(dir / "e", {{0, 1}, {1, 2}});
    const auto t = compute_degrees(dir / "e", 3, dir / "d");
    EXPECT_EQ(filter_by_degree(dir / "e", t, 2, {.edges = dir / "f"}).node_count(), 0u);
    EXPECT_EQ(filter_by_degree(dir / "e", t, 2, {.edges = dir / "f"}, DegreeComparison::kGreaterEqual).node_count(), 1u);
}

TEST(Filter, RandomGraphMatchesOracle) {
    oracle::TempDir dir;
    const auto edges = oracle::random_graph(23, 500, 3000);
    write(dir / "e", edges);
    const auto t = compute_degrees(dir / "e", 500, dir / "d");
    const auto g = filter_by_degree(dir / "e", t, 3, {.edges = dir / "f", .compact_map = dir / "map.tsv"});
    const auto truth = oracle::filter(500, edges, 3);
    std::vector<std::uint64_t> survivors;
    for (NodeId v = 0; v < 500; ++v) {
        if (g.survivors.contains(v)) {
            EXPECT_EQ(g.compact_id(v), survivors.size());
            survivors.push_back(v);
        }
    }
    EXPECT_EQ(survivors, truth.survivors);
    EXPECT_EQ(as_pairs(read_all_edges(dir / "f")), truth.edges);
    std::ifstream map(dir / "map.tsv");
    std::uint64_t raw, compact, rows = 0;
    while (map >> raw >> compact) {
        EXPECT_EQ(truth.survivors.at(compact), raw);
        ++rows;
    }
    EXPECT_EQ(rows, truth.survivors.size());
}

TEST(Filter, MonotoneInThreshold) {
    oracle::TempDir dir;
    const auto edges = oracle::random_graph(31, 300, 900);
    write(dir / "e", edges);
    const auto t = compute_degrees(dir / "e", 300, dir / "d");
    std::uint64_t prev_nodes = UINT64_MAX, prev_edges = UINT64_MAX;
    for (int k = 0; k <= 6; ++k) {
        const auto g = filter_by_degree(dir / "e", t, k, {.edges = dir / "f"});
        EXPECT_LE(g.node_count(), prev_nodes);
        EXPECT_LE(g.edge_count, prev_edges);
        prev_nodes = g.node_count();
        prev_edges = g.edge_count;
    }
}

TEST(Filter, NegativeThresholdRejected) {
    oracle::TempDir dir;
    write(dir / "e", {{0, 1}});
    const auto t = compute_degrees(dir / "e", 2, dir / "d");
    EXPECT_THROW(filter_by_degree(dir / "e", t, -1, {.edges = dir / "f"}), ParameterError);
}

TEST(Filter, DictionaryProjection) {
    oracle::TempDir dir;
    NodeDictionary({"a.x", "b.x", "c.x", "d.x"}).save(dir / "in.dict");
    write(dir / "e", {{0, 1}, {1, 0}, {2, 1}, {0, 2}});
    const auto t = compute_degrees(dir / "e", 4, dir / "d");
    filter_by_degree(dir / "e", t, 2, {.edges = dir / "f", .dictionary_in = dir / "in.dict", .dictionary_out = dir / "out.dict"});
    EXPECT_EQ(NodeDictionary::load(dir / "out.dict").keys(), (std::vector<std::string>{"a.x", "b.x"}));
}

TEST(Retention, TableValues) {
    const auto r = filter_report({132'547'562, 1'124'576'420}, {45'041'648, 1'014'523'552});
    EXPECT_EQ(r.edge_text(), "90.21");
    EXPECT_EQ(r.node_text(), "33.98");
    const auto same = filter_report({10, 20}, {10, 20});
    EXPECT_EQ(same.edge_text(), "100.00");
    EXPECT_EQ(same.node_text(), "100.00");
    const auto hand = filter_report({8, 40}, {3, 7});
    EXPECT_DOUBLE_EQ(hand.node_retention_pct, 37.5);
    EXPECT_DOUBLE_EQ(hand.edge_retention_pct, 17.5);
    EXPECT_THROW(filter_report({0, 0}, {0, 0}), DataError);
}

TEST(SurvivorSet, RankAcrossWords) {
    SurvivorSet s(200);
    for (NodeId v : {0, 63, 64, 130, 199}) s.set(v);
    s.build_rank();
    EXPECT_EQ(s.count(), 5u);
    EXPECT_EQ(s.rank(0), 0u);
    EXPECT_EQ(s.rank(64), 2u);
    EXPECT_EQ(s.rank(199), 4u);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "../support/oracles.hpp"
#include "../support/synthetic.hpp"
#include "herdscan/community.hpp"
#include "herdscan/error.hpp"

using namespace herdscan;

namespace {

WeightedGraph from_edges(std::size_t n, std::vector<std::pair<std::size_t, std::size_t>> edges) {
  WeightedGraph g(n);
  for (auto [u, v] : edges) g.add_edge(u, v, 1.0);
  return g;
}

WeightedGraph barbell() { return from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}}); }

WeightedGraph two_cliques() {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t base : {0u, 4u})
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) e.push_back({base + i, base + j});
  e.push_back({3, 4});
  return from_edges(8, e);
}

oracle::Dense dense(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  oracle::Dense a{n, n, std::vector<double>(n * n, 0.0)};
  for (std::size_t u = 0; u < n; ++u) {
    for (const auto& nb : g.neighbors(u)) a(u, nb.node) += nb.weight;
    a(u, u) += g.self_loop(u);
  }
  return a;
}

void expect_levels_monotone(const LouvainResult& r, double m) {
  double previous = -1.0;
  for (const auto& l : r.levels) {
    EXPECT_GE(l.modularity_after, l.modularity_before - 1e-12);
    EXPECT_GE(l.modularity_before, previous - 1e-12);
    EXPECT_NEAR(l.total_weight, m, 1e-12);
    previous = l.modularity_after;
  }
}

}  // namespace

TEST(Modularity, HandExamples) {
  const auto edge = from_edges(2, {{0, 1}});
  const std::vector<std::size_t> split{0, 1}, merged{0, 0};
  EXPECT_DOUBLE_EQ(modularity(edge, split), -0.5);
  EXPECT_DOUBLE_EQ(modularity(edge, merged), 0.0);

  const auto triangles = from_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  const std::vector<std::size_t> natural{0, 0, 0, 1, 1, 1}, one(6, 0);
  EXPECT_DOUBLE_EQ(modularity(triangles, natural), 0.5);
  EXPECT_EQ(modularity(triangles, one), 0.0);
}

TEST(Modularity, MatchesPairwiseDefinition) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = synth::random_connected_graph(rng, 9, 0.3, false);
    if (trial % 3 == 0) g.add_self_loop(trial % 9, 0.7);
    std::vector<std::size_t> a(9);
    for (auto& x : a) x = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    EXPECT_NEAR(modularity(g, a), oracle::modularity(dense(g), a), 1e-12);
  }
}

TEST(Modularity, UncoveredNode) {
  const auto g = barbell();
  const std::vector<std::size_t> short_assignment{0, 0, 0};
  try {
    modularity(g, short_assignment);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UncoveredNode);
  }
}

TEST(DeltaQ, SignExamples) {
  const auto g = barbell();
  const std::vector<std::size_t> natural{0, 0, 0, 1, 1, 1};
  CommunityState state(g, natural);
  state.isolate(0);
  EXPECT_GT(delta_q(g, 0, 0, state), 0.0);
  EXPECT_LT(delta_q(g, 0, 1, state), 0.0);
}

TEST(DeltaQ, AgreesWithFullRecomputation) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = synth::random_connected_graph(rng, 8, 0.25, trial % 2 == 0);
    if (trial % 4 == 0) g.add_self_loop(2, 1.5);
    std::vector<std::size_t> a(8);
    for (auto& x : a) x = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    CommunityState state(g, a);
    const std::size_t node = trial % 8;
    state.isolate(node);
    const double before = state.modularity();
    for (std::size_t c = 0; c < 3; ++c) {
      bool nonempty = false;
      for (std::size_t v = 0; v < 8; ++v) nonempty |= v != node && state.community_of(v) == c;
      if (!nonempty) continue;
      const double gain = delta_q(g, node, c, state);
      auto moved = state.assignment();
      moved[node] = c;
      EXPECT_NEAR(oracle::modularity(dense(g), moved) - before, gain, 1e-9);
    }
  }
}

TEST(DeltaQ, BarbellCrossMovesLose) {
  const auto g = barbell();
  const std::vector<std::size_t> natural{0, 0, 0, 1, 1, 1};
  const double q = modularity(g, natural);
  for (std::size_t v = 0; v < 6; ++v) {
    auto moved = natural;
    moved[v] = 1 - natural[v];
    EXPECT_LT(modularity(g, moved), q);
    CommunityState state(g, natural);
    state.isolate(v);
    EXPECT_LT(delta_q(g, v, 1 - natural[v], state), 0.0);
  }
}

TEST(LocalMove, BarbellFindsTriangles) {
  const auto g = barbell();
  const auto r = local_move_phase(g, singleton_partition(g));
  EXPECT_EQ(r.partition.assignment, (std::vector<std::size_t>{0, 0, 0, 1, 1, 1}));
  EXPECT_NEAR(r.partition.modularity, oracle::best_modularity(dense(g)).q, 1e-12);
}

TEST(LocalMove, FixedPointTakesOneSweep) {
  const auto g = barbell();
  const auto start = make_partition(g, std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  const auto r = local_move_phase(g, start);
  EXPECT_EQ(r.sweeps, 1u);
  EXPECT_EQ(r.partition.assignment, start.assignment);
}

TEST(LocalMove, SingleEdgeMerges) {
  const auto g = from_edges(2, {{0, 1}});
  CommunityState state(g, std::vector<std::size_t>{0, 1});
  state.isolate(0);
  EXPECT_DOUBLE_EQ(delta_q(g, 0, 1, state), 0.5);
  const auto r = local_move_phase(g, singleton_partition(g));
  EXPECT_EQ(r.partition.community_count, 1u);
  EXPECT_GE(r.partition.modularity, singleton_partition(g).modularity);
}

TEST(Aggregate, Examples) {
  const auto g = barbell();
  const auto id = aggregate(g, singleton_partition(g));
  ASSERT_EQ(id.node_count(), 6u);
  for (std::size_t u = 0; u < 6; ++u) {
    EXPECT_EQ(id.self_loop(u), 0.0);
    EXPECT_EQ(id.degree(u), g.degree(u));
  }

  const auto tri = make_partition(g, std::vector<std::size_t>{0, 0, 0, 1, 1, 1});
  const auto agg = aggregate(g, tri);
  ASSERT_EQ(agg.node_count(), 2u);
  EXPECT_EQ(agg.self_loop(0), 6.0);
  EXPECT_EQ(agg.self_loop(1), 6.0);
  ASSERT_EQ(agg.neighbors(0).size(), 1u);
  EXPECT_EQ(agg.neighbors(0)[0].weight, 1.0);
  EXPECT_NEAR(singleton_partition(agg).modularity, tri.modularity, 1e-12);
  EXPECT_EQ(agg.total_weight(), g.total_weight());

  const auto all = aggregate(g, make_partition(g, std::vector<std::size_t>(6, 0)));
  ASSERT_EQ(all.node_count(), 1u);
  EXPECT_EQ(all.self_loop(0), 2.0 * g.total_weight());
  EXPECT_TRUE(all.neighbors(0).empty());
}

TEST(Aggregate, PreservesWeightAndModularity) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = synth::random_connected_graph(rng, 12, 0.2, false);
    std::vector<std::size_t> a(12);
    for (auto& x : a) x = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    const auto p = make_partition(g, a);
    const auto agg = aggregate(g, p);
    EXPECT_NEAR(agg.total_weight(), g.total_weight(), 1e-12);
    EXPECT_NEAR(singleton_partition(agg).modularity, p.modularity, 1e-9);
  }
}

TEST(Louvain, TwoCliquesAndBarbell) {
  for (const auto& g : {two_cliques(), barbell()}) {
    const auto r = louvain(g);
    const auto best = oracle::best_modularity(dense(g));
    EXPECT_NEAR(r.partition.modularity, best.q, 1e-12);
    EXPECT_EQ(r.partition.assignment, normalize_assignment(best.assignment));
    EXPECT_EQ(r.partition.community_count, 2u);
    expect_levels_monotone(r, g.total_weight());
  }
}

TEST(Louvain, TwoNodeTreeIsOneCommunity) {
  const auto r = louvain(from_edges(2, {{0, 1}}));
  EXPECT_EQ(r.partition.community_count, 1u);
  EXPECT_EQ(r.partition.modularity, 0.0);
}

TEST(Louvain, RingOfSixReachesOptimum) {
  const auto g = from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}});
  const auto r = louvain(g);
  EXPECT_NEAR(r.partition.modularity, oracle::best_modularity(dense(g)).q, 1e-9);
}

TEST(Louvain, NearOptimalOnRandomGraphs) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + trial % 6;
    const auto g = synth::random_connected_graph(rng, n, 0.3, trial % 2 == 0);
    const auto r = louvain(g);
    const auto best = oracle::best_modularity(dense(g));
    EXPECT_GE(r.partition.modularity, 0.98 * best.q - 1e-12) << "trial " << trial;
    EXPECT_NEAR(r.partition.modularity, modularity(g, r.partition.assignment), 1e-9);
    EXPECT_GE(r.partition.modularity, singleton_partition(g).modularity - 1e-12);
    EXPECT_GE(r.partition.modularity, -1e-12);
    expect_levels_monotone(r, g.total_weight());
  }
}

TEST(Louvain, PermutationInvariance) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 10;
    const auto g = synth::random_connected_graph(rng, n, 0.2, false);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    // h has node perm[u] where g has u; relabelling sweeps h in g's order
    // only when nodes are re-sorted, so compare through the inverse map.
    WeightedGraph h(n);
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& nb : g.neighbors(u))
        if (u < nb.node) h.add_edge(perm[u], perm[nb.node], nb.weight);
    std::vector<std::size_t> inverse(n);
    for (std::size_t u = 0; u < n; ++u) inverse[perm[u]] = u;
    WeightedGraph back(n);
    for (std::size_t u = 0; u < n; ++u)
      for (const auto& nb : h.neighbors(u))
        if (u < nb.node) back.add_edge(inverse[u], inverse[nb.node], nb.weight);
    EXPECT_EQ(louvain(g).partition.assignment, louvain(back).partition.assignment);
    EXPECT_NEAR(louvain(g).partition.modularity, louvain(h).partition.modularity, 0.05);
  }
}

TEST(Louvain, SimilarityWeightsFromTree) {
  SpanningTree tree;
  tree.nodes = {"A", "B", "C"};
  tree.edges = {{0, 1, 0.5}, {1, 2, 1.5}};
  const auto unit = graph_from_tree(tree);
  EXPECT_EQ(unit.total_weight(), 2.0);
  const auto sim = graph_from_tree(tree, EdgeWeighting::Similarity);
  EXPECT_DOUBLE_EQ(sim.total_weight(), 1.5 + 0.5);
  EXPECT_EQ(sim.labels, tree.nodes);
}

TEST(Partition, NormalizeAndCommunities) {
  const std::vector<std::size_t> raw{7, 3, 7, 9, 3};
  EXPECT_EQ(normalize_assignment(raw), (std::vector<std::size_t>{0, 1, 0, 2, 1}));
  Partition p;
  p.assignment = {0, 1, 0, 2, 1};
  p.community_count = 3;
  const auto c = p.communities();
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(c[2], (std::vector<std::size_t>{3}));
}

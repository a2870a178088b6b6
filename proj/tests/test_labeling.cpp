#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>
#include <set>

#include "lgcf/errors.hpp"
#include "lgcf/labeling.hpp"
#include "oracles.hpp"

using namespace lgcf;

namespace {

// Localized graph over the given global nodes (targets first) with explicit
// position edges.
LocalizedGraph make_lg(std::vector<NodeId> nodes, std::vector<char> is_user,
                       const std::vector<std::pair<int, int>>& edges) {
  LocalizedGraph lg;
  lg.nodes = std::move(nodes);
  lg.is_user = std::move(is_user);
  lg.user = lg.nodes[0];
  lg.item = lg.nodes[1];
  const std::size_t k = lg.size();
  lg.adj.assign(k * k, 0);
  for (auto [p, q] : edges) lg.adj[p * k + q] = lg.adj[q * k + p] = 1;
  return lg;
}

}  // namespace

TEST(MinDistances, PathGraph) {
  // u - i - u' - i'
  const auto lg = make_lg({0, 2, 1, 3}, {1, 0, 1, 0}, {{0, 1}, {1, 2}, {2, 3}});
  EXPECT_EQ(min_distances(lg, 0), (std::vector<int>{0, 1, 2, 3}));
}

TEST(MinDistances, IsolatedNodeUnreachable) {
  const auto lg = make_lg({0, 2, 1}, {1, 0, 1}, {{0, 1}});
  EXPECT_EQ(min_distances(lg, 0)[2], kUnreachable);
  EXPECT_EQ(min_distances(lg, 2)[0], kUnreachable);
}

TEST(MinDistances, MatchesFloydWarshall) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 60, m = 1 + rng() % 60;
    const auto edges = oracle::random_edges(n, m, 0.05, rng);
    const auto g = build_graph(edges, n, m);
    std::vector<NodeId> all(n + m);
    std::iota(all.begin(), all.end(), 0);
    const auto lg = induce_subgraph(g, all, 0, static_cast<NodeId>(n), rng() % 2);
    const auto d = oracle::floyd_warshall(oracle::adjacency_of(lg));
    for (std::size_t s = 0; s < lg.size(); s += 7) {
      const auto got = min_distances(lg, s);
      for (std::size_t x = 0; x < lg.size(); ++x) {
        EXPECT_EQ(got[x], d[s][x] >= oracle::kInf ? kUnreachable : d[s][x]);
      }
    }
  }
}

TEST(DrnlLabel, Examples) {
  EXPECT_EQ(drnl_label(0, 3), 1);
  EXPECT_EQ(drnl_label(2, 0), 1);
  EXPECT_EQ(drnl_label(1, 2), 3);
  EXPECT_EQ(drnl_label(1, 4), 6);
  EXPECT_EQ(drnl_label(2, 3), 7);
  EXPECT_EQ(drnl_label(1, kUnreachable), 0);
  EXPECT_EQ(drnl_label(kUnreachable, 1), 0);
  for (int du = 1; du <= 20; ++du) {
    for (int di = 1; di <= 20; ++di) EXPECT_GT(drnl_label(du, di), 0);
  }
}

TEST(DrnlLabel, PerfectHashOnOddSums) {
  // For odd d = du + di the label equals the original hash 1 + min + q^2
  // where q = d / 2, and distinct (min, d) pairs never collide.
  std::map<int, std::pair<int, int>> seen;
  for (int d = 1; d <= 9; d += 2) {
    for (int du = 1; du < d; ++du) {
      const int di = d - du;
      const int q = d / 2;
      EXPECT_EQ(drnl_label(du, di), 1 + std::min(du, di) + q * (q + d % 2 - 1));
      const auto key = std::make_pair(std::min(du, di), d);
      const auto [it, fresh] = seen.emplace(drnl_label(du, di), key);
      if (!fresh) EXPECT_EQ(it->second, key);
    }
  }
}

TEST(DrnlLabel, OrderingByEnumeration) {
  struct Pair { int du, di; };
  std::vector<Pair> all;
  for (int du = 1; du <= 14; ++du) {
    for (int di = 1; du + di <= 15; ++di) all.push_back({du, di});
  }
  for (const auto& x : all) {
    for (const auto& y : all) {
      const int dx = x.du + x.di, dy = y.du + y.di;
      const int lx = drnl_label(x.du, x.di), ly = drnl_label(y.du, y.di);
      if (dx < dy) EXPECT_LT(lx, ly);
      if (dx == dy && std::min(x.du, x.di) < std::min(y.du, y.di)) EXPECT_LT(lx, ly);
    }
  }
}

TEST(LabelGraph, TargetsOnly) {
  auto lg = make_lg({0, 1}, {1, 0}, {});
  label_graph(lg);
  EXPECT_EQ(lg.labels, (std::vector<int>{1, 1}));
}

TEST(LabelGraph, SeveredPath) {
  // i' - u - (x) - i - u'   positions: u=0, i=1, i'=2, u'=3
  auto lg = make_lg({0, 3, 2, 1}, {1, 0, 0, 1}, {{0, 2}, {1, 3}});
  label_graph(lg);
  EXPECT_EQ(lg.labels, (std::vector<int>{1, 1, 0, 0}));
}

TEST(LabelGraph, FourCycleWithTargetRemoved) {
  // u - i - u' - i' - u, edge (u, i) removed. positions: u=0, i=1, u'=2, i'=3
  auto lg = make_lg({0, 2, 1, 3}, {1, 0, 1, 0}, {{1, 2}, {2, 3}, {3, 0}});
  label_graph(lg);
  EXPECT_EQ(lg.labels, (std::vector<int>{1, 1, 3, 3}));
}

TEST(LabelGraph, MatchesOracleAndParity) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 25, m = 2 + rng() % 25;
    const auto g = build_graph(oracle::random_edges(n, m, 0.15, rng), n, m);
    std::vector<NodeId> all(n + m);
    std::iota(all.begin(), all.end(), 0);
    const NodeId u = static_cast<NodeId>(rng() % n), i = static_cast<NodeId>(n + rng() % m);
    auto lg = induce_subgraph(g, all, u, i, true);
    label_graph(lg);
    EXPECT_EQ(lg.labels, oracle::drnl_labels(lg));
    // Bipartite graph with the target edge removed: any node reachable from
    // both targets has an odd distance sum.
    const auto du = min_distances(lg, 0), di = min_distances(lg, 1);
    for (std::size_t x = 2; x < lg.size(); ++x) {
      if (du[x] != kUnreachable && di[x] != kUnreachable) EXPECT_EQ((du[x] + di[x]) % 2, 1);
    }
  }
}

TEST(OneHot, Examples) {
  const LabelEncoding enc{4};
  const std::vector<int> labels = {1, 1, 0, 999};
  const auto x = one_hot_features(labels, enc);
  ASSERT_EQ(x.rows(), 4u);
  ASSERT_EQ(x.cols(), 4u);
  EXPECT_EQ(x.row(0)[1], 1.0);
  EXPECT_EQ(x.row(1)[1], 1.0);
  EXPECT_EQ(x.row(2)[0], 1.0);
  EXPECT_EQ(x.row(3)[3], 1.0);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double sum = 0.0;
    for (double v : x.row(r)) sum += v;
    EXPECT_EQ(sum, 1.0);
  }
  const std::vector<int> big = {999};
  EXPECT_EQ(one_hot_features(big, LabelEncoding{}).row(0)[63], 1.0);
  EXPECT_THROW(one_hot_features(big, LabelEncoding{1}), ContractViolation);
}

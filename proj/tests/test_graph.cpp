#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <limits>

#include "netevo/graph.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace netevo;
using testsupport::random_snapshot;

constexpr auto kInf = oracle::kUnreachable;

TEST_CASE("builder canonicalizes pairs and merges duplicates") {
  SnapshotBuilder b(testsupport::semester(1));
  b.add_edge(NodeId{5}, NodeId{2}, {1, 2});
  b.add_edge(NodeId{2}, NodeId{5}, {3, 0});
  b.add_node(NodeId{9});
  const auto s = b.build();
  CHECK(s.node_count() == 3);
  CHECK(s.edge_count() == 1);
  const auto& [pair, w] = *s.edges().begin();
  CHECK(pair.lo == NodeId{2});
  CHECK(pair.hi == NodeId{5});
  CHECK(w == EdgeWeight{4, 2});
  CHECK(s.has_edge(NodeId{5}, NodeId{2}));
  CHECK(s.degree(NodeId{9}) == 0);
  CHECK_THROWS_AS(b.add_edge(NodeId{3}, NodeId{3}), Error);
  CHECK_THROWS(s.index_of(NodeId{42}));
}

TEST_CASE("snapshot invariants hold on random graphs") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_snapshot(rng, 30, 0.15);
    CHECK(std::is_sorted(s.nodes().begin(), s.nodes().end()));
    std::size_t degree_sum = 0;
    for (std::size_t i = 0; i < s.node_count(); ++i) {
      const auto& adj = s.adjacency(i);
      CHECK(std::is_sorted(adj.begin(), adj.end()));
      CHECK(std::adjacent_find(adj.begin(), adj.end()) == adj.end());
      for (auto j : adj) {
        CHECK(j != i);
        const auto& back = s.adjacency(j);
        CHECK(std::binary_search(back.begin(), back.end(), static_cast<std::uint32_t>(i)));
      }
      degree_sum += adj.size();
    }
    CHECK(degree_sum == 2 * s.edge_count());
    for (const auto& [e, w] : s.edges()) CHECK(e.lo < e.hi);
  }
}

TEST_CASE("common neighbors match brute force") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_snapshot(rng, 25, 0.2 + 0.02 * trial);
    for (auto u : s.nodes()) {
      for (auto v : s.nodes()) {
        if (u < v) REQUIRE(common_neighbors(s, u, v) == oracle::common_neighbors(s, u, v));
      }
    }
  }
}

TEST_CASE("hop distances and bounded BFS match Floyd-Warshall") {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = random_snapshot(rng, 30, 0.06);
    const auto d = oracle::all_pairs_hops(s);
    for (std::size_t i = 0; i < s.node_count(); ++i) {
      const auto u = s.nodes()[i];
      for (std::size_t hops : {1u, 2u, 3u}) {
        const auto within = bfs_within(s, u, hops);
        for (std::size_t j = 0; j < s.node_count(); ++j) {
          const bool reached = j != i && d[i][j] <= hops;
          REQUIRE((within[j] != 0) == reached);
          if (reached) REQUIRE(within[j] == d[i][j]);
        }
      }
      CHECK_THROWS(hop_distance(s, u, u));
      for (std::size_t j = 0; j < s.node_count(); ++j) {
        if (j == i) continue;
        const auto hd = hop_distance(s, u, s.nodes()[j]);
        if (d[i][j] == kInf) {
          REQUIRE_FALSE(hd.has_value());
        } else {
          REQUIRE(hd.has_value());
          REQUIRE(*hd == d[i][j]);
        }
      }
    }
  }
}

TEST_CASE("edge classes partition shared pairs") {
  Rng rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_snapshot(rng, 20, 0.2, 1, 0.9);
    const auto t1 = random_snapshot(rng, 20, 0.2, 2, 0.9);
    const auto shared = shared_nodes(t, t1);
    for (auto u : shared) {
      CHECK(t.has_node(u));
      CHECK(t1.has_node(u));
    }
    for (std::size_t a = 0; a < shared.size(); ++a) {
      for (std::size_t b = a + 1; b < shared.size(); ++b) {
        const auto u = shared[a], v = shared[b];
        const auto cls = classify_edge(t, t1, u, v);
        if (t.has_edge(u, v)) {
          CHECK(cls == EdgeClass::Existing);
          const auto p = classify_persistence(t, t1, u, v);
          CHECK((p == PersistenceClass::Persisting) == t1.has_edge(u, v));
        } else {
          CHECK(cls == (t1.has_edge(u, v) ? EdgeClass::ToBeFormed : EdgeClass::NonExisting));
          CHECK_THROWS(classify_persistence(t, t1, u, v));
        }
      }
    }
  }
}

TEST_CASE("departed nodes are never classified") {
  SnapshotBuilder b0(testsupport::semester(1));
  b0.add_edge(NodeId{1}, NodeId{2});
  SnapshotBuilder b1(testsupport::semester(2));
  b1.add_node(NodeId{1});
  const auto t = b0.build(), t1 = b1.build();
  CHECK_THROWS(classify_edge(t, t1, NodeId{1}, NodeId{2}));
  CHECK(shared_nodes(t, t1) == std::vector<NodeId>{NodeId{1}});
}

TEST_CASE("snapshot tables round-trip") {
  Rng rng(15);
  std::vector<Snapshot> snaps;
  std::vector<Semester> sems;
  for (int s = 1; s <= 3; ++s) {
    SnapshotBuilder b(testsupport::semester(s));
    const auto g = random_snapshot(rng, 15, 0.2, s);
    for (auto u : g.nodes()) b.add_node(u);
    std::uint64_t k = 0;
    for (const auto& [e, w] : g.edges()) b.add_edge(e.lo, e.hi, {k % 4, ++k % 7});
    snaps.push_back(b.build());
    sems.push_back(testsupport::semester(s));
  }
  testsupport::TempDir dir("graph_rt");
  write_snapshots(snaps, dir / "edges.csv", dir / "nodes.csv");
  const auto back = read_snapshots(sems, dir / "edges.csv", dir / "nodes.csv");
  REQUIRE(back.size() == snaps.size());
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    CHECK(back[i].nodes() == snaps[i].nodes());
    CHECK(back[i].edges() == snaps[i].edges());
    CHECK(back[i].semester() == snaps[i].semester());
  }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "netevo/core.hpp"

namespace netevo {

/// One study period with an inclusive calendar date range.
struct Semester {
  int index = 0;  // 1-based ordinal
  std::string label;
  Date start;
  Date end;

  bool contains(Timestamp ts) const;
  friend bool operator==(const Semester&, const Semester&) = default;
};

/// Per-edge communication volume; edge existence itself is binary.
struct EdgeWeight {
  std::uint64_t call_count = 0;
  std::uint64_t text_count = 0;

  std::uint64_t total() const { return call_count + text_count; }
  EdgeWeight& operator+=(const EdgeWeight& o) {
    call_count += o.call_count;
    text_count += o.text_count;
    return *this;
  }
  friend bool operator==(const EdgeWeight&, const EdgeWeight&) = default;
};

/// One semester's undirected simple graph. Immutable once built; all
/// queries are const and safe for concurrent readers.
class Snapshot {
 public:
  Snapshot() = default;

  const Semester& semester() const { return semester_; }
  /// Sorted node ids.
  const std::vector<NodeId>& nodes() const { return nodes_; }
  /// Edges in canonical order.
  const std::map<EdgePair, EdgeWeight>& edges() const { return edges_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  bool has_node(NodeId u) const { return index_.contains(u); }
  bool has_edge(NodeId u, NodeId v) const;
  std::optional<EdgeWeight> weight(NodeId u, NodeId v) const;

  /// Sorted neighbor ids; throws on an unknown node.
  std::vector<NodeId> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const;

  /// Dense position of a node in nodes(); throws naming the node if absent.
  std::size_t index_of(NodeId u) const;
  /// Neighbors of the node at dense position i, as sorted dense positions.
  const std::vector<std::uint32_t>& adjacency(std::size_t i) const { return adjacency_[i]; }

 private:
  friend class SnapshotBuilder;

  Semester semester_;
  std::vector<NodeId> nodes_;
  std::unordered_map<NodeId, std::uint32_t> index_;
  std::vector<std::vector<std::uint32_t>> adjacency_;
  std::map<EdgePair, EdgeWeight> edges_;
};

/// Single-writer accumulator for a Snapshot. Repeated insertions of the
/// same unordered pair merge into one edge with summed weights.
class SnapshotBuilder {
 public:
  explicit SnapshotBuilder(Semester semester) : semester_(std::move(semester)) {}

  SnapshotBuilder& add_node(NodeId u);
  /// Adds both endpoints as nodes. Throws on a self-loop.
  SnapshotBuilder& add_edge(NodeId u, NodeId v, EdgeWeight w = {});

  Snapshot build() const;

 private:
  Semester semester_;
  std::set<NodeId> nodes_;
  std::map<EdgePair, EdgeWeight> edges_;
};

enum class EdgeClass : std::uint8_t { Existing, ToBeFormed, NonExisting };
enum class PersistenceClass : std::uint8_t { Persisting, Dissolving };

inline constexpr EdgeClass kEdgeClasses[] = {EdgeClass::Existing, EdgeClass::ToBeFormed,
                                             EdgeClass::NonExisting};
inline constexpr PersistenceClass kPersistenceClasses[] = {PersistenceClass::Persisting,
                                                           PersistenceClass::Dissolving};

std::string to_string(EdgeClass c);
std::string to_string(PersistenceClass c);

/// |N(u) ∩ N(v)|. Requires u != v and both nodes present.
std::size_t common_neighbors(const Snapshot& snap, NodeId u, NodeId v);

/// Shortest-path length by BFS, nullopt when unreachable.
std::optional<std::size_t> hop_distance(const Snapshot& snap, NodeId u, NodeId v);

/// BFS distances from `source` to every node within `max_hops` (source
/// excluded). Indexed by dense position; unreached entries are 0.
std::vector<std::uint32_t> bfs_within(const Snapshot& snap, NodeId source,
                                      std::size_t max_hops);

/// Sorted ids present in both snapshots.
std::vector<NodeId> shared_nodes(const Snapshot& t, const Snapshot& t1);

/// Class of (u, v) across a semester transition. Both nodes must be present
/// in both snapshots; departed nodes are never classified.
EdgeClass classify_edge(const Snapshot& t, const Snapshot& t1, NodeId u, NodeId v);

/// Requires (u, v) to be an edge of `t`.
PersistenceClass classify_persistence(const Snapshot& t, const Snapshot& t1, NodeId u,
                                      NodeId v);

/// Writes `semester,node_u,node_v,call_count,text_count` and
/// `semester,node` tables in (semester, canonical pair) order.
void write_snapshots(const std::vector<Snapshot>& snaps, const std::filesystem::path& edges_csv,
                     const std::filesystem::path& nodes_csv);

/// Reads the two tables back. Semester indices are resolved against
/// `semesters`; one snapshot per listed semester is returned.
std::vector<Snapshot> read_snapshots(const std::vector<Semester>& semesters,
                                     const std::filesystem::path& edges_csv,
                                     const std::filesystem::path& nodes_csv);

}  // namespace netevo

#include "netevo/graph.hpp"

#include <algorithm>
#include <deque>
#include <iterator>

#include <fmt/format.h>

#include "netevo/csv.hpp"

namespace netevo {

bool Semester::contains(Timestamp ts) const {
  const auto first = Timestamp{std::chrono::sys_days{start}};
  const auto past_end = Timestamp{std::chrono::sys_days{end} + std::chrono::days{1}};
  return ts >= first && ts < past_end;
}

std::size_t Snapshot::index_of(NodeId u) const {
  const auto it = index_.find(u);
  if (it == index_.end()) {
    throw Error(fmt::format("node {} is not in the snapshot for semester {}", u.value,
                            semester_.index));
  }
  return it->second;
}

bool Snapshot::has_edge(NodeId u, NodeId v) const {
  return u != v && edges_.contains(make_pair_canonical(u, v));
}

std::optional<EdgeWeight> Snapshot::weight(NodeId u, NodeId v) const {
  if (u == v) return std::nullopt;
  const auto it = edges_.find(make_pair_canonical(u, v));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> Snapshot::neighbors(NodeId u) const {
  const auto& adj = adjacency_[index_of(u)];
  std::vector<NodeId> out;
  out.reserve(adj.size());
  for (const auto j : adj) out.push_back(nodes_[j]);
  return out;
}

std::size_t Snapshot::degree(NodeId u) const { return adjacency_[index_of(u)].size(); }

SnapshotBuilder& SnapshotBuilder::add_node(NodeId u) {
  nodes_.insert(u);
  return *this;
}

SnapshotBuilder& SnapshotBuilder::add_edge(NodeId u, NodeId v, EdgeWeight w) {
  const auto e = make_pair_canonical(u, v);
  nodes_.insert(u);
  nodes_.insert(v);
  edges_[e] += w;
  return *this;
}

Snapshot SnapshotBuilder::build() const {
  Snapshot s;
  s.semester_ = semester_;
  s.nodes_.assign(nodes_.begin(), nodes_.end());
  s.index_.reserve(s.nodes_.size());
  for (std::uint32_t i = 0; i < s.nodes_.size(); ++i) s.index_.emplace(s.nodes_[i], i);
  s.adjacency_.resize(s.nodes_.size());
  for (const auto& [e, w] : edges_) {
    const auto a = s.index_.at(e.lo);
    const auto b = s.index_.at(e.hi);
    s.adjacency_[a].push_back(b);
    s.adjacency_[b].push_back(a);
  }
  for (auto& adj : s.adjacency_) std::sort(adj.begin(), adj.end());
  s.edges_ = edges_;
  return s;
}

std::string to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Existing: return "existing";
    case EdgeClass::ToBeFormed: return "to_be_formed";
    case EdgeClass::NonExisting: return "non_existing";
  }
  return "?";
}

std::string to_string(PersistenceClass c) {
  return c == PersistenceClass::Persisting ? "persisting" : "dissolving";
}

namespace {

void require_distinct(NodeId u, NodeId v) {
  if (u == v) throw Error("query pair must be two distinct nodes, got " + to_string(u) + " twice");
}

}  // namespace

std::size_t common_neighbors(const Snapshot& snap, NodeId u, NodeId v) {
  require_distinct(u, v);
  const auto& a = snap.adjacency(snap.index_of(u));
  const auto& b = snap.adjacency(snap.index_of(v));
  std::size_t count = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

std::vector<std::uint32_t> bfs_within(const Snapshot& snap, NodeId source,
                                      std::size_t max_hops) {
  const auto s = snap.index_of(source);
  std::vector<std::uint32_t> dist(snap.node_count(), 0);
  if (max_hops == 0) return dist;
  std::vector<bool> seen(snap.node_count(), false);
  seen[s] = true;
  std::deque<std::uint32_t> frontier{static_cast<std::uint32_t>(s)};
  while (!frontier.empty()) {
    const auto x = frontier.front();
    frontier.pop_front();
    if (x != s && dist[x] >= max_hops) continue;
    for (const auto y : snap.adjacency(x)) {
      if (seen[y]) continue;
      seen[y] = true;
      dist[y] = dist[x] + 1;
      frontier.push_back(y);
    }
  }
  return dist;
}

std::optional<std::size_t> hop_distance(const Snapshot& snap, NodeId u, NodeId v) {
  require_distinct(u, v);
  const auto target = snap.index_of(v);
  const auto dist = bfs_within(snap, u, snap.node_count());
  if (dist[target] == 0) return std::nullopt;
  return dist[target];
}

std::vector<NodeId> shared_nodes(const Snapshot& t, const Snapshot& t1) {
  std::vector<NodeId> out;
  std::set_intersection(t.nodes().begin(), t.nodes().end(), t1.nodes().begin(),
                        t1.nodes().end(), std::back_inserter(out));
  return out;
}

EdgeClass classify_edge(const Snapshot& t, const Snapshot& t1, NodeId u, NodeId v) {
  require_distinct(u, v);
  for (const auto x : {u, v}) {
    if (!t.has_node(x) || !t1.has_node(x)) {
      throw Error(fmt::format("node {} is not present in both semesters {} and {}", x.value,
                              t.semester().index, t1.semester().index));
    }
  }
  if (t.has_edge(u, v)) return EdgeClass::Existing;
  return t1.has_edge(u, v) ? EdgeClass::ToBeFormed : EdgeClass::NonExisting;
}

PersistenceClass classify_persistence(const Snapshot& t, const Snapshot& t1, NodeId u,
                                      NodeId v) {
  if (!t.has_edge(u, v)) {
    throw Error(fmt::format("({}, {}) is not an edge in semester {}", u.value, v.value,
                            t.semester().index));
  }
  if (!t1.has_node(u) || !t1.has_node(v)) {
    throw Error(fmt::format("edge ({}, {}) has an endpoint that left before semester {}",
                            u.value, v.value, t1.semester().index));
  }
  return t1.has_edge(u, v) ? PersistenceClass::Persisting : PersistenceClass::Dissolving;
}

void write_snapshots(const std::vector<Snapshot>& snaps, const std::filesystem::path& edges_csv,
                     const std::filesystem::path& nodes_csv) {
  auto edges = csv::open_output(edges_csv);
  auto nodes = csv::open_output(nodes_csv);
  edges << "semester,node_u,node_v,call_count,text_count\n";
  nodes << "semester,node\n";
  std::vector<const Snapshot*> ordered;
  for (const auto& s : snaps) ordered.push_back(&s);
  std::stable_sort(ordered.begin(), ordered.end(), [](const Snapshot* a, const Snapshot* b) {
    return a->semester().index < b->semester().index;
  });
  for (const auto* s : ordered) {
    const int sem = s->semester().index;
    for (const auto n : s->nodes()) nodes << sem << ',' << n.value << '\n';
    for (const auto& [e, w] : s->edges()) {
      edges << sem << ',' << e.lo.value << ',' << e.hi.value << ',' << w.call_count << ','
            << w.text_count << '\n';
    }
  }
}

std::vector<Snapshot> read_snapshots(const std::vector<Semester>& semesters,
                                     const std::filesystem::path& edges_csv,
                                     const std::filesystem::path& nodes_csv) {
  std::map<int, SnapshotBuilder> builders;
  for (const auto& s : semesters) builders.emplace(s.index, SnapshotBuilder{s});
  const auto builder_for = [&](const std::string& field, const csv::LineReader& r)
      -> SnapshotBuilder& {
    const auto idx = static_cast<int>(csv::parse_int(field, "semester"));
    const auto it = builders.find(idx);
    if (it == builders.end()) {
      throw InputError(fmt::format("{}:{}: unknown semester {}", r.path().string(),
                                   r.line_number(), idx));
    }
    return it->second;
  };

  csv::LineReader nr(nodes_csv);
  nr.expect_header({"semester", "node"}, true);
  std::string line;
  while (nr.next(line)) {
    const auto f = csv::split(line);
    if (f.size() != 2) throw InputError(fmt::format("{}:{}: expected 2 fields", nodes_csv.string(), nr.line_number()));
    builder_for(f[0], nr).add_node(NodeId{csv::parse_uint(f[1], "node")});
  }

  csv::LineReader er(edges_csv);
  er.expect_header({"semester", "node_u", "node_v", "call_count", "text_count"}, true);
  while (er.next(line)) {
    const auto f = csv::split(line);
    if (f.size() != 5) throw InputError(fmt::format("{}:{}: expected 5 fields", edges_csv.string(), er.line_number()));
    builder_for(f[0], er).add_edge(NodeId{csv::parse_uint(f[1], "node_u")},
                                   NodeId{csv::parse_uint(f[2], "node_v")},
                                   EdgeWeight{csv::parse_uint(f[3], "call_count"),
                                              csv::parse_uint(f[4], "text_count")});
  }

  std::vector<Snapshot> out;
  for (const auto& s : semesters) out.push_back(builders.at(s.index).build());
  return out;
}

}  // namespace netevo

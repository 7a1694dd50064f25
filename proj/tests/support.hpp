#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "netevo/attributes.hpp"
#include "netevo/graph.hpp"
#include "netevo/ingest.hpp"

namespace testsupport {

inline netevo::Semester semester(int index) {
  return netevo::SemesterCalendar::academic(2011, index).at_index(index);
}

/// G(n, p) snapshot over non-contiguous ids (7, 10, 13, ...).
inline netevo::Snapshot random_snapshot(netevo::Rng& rng, int n, double p, int sem = 1,
                                        double presence = 1.0) {
  netevo::SnapshotBuilder b(semester(sem));
  std::bernoulli_distribution edge(p);
  std::bernoulli_distribution present(presence);
  std::vector<netevo::NodeId> ids;
  for (int i = 0; i < n; ++i) {
    if (present(rng)) ids.emplace_back(static_cast<std::uint64_t>(7 + 3 * i));
  }
  for (auto id : ids) b.add_node(id);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      if (edge(rng)) b.add_edge(ids[i], ids[j]);
    }
  }
  return b.build();
}

inline netevo::AttributeValue random_value(const netevo::AttributeKind& kind, netevo::Rng& rng,
                                           double missing = 0.1) {
  using namespace netevo;
  if (std::bernoulli_distribution(missing)(rng)) return Missing{};
  if (std::holds_alternative<Binary>(kind)) {
    return std::int64_t{std::uniform_int_distribution<int>(0, 1)(rng)};
  }
  if (const auto* c = std::get_if<Categorical>(&kind)) {
    return std::int64_t{std::uniform_int_distribution<int>(0, c->categories - 1)(rng)};
  }
  if (const auto* o = std::get_if<Ordinal>(&kind)) {
    return std::int64_t{std::uniform_int_distribution<int>(o->min, o->max)(rng)};
  }
  const auto& s = std::get<SetValued>(kind);
  ItemSet items;
  for (const auto& u : s.universe) {
    if (std::bernoulli_distribution(0.3)(rng)) items.push_back(u);
  }
  return items;
}

inline netevo::Profile random_profile(const netevo::AttributeSchema& schema, netevo::Rng& rng,
                                      netevo::NodeId node, int sem) {
  netevo::Profile p;
  p.node = node;
  p.semester = sem;
  for (const auto& a : schema.attributes()) p.values.push_back(random_value(a.kind, rng));
  return p;
}

/// A profile for every node of every snapshot, keyed by the snapshot's semester.
inline netevo::ProfileTable random_profiles(const netevo::AttributeSchema& schema,
                                            netevo::Rng& rng,
                                            const std::vector<netevo::Snapshot>& snaps) {
  netevo::ProfileTable table;
  for (const auto& s : snaps) {
    for (auto u : s.nodes()) table.add(schema, random_profile(schema, rng, u, s.semester().index));
  }
  return table;
}

class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("netevo_" + name + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport

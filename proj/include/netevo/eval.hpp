#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netevo/attributes.hpp"
#include "netevo/graph.hpp"
#include "netevo/models.hpp"
#include "netevo/spectral.hpp"

namespace netevo {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  double recall = 0.0;
  bool recall_undefined = false;  // no Positive in the truth; recall reported as 0
  ConfusionCounts counts;
};

Metrics metrics(const std::vector<Label>& predicted, const std::vector<Label>& truth);
Metrics metrics(const std::vector<models::Prediction>& predicted, const std::vector<Label>& truth);

/// Sample mean and standard error; absent for an empty cell (se also
/// absent for a single observation).
struct Summary {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> se;
};

Summary summarize(const std::vector<double>& values);

struct ClassCell {
  int semester = 0;  // semester t of the transition t -> t+1
  EdgeClass cls = EdgeClass::Existing;
  Summary total_agreement;
  Summary common_neighbors;
  std::vector<Summary> per_attribute;  // schema order
};

struct ClassStats {
  std::vector<std::string> attribute_names;
  std::vector<ClassCell> cells;  // (semester, class) order
  TotalMode total_mode = TotalMode::Soft;

  const ClassCell& at(int semester, EdgeClass cls) const;
};

/// Agreement and common-neighbor statistics over every pair of nodes shared
/// by consecutive snapshots, partitioned by edge class.
ClassStats edge_class_stats(const std::vector<Snapshot>& snaps, const ProfileTable& profiles,
                            const AttributeSchema& schema, const AgreementOptions& opts = {});

struct CommCell {
  std::string network;
  int semester = 0;
  PersistenceClass cls = PersistenceClass::Persisting;
  Summary calls;
  Summary texts;
  Summary common_neighbors;
};

struct CommStats {
  std::vector<CommCell> cells;  // activity cells first, then friendship

  const CommCell& at(const std::string& network, int semester, PersistenceClass cls) const;
};

/// Per-class communication volume of persisting and dissolving edges.
/// Friendship snapshots must already carry contact counts
/// (see attach_contact_counts). Either list may be empty.
CommStats comm_stats(const std::vector<Snapshot>& activity,
                     const std::vector<Snapshot>& friendship);

struct SnapshotSize {
  std::string network;
  int semester = 0;
  std::string label;
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

struct MetricRow {
  std::string classifier;  // display name
  std::string features;    // "no_svd" or "top_<k>"
  Metrics result;
};

struct RankingReport {
  std::vector<std::string> feature_names;
  std::vector<std::string> feature_labels;
  spectral::FeatureRanking ranking;
  Eigen::Index k = 0;
  std::string classifier;
  /// Spearman correlation of scores between this k and each other k.
  std::vector<std::pair<Eigen::Index, double>> stability;
};

struct Report {
  std::vector<SnapshotSize> sizes;
  std::optional<ClassStats> class_stats;
  std::optional<CommStats> comm;
  std::vector<MetricRow> formation;
  std::vector<MetricRow> persistence;
  std::optional<RankingReport> formation_ranking;
  std::optional<RankingReport> persistence_ranking;
  std::vector<std::string> notes;
};

/// Writes tableI, fig1..fig7, fig8_13, tableII..tableV CSVs and summary.txt
/// into `dir`. Output depends only on `report`.
void emit_report(const Report& report, const std::filesystem::path& dir);

}  // namespace netevo

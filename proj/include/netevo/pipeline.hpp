#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netevo/attributes.hpp"
#include "netevo/dataset.hpp"
#include "netevo/eval.hpp"
#include "netevo/graph.hpp"
#include "netevo/models.hpp"

namespace netevo {

enum class Network : std::uint8_t { Activity, Friendship };

std::string to_string(Network n);
Network parse_network(const std::string& name);

struct PipelineOptions {
  Task task = Task::Formation;
  Network network = Network::Activity;
  std::optional<std::size_t> max_hops = 2;  // formation negatives; nullopt = all pairs
  std::vector<Eigen::Index> ks = {2, 15, 28};
  bool include_no_svd = true;
  std::vector<models::ClassifierKind> classifiers;  // empty = all seven
  double train_fraction = 0.8;
  std::uint64_t seed = 42;
  models::TrainConfig train;
  AgreementOptions agreement;
  /// Weights for the ranking come from this classifier at the largest k.
  models::ClassifierKind ranking_classifier = models::ClassifierKind::LogisticRegression;
};

struct TaskResult {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<MetricRow> rows;  // classifier-major, then no_svd, top_k...
  std::optional<RankingReport> ranking;
};

std::vector<models::ClassifierKind> all_classifiers();
std::string feature_setting(std::optional<Eigen::Index> k);

/// Split, fit every classifier on raw features and on each top-k
/// eigenfeature projection (standardized with training statistics), score
/// the held-out rows and rank the original features.
/// `labels` are display names for the ranking (defaults to feature names).
TaskResult run_task(const LabeledDataset& ds, const PipelineOptions& opts,
                    const std::vector<std::string>& labels = {});

/// Same as run_task on the pooled examples of consecutive snapshots.
TaskResult run_task(const std::vector<Snapshot>& snaps, const ProfileTable& profiles,
                    const AttributeSchema& schema, const PipelineOptions& opts);

}  // namespace netevo

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "netevo/attributes.hpp"
#include "netevo/graph.hpp"

namespace netevo {

enum class Task : std::uint8_t { Formation, Persistence };

std::string to_string(Task t);
Task parse_task(const std::string& name);

struct LabeledExample {
  EdgePair pair;
  int semester = 0;  // semester t the features come from
  EdgeFeatureVector features;
  Label label = Label::Negative;
};

struct LabeledDataset {
  Task task = Task::Formation;
  std::vector<LabeledExample> examples;
  std::vector<std::string> feature_names;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  std::size_t count(Label l) const;
  /// One flattened feature vector per row.
  Eigen::MatrixXd matrix() const;
  std::vector<Label> labels() const;
};

struct SplitDataset {
  LabeledDataset train;
  LabeledDataset test;
  std::uint64_t seed = 0;
};

/// Looks up (semester, node) profiles; absent entries become all-Missing.
Profile profile_or_missing(const ProfileTable& profiles, const AttributeSchema& schema,
                           int semester, NodeId node);

/// Positives: every pair absent in t and present in t+1. Negatives: pairs
/// absent in both within `max_hops` of each other in t (nullopt = every
/// such pair). Only nodes present in both snapshots take part.
LabeledDataset formation_examples(const Snapshot& t, const Snapshot& t1,
                                  const ProfileTable& profiles, const AttributeSchema& schema,
                                  std::optional<std::size_t> max_hops,
                                  const AgreementOptions& opts = {});

/// One example per edge of t whose endpoints both remain in t+1.
/// Positive = persisting.
LabeledDataset persistence_examples(const Snapshot& t, const Snapshot& t1,
                                    const ProfileTable& profiles, const AttributeSchema& schema,
                                    const AgreementOptions& opts = {});

/// Examples over every consecutive semester pair, concatenated in order.
/// Transitions without a positive are skipped; throws if all are.
LabeledDataset pooled_examples(Task task, const std::vector<Snapshot>& snaps,
                               const ProfileTable& profiles, const AttributeSchema& schema,
                               std::optional<std::size_t> max_hops,
                               const AgreementOptions& opts = {});

/// Stratified split: each class sends round(fraction * size) examples,
/// chosen uniformly under `seed`, to train. Row order is preserved.
SplitDataset split(const LabeledDataset& ds, double train_fraction, std::uint64_t seed);

/// Metadata stored next to a dataset CSV.
struct DatasetMeta {
  Task task = Task::Formation;
  std::vector<int> semesters;
  std::optional<std::size_t> max_hops;
  std::uint64_t seed = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
};

DatasetMeta describe(const LabeledDataset& ds, std::optional<std::size_t> max_hops,
                     std::uint64_t seed);

/// CSV with header feature_names + `label`, plus `<path>.meta.json`.
void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds,
                   const DatasetMeta& meta);

struct LoadedDataset {
  Eigen::MatrixXd x;
  std::vector<Label> y;
  std::vector<std::string> feature_names;
  DatasetMeta meta;
};

LoadedDataset read_dataset(const std::filesystem::path& path);

std::filesystem::path meta_path(const std::filesystem::path& dataset_csv);

}  // namespace netevo

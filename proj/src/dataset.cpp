#include "netevo/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "netevo/csv.hpp"

namespace netevo {

std::string to_string(Task t) { return t == Task::Formation ? "formation" : "persistence"; }

Task parse_task(const std::string& name) {
  if (name == "formation") return Task::Formation;
  if (name == "persistence") return Task::Persistence;
  throw InputError("unknown task '" + name + "' (expected formation or persistence)");
}

std::size_t LabeledDataset::count(Label l) const {
  return static_cast<std::size_t>(std::count_if(
      examples.begin(), examples.end(), [l](const LabeledExample& e) { return e.label == l; }));
}

Eigen::MatrixXd LabeledDataset::matrix() const {
  const auto cols = static_cast<Eigen::Index>(feature_names.size());
  Eigen::MatrixXd x(static_cast<Eigen::Index>(examples.size()), cols);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto row = examples[i].features.flatten();
    if (row.size() != cols) throw Error("feature vector length does not match feature names");
    x.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return x;
}

std::vector<Label> LabeledDataset::labels() const {
  std::vector<Label> out;
  out.reserve(examples.size());
  for (const auto& e : examples) out.push_back(e.label);
  return out;
}

Profile profile_or_missing(const ProfileTable& profiles, const AttributeSchema& schema,
                           int semester, NodeId node) {
  if (const auto* p = profiles.find(semester, node)) return *p;
  return missing_profile(schema, node, semester);
}

namespace {

LabeledExample make_example(const Snapshot& t, const ProfileTable& profiles,
                            const AttributeSchema& schema, NodeId u, NodeId v, Label label,
                            const AgreementOptions& opts) {
  const int sem = t.semester().index;
  LabeledExample ex;
  ex.pair = make_pair_canonical(u, v);
  ex.semester = sem;
  ex.label = label;
  ex.features = edge_features(schema, profile_or_missing(profiles, schema, sem, u),
                              profile_or_missing(profiles, schema, sem, v), t, opts);
  return ex;
}

}  // namespace

LabeledDataset formation_examples(const Snapshot& t, const Snapshot& t1,
                                  const ProfileTable& profiles, const AttributeSchema& schema,
                                  std::optional<std::size_t> max_hops,
                                  const AgreementOptions& opts) {
  if (max_hops && *max_hops < 2) {
    throw InputError(fmt::format("max_hops must be at least 2, got {}", *max_hops));
  }
  LabeledDataset ds;
  ds.task = Task::Formation;
  ds.feature_names = feature_names(schema);

  const auto shared = shared_nodes(t, t1);
  for (std::size_t a = 0; a < shared.size(); ++a) {
    const NodeId u = shared[a];
    std::vector<std::uint32_t> dist;
    if (max_hops) dist = bfs_within(t, u, *max_hops);
    for (std::size_t b = a + 1; b < shared.size(); ++b) {
      const NodeId v = shared[b];
      if (t.has_edge(u, v)) continue;
      if (t1.has_edge(u, v)) {
        ds.examples.push_back(make_example(t, profiles, schema, u, v, Label::Positive, opts));
      } else if (!max_hops || dist[t.index_of(v)] != 0) {
        ds.examples.push_back(make_example(t, profiles, schema, u, v, Label::Negative, opts));
      }
    }
  }
  if (ds.count(Label::Positive) == 0) {
    throw InputError(fmt::format(
        "no edges form between semesters {} and {}; choose a different semester pair",
        t.semester().index, t1.semester().index));
  }
  return ds;
}

LabeledDataset persistence_examples(const Snapshot& t, const Snapshot& t1,
                                    const ProfileTable& profiles, const AttributeSchema& schema,
                                    const AgreementOptions& opts) {
  LabeledDataset ds;
  ds.task = Task::Persistence;
  ds.feature_names = feature_names(schema);
  for (const auto& [e, w] : t.edges()) {
    if (!t1.has_node(e.lo) || !t1.has_node(e.hi)) continue;
    const auto cls = classify_persistence(t, t1, e.lo, e.hi);
    ds.examples.push_back(make_example(t, profiles, schema, e.lo, e.hi,
                                       label_from_bool(cls == PersistenceClass::Persisting),
                                       opts));
  }
  if (ds.empty()) {
    throw InputError(fmt::format("semester {} has no edge whose endpoints remain in semester {}",
                                 t.semester().index, t1.semester().index));
  }
  return ds;
}

LabeledDataset pooled_examples(Task task, const std::vector<Snapshot>& snaps,
                               const ProfileTable& profiles, const AttributeSchema& schema,
                               std::optional<std::size_t> max_hops,
                               const AgreementOptions& opts) {
  if (snaps.size() < 2) throw InputError("need at least two snapshots");
  LabeledDataset out;
  out.task = task;
  out.feature_names = feature_names(schema);
  std::string skipped;
  for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
    try {
      auto ds = task == Task::Formation
                    ? formation_examples(snaps[i], snaps[i + 1], profiles, schema, max_hops, opts)
                    : persistence_examples(snaps[i], snaps[i + 1], profiles, schema, opts);
      std::move(ds.examples.begin(), ds.examples.end(), std::back_inserter(out.examples));
    } catch (const InputError& e) {
      skipped += std::string(skipped.empty() ? "" : "; ") + e.what();
    }
  }
  if (out.empty() || out.count(Label::Positive) == 0) {
    throw InputError("no positive examples in any semester transition: " + skipped);
  }
  return out;
}

SplitDataset split(const LabeledDataset& ds, double train_fraction, std::uint64_t seed) {
  if (ds.empty()) throw InputError("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError("train fraction must lie in (0, 1)");
  }
  Rng rng(seed);
  std::vector<bool> to_train(ds.size(), false);
  for (const auto cls : {Label::Negative, Label::Positive}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (ds.examples[i].label == cls) idx.push_back(i);
    }
    if (idx.size() < 2) {
      throw InputError(fmt::format("class {} has {} example(s); at least 2 are needed to split",
                                   to_int(cls), idx.size()));
    }
    const auto n_train = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(idx.size()) + 0.5));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < n_train; ++i) to_train[idx[i]] = true;
  }
  SplitDataset out;
  out.seed = seed;
  for (auto* part : {&out.train, &out.test}) {
    part->task = ds.task;
    part->feature_names = ds.feature_names;
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (to_train[i] ? out.train : out.test).examples.push_back(ds.examples[i]);
  }
  return out;
}

DatasetMeta describe(const LabeledDataset& ds, std::optional<std::size_t> max_hops,
                     std::uint64_t seed) {
  DatasetMeta m;
  m.task = ds.task;
  m.max_hops = ds.task == Task::Formation ? max_hops : std::nullopt;
  m.seed = seed;
  m.positives = ds.count(Label::Positive);
  m.negatives = ds.count(Label::Negative);
  for (const auto& e : ds.examples) {
    if (std::find(m.semesters.begin(), m.semesters.end(), e.semester) == m.semesters.end()) {
      m.semesters.push_back(e.semester);
    }
  }
  std::sort(m.semesters.begin(), m.semesters.end());
  return m;
}

std::filesystem::path meta_path(const std::filesystem::path& dataset_csv) {
  auto p = dataset_csv;
  p += ".meta.json";
  return p;
}

void write_dataset(const std::filesystem::path& path, const LabeledDataset& ds,
                   const DatasetMeta& meta) {
  {
    auto out = csv::open_output(path);
    out << csv::join(ds.feature_names) << ",label\n";
    for (const auto& e : ds.examples) {
      const auto row = e.features.flatten();
      for (Eigen::Index j = 0; j < row.size(); ++j) out << csv::format_double(row(j)) << ',';
      out << to_int(e.label) << '\n';
    }
  }
  nlohmann::ordered_json j;
  j["task"] = to_string(meta.task);
  j["semesters"] = meta.semesters;
  j["max_hops"] = nullptr;
  if (meta.max_hops) j["max_hops"] = *meta.max_hops;
  j["seed"] = meta.seed;
  j["positives"] = meta.positives;
  j["negatives"] = meta.negatives;
  auto out = csv::open_output(meta_path(path));
  out << j.dump(2) << '\n';
}

LoadedDataset read_dataset(const std::filesystem::path& path) {
  LoadedDataset out;
  csv::LineReader reader(path);
  std::string line;
  if (!reader.next(line)) throw InputError("dataset '" + path.string() + "' is empty");
  auto header = csv::split(line);
  if (header.size() < 2 || header.back() != "label") {
    throw InputError("dataset '" + path.string() + "' must end its header with 'label'");
  }
  header.pop_back();
  out.feature_names = header;
  std::vector<std::vector<double>> rows;
  while (reader.next(line)) {
    const auto f = csv::split(line);
    const auto where = fmt::format("{}:{}", path.string(), reader.line_number());
    if (f.size() != header.size() + 1) {
      throw InputError(fmt::format("{}: expected {} fields, got {}", where, header.size() + 1,
                                   f.size()));
    }
    std::vector<double> row;
    for (std::size_t j = 0; j < header.size(); ++j) row.push_back(csv::parse_double(f[j], header[j]));
    const auto lab = csv::parse_int(f.back(), "label");
    if (lab != 0 && lab != 1) throw InputError(where + ": label must be 0 or 1");
    out.y.push_back(label_from_bool(lab == 1));
    rows.push_back(std::move(row));
  }
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      out.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }

  const auto mp = meta_path(path);
  if (std::filesystem::exists(mp)) {
    std::ifstream in(mp);
    try {
      const auto j = nlohmann::json::parse(in);
      out.meta.task = parse_task(j.at("task").get<std::string>());
      out.meta.semesters = j.at("semesters").get<std::vector<int>>();
      if (!j.at("max_hops").is_null()) out.meta.max_hops = j.at("max_hops").get<std::size_t>();
      out.meta.seed = j.at("seed").get<std::uint64_t>();
      out.meta.positives = j.at("positives").get<std::size_t>();
      out.meta.negatives = j.at("negatives").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError("malformed dataset metadata '" + mp.string() + "': " + e.what());
    }
  } else {
    out.meta.positives = static_cast<std::size_t>(
        std::count(out.y.begin(), out.y.end(), Label::Positive));
    out.meta.negatives = out.y.size() - out.meta.positives;
  }
  return out;
}

}  // namespace netevo

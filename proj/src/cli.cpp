#include "netevo/cli.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "netevo/csv.hpp"
#include "netevo/dataset.hpp"
#include "netevo/eval.hpp"
#include "netevo/ingest.hpp"
#include "netevo/models.hpp"
#include "netevo/pipeline.hpp"
#include "netevo/spectral.hpp"
#include "netevo/synth.hpp"

namespace netevo::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 initialisation failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    if (in.gcount() > 0 &&
        EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount())) != 1) {
      throw Error("SHA-256 update failed");
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) throw Error("SHA-256 final failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

Manifest::Manifest(std::string command, json config, fs::path path)
    : command_(std::move(command)), config_(std::move(config)), path_(std::move(path)) {}

void Manifest::add_input(const fs::path& path) {
  json j;
  j["path"] = path.string();
  j["bytes"] = fs::file_size(path);
  j["sha256"] = sha256_file(path);
  inputs_.push_back(std::move(j));
}

void Manifest::add_output(const std::string& name) { outputs_.push_back(name); }

void Manifest::write(const std::string& status, const std::string& error) const {
  json j;
  j["format"] = "netevo-manifest";
  j["artifact_version"] = kArtifactVersion;
  j["command"] = command_;
  j["status"] = status;
  if (!error.empty()) j["error"] = error;
  j["seed"] = config_.contains("seed") ? config_["seed"] : json(nullptr);
  j["config"] = config_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  auto out = csv::open_output(path_);
  out << j.dump(2) << '\n';
}

namespace {

// ---------------------------------------------------------------------------
// Configuration resolution: defaults, then config file, then flags.
// ---------------------------------------------------------------------------

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

/// A manifest can stand in for a config file; its resolved config is reused.
json config_section(json doc, const fs::path& path) {
  if (doc.is_object() && doc.value("format", "") == "netevo-manifest") doc = doc.at("config");
  if (!doc.is_object()) throw InputError("config '" + path.string() + "' must be a JSON object");
  return doc;
}

json resolve(const json& defaults, const std::string& config_path, const json& flags) {
  json out = defaults;
  if (!config_path.empty()) {
    const auto doc = config_section(read_json_file(config_path), config_path);
    for (const auto& [key, value] : doc.items()) {
      if (!defaults.contains(key)) {
        throw InputError(fmt::format("config '{}': unknown key '{}'", config_path, key));
      }
      out[key] = value;
    }
  }
  for (const auto& [key, value] : flags.items()) out[key] = value;
  return out;
}

const json& field(const json& cfg, const std::string& key) {
  if (!cfg.contains(key)) throw InputError("missing setting '" + key + "'");
  return cfg.at(key);
}

std::string get_string(const json& cfg, const std::string& key) {
  const auto& v = field(cfg, key);
  if (!v.is_string()) throw InputError("setting '" + key + "' must be a string");
  return v.get<std::string>();
}

fs::path get_path(const json& cfg, const std::string& key) {
  auto s = get_string(cfg, key);
  if (s.empty()) throw InputError("setting '" + key + "' is required (use --" + key + ")");
  return s;
}

std::uint64_t get_uint(const json& cfg, const std::string& key) {
  const auto& v = field(cfg, key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw InputError("setting '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double get_double(const json& cfg, const std::string& key) {
  const auto& v = field(cfg, key);
  if (!v.is_number()) throw InputError("setting '" + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& cfg, const std::string& key) {
  const auto& v = field(cfg, key);
  if (!v.is_boolean()) throw InputError("setting '" + key + "' must be true or false");
  return v.get<bool>();
}

std::optional<std::size_t> get_max_hops(const json& cfg) {
  const auto& v = field(cfg, "max_hops");
  if (v.is_null()) return std::nullopt;
  const auto h = get_uint(cfg, "max_hops");
  if (h < 2) throw InputError("setting 'max_hops' must be at least 2 or null");
  return h;
}

std::vector<Eigen::Index> get_ks(const json& cfg) {
  const auto& v = field(cfg, "k");
  if (!v.is_array()) throw InputError("setting 'k' must be a list of integers");
  std::vector<Eigen::Index> ks;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<std::int64_t>() < 1) {
      throw InputError("setting 'k' must contain positive integers");
    }
    ks.push_back(e.get<Eigen::Index>());
  }
  return ks;
}

std::vector<models::ClassifierKind> get_classifiers(const json& cfg) {
  const auto& v = field(cfg, "classifiers");
  if (!v.is_array()) throw InputError("setting 'classifiers' must be a list of names");
  std::vector<models::ClassifierKind> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw InputError("setting 'classifiers' must contain names");
    out.push_back(models::parse_classifier(e.get<std::string>()));
  }
  return out;
}

AgreementOptions get_agreement(const json& cfg) {
  AgreementOptions a;
  const auto mode = get_string(cfg, "total_mode");
  if (mode == "soft") {
    a.total = TotalMode::Soft;
  } else if (mode == "hard") {
    a.total = TotalMode::Hard;
  } else {
    throw InputError("setting 'total_mode' must be soft or hard");
  }
  return a;
}

FriendshipRule get_rule(const json& cfg) {
  const auto r = get_string(cfg, "friendship_rule");
  if (r == "either") return FriendshipRule::EitherNominates;
  if (r == "mutual") return FriendshipRule::Mutual;
  throw InputError("setting 'friendship_rule' must be either or mutual");
}

// Flag values arrive as strings and are converted to the JSON types the
// config file uses, so both routes go through the same validation.
struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config;

  void add(CLI::App* app, const std::string& key, const std::string& help) {
    auto flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    options[key] = app->add_option(flag, values[key], help);
  }

  json collect() const {
    json j = json::object();
    for (const auto& [key, opt] : options) {
      if (opt->count() == 0) continue;
      const auto& text = values.at(key);
      if (key == "seed" || key == "threshold") {
        j[key] = csv::parse_uint(text, "--" + key);
      } else if (key == "max_hops") {
        j[key] = (text == "all" || text == "none") ? json(nullptr)
                                                   : json(csv::parse_uint(text, "--max-hops"));
      } else if (key == "k" || key == "classifiers") {
        json arr = json::array();
        for (const auto& part : csv::split(text)) {
          const auto t = csv::trim(part);
          if (t.empty()) continue;
          if (key == "k") {
            arr.push_back(csv::parse_int(t, "--k"));
          } else {
            arr.push_back(t);
          }
        }
        j[key] = std::move(arr);
      } else if (key == "train_fraction") {
        j[key] = csv::parse_double(text, "--train-fraction");
      } else {
        j[key] = text;
      }
    }
    return j;
  }
};

// ---------------------------------------------------------------------------
// Input loading
// ---------------------------------------------------------------------------

struct DataSet {
  AttributeSchema schema;
  SemesterCalendar calendar;
  ProfileTable profiles;
  Rosters rosters;
  std::vector<ContactRecord> contacts;
  std::vector<Nomination> nominations;
  std::vector<RowError> contact_errors;
  std::vector<RowError> nomination_errors;
  NetworkBuildReport activity_report;
  NetworkBuildReport friendship_report;
  std::vector<Snapshot> activity;
  std::vector<Snapshot> friendship;
};

fs::path require_file(const fs::path& dir, const std::string& name, const std::string& what) {
  const auto p = dir / name;
  if (!fs::is_regular_file(p)) {
    throw InputError(fmt::format("data directory '{}' has no {} ({})", dir.string(), name, what));
  }
  return p;
}

void warn_rows(const std::string& file, const std::vector<RowError>& errors) {
  if (errors.empty()) return;
  std::cerr << fmt::format("netevo: warning: skipped {} malformed row(s) in {} (first at line {}: {})\n",
                           errors.size(), file, errors.front().line, errors.front().message);
}

DataSet load_data(const json& cfg, Manifest& manifest) {
  const auto dir = get_path(cfg, "data");
  if (!fs::is_directory(dir)) throw InputError("data directory '" + dir.string() + "' not found");
  DataSet d;
  const auto contacts = require_file(dir, "contacts.csv", "contact log");
  const auto profiles = require_file(dir, "profiles.csv", "survey profiles");
  const auto noms = require_file(dir, "nominations.csv", "friendship nominations");
  const auto schema = dir / "schema.json";
  const auto calendar = dir / "calendar.json";

  d.schema = fs::is_regular_file(schema) ? load_schema(schema) : AttributeSchema::default_schema();
  d.calendar = fs::is_regular_file(calendar) ? load_calendar(calendar) : SemesterCalendar::netsense();
  for (const auto& p : {contacts, profiles, noms, schema, calendar}) {
    if (fs::is_regular_file(p)) manifest.add_input(p);
  }
  manifest.write("incomplete");

  d.profiles = read_profiles(profiles, d.schema);
  for (const auto& s : d.calendar.semesters()) d.rosters[s.index] = d.profiles.roster(s.index);
  if (d.profiles.size() == 0) throw InputError("profiles.csv contains no profiles");

  auto c = parse_contact_log(contacts);
  d.contacts = std::move(c.records);
  d.contact_errors = std::move(c.errors);
  warn_rows(contacts.string(), d.contact_errors);
  auto n = parse_nominations(noms);
  d.nominations = std::move(n.records);
  d.nomination_errors = std::move(n.errors);
  warn_rows(noms.string(), d.nomination_errors);

  ActivityOptions ao;
  ao.threshold = get_uint(cfg, "threshold");
  if (ao.threshold == 0) throw InputError("setting 'threshold' must be at least 1");
  d.activity = build_activity_network(d.contacts, d.calendar, ao, &d.rosters, &d.activity_report);
  FriendshipOptions fo;
  fo.rule = get_rule(cfg);
  d.friendship = attach_contact_counts(
      build_friendship_network(d.nominations, d.calendar, d.rosters, fo, &d.friendship_report),
      d.contacts);
  return d;
}

const std::vector<Snapshot>& pick_network(const DataSet& d, Network n) {
  return n == Network::Activity ? d.activity : d.friendship;
}

fs::path prepare_out(const json& cfg) {
  const auto out = get_path(cfg, "out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory '" + out.string() + "': " + ec.message());
  return out;
}

std::vector<SnapshotSize> snapshot_sizes(const DataSet& d) {
  std::vector<SnapshotSize> sizes;
  for (const auto net : {Network::Activity, Network::Friendship}) {
    for (const auto& s : pick_network(d, net)) {
      sizes.push_back({to_string(net), s.semester().index, s.semester().label, s.node_count(),
                       s.edge_count()});
    }
  }
  return sizes;
}

const std::vector<std::string> kReportFiles = {
    "tableI.csv", "fig1.csv",    "fig2.csv",     "fig3.csv",    "fig4.csv",
    "fig5.csv",   "fig6.csv",    "fig7.csv",     "fig8_13.csv", "tableII.csv",
    "tableIII.csv", "tableIV.csv", "tableV.csv", "summary.txt"};

// ---------------------------------------------------------------------------
// Model files: a trained classifier plus the optional eigenfeature map.
// ---------------------------------------------------------------------------

struct ModelFile {
  std::vector<std::string> feature_names;
  std::optional<spectral::EigenfeatureMap<double>> projection;
  models::TrainedModel model;
};

json vec_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void save_model_file(const fs::path& path, const ModelFile& mf) {
  json j;
  j["format"] = "netevo-model-file";
  j["version"] = 1;
  j["feature_names"] = mf.feature_names;
  j["projection"] = nullptr;
  if (mf.projection) {
    const auto& p = *mf.projection;
    json pj;
    pj["k"] = p.dim();
    pj["mean"] = vec_json(p.standardizer.mean);
    pj["scale"] = vec_json(p.standardizer.scale);
    json cols = json::array();
    for (Eigen::Index c = 0; c < p.basis.cols(); ++c) cols.push_back(vec_json(p.basis.col(c)));
    pj["basis_columns"] = std::move(cols);
    j["projection"] = std::move(pj);
  }
  std::ostringstream model;
  mf.model.save(model);
  j["model"] = json::parse(model.str());
  csv::open_output(path) << j.dump(1) << '\n';
}

ModelFile load_model_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model '" + path.string() + "'");
  ModelFile mf;
  try {
    const auto j = json::parse(in);
    if (j.value("format", "") != "netevo-model-file" || j.value("version", 0) != 1) {
      throw InputError("'" + path.string() + "' is not a netevo model file (version 1)");
    }
    mf.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (!j.at("projection").is_null()) {
      const auto& pj = j.at("projection");
      spectral::EigenfeatureMap<double> p;
      p.standardizer.mean = json_vec(pj.at("mean"));
      p.standardizer.scale = json_vec(pj.at("scale"));
      const auto& cols = pj.at("basis_columns");
      p.basis.resize(p.standardizer.mean.size(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto col = json_vec(cols[c]);
        if (col.size() != p.basis.rows()) throw InputError("projection basis has a ragged column");
        p.basis.col(static_cast<Eigen::Index>(c)) = col;
      }
      mf.projection = std::move(p);
    }
    std::istringstream model(j.at("model").dump());
    mf.model = models::TrainedModel::load(model);
  } catch (const json::exception& e) {
    throw InputError("malformed model file '" + path.string() + "': " + e.what());
  }
  const auto width = mf.projection ? mf.projection->dim()
                                   : static_cast<Eigen::Index>(mf.feature_names.size());
  if (mf.model.dimension() != width) {
    throw InputError("model file '" + path.string() + "' has inconsistent dimensions");
  }
  return mf;
}

Eigen::MatrixXd model_inputs(const ModelFile& mf, const LoadedDataset& ds) {
  if (ds.feature_names != mf.feature_names) {
    throw InputError("dataset columns do not match the features the model was trained on");
  }
  return mf.projection ? mf.projection->transform(ds.x) : ds.x;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct Command {
  std::string name;
  json defaults;
  CLI::App* app = nullptr;
  Flags flags;
};

template <typename Body>
int execute(const std::string& name, const json& cfg, const fs::path& manifest_path, Body&& body) {
  Manifest m(name, cfg, manifest_path);
  m.write("incomplete");
  try {
    body(m);
  } catch (const std::exception& e) {
    try {
      m.write("failed", e.what());
    } catch (...) {
    }
    throw;
  }
  m.write("complete");
  return 0;
}

int cmd_synth(const json& flags, const std::string& config_path) {
  synth::SynthConfig cfg = config_path.empty()
                               ? synth::SynthConfig{}
                               : synth::parse_config(
                                     config_section(read_json_file(config_path), config_path).dump());
  if (flags.contains("seed")) cfg.seed = flags["seed"].get<std::uint64_t>();
  if (flags.contains("threshold")) cfg.contact.threshold = flags["threshold"].get<int>();
  cfg.validate();
  if (!flags.contains("out")) throw InputError("setting 'out' is required (use --out)");
  const fs::path out = flags["out"].get<std::string>();
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory '" + out.string() + "': " + ec.message());

  const auto resolved = json::parse(synth::config_to_json(cfg));
  return execute("synth", resolved, out / "manifest.json", [&](Manifest& m) {
    if (!config_path.empty()) m.add_input(config_path);
    for (const auto* name : {"contacts.csv", "profiles.csv", "nominations.csv", "schema.json",
                             "calendar.json", "edges.csv", "nodes.csv", "ground_truth.json"}) {
      m.add_output(name);
    }
    m.write("incomplete");
    const auto world = synth::generate(cfg);
    synth::write_world(world, out);
    std::cout << fmt::format("synth: {} contacts, {} nominations, {} semesters -> {}\n",
                             world.contacts.size(), world.nominations.size(),
                             world.activity.size(), out.string());
  });
}

int cmd_build(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("build", cfg, out / "manifest.json", [&](Manifest& m) {
    for (const auto* name : {"activity_edges.csv", "activity_nodes.csv", "friendship_edges.csv",
                             "friendship_nodes.csv", "build_report.json"}) {
      m.add_output(name);
    }
    const auto d = load_data(cfg, m);
    write_snapshots(d.activity, out / "activity_edges.csv", out / "activity_nodes.csv");
    write_snapshots(d.friendship, out / "friendship_edges.csv", out / "friendship_nodes.csv");
    json r;
    auto rows = [](const std::vector<RowError>& errs) {
      json a = json::array();
      for (const auto& e : errs) a.push_back({{"line", e.line}, {"message", e.message}});
      return a;
    };
    r["contact_records"] = d.contacts.size();
    r["contact_row_errors"] = rows(d.contact_errors);
    r["nominations"] = d.nominations.size();
    r["nomination_row_errors"] = rows(d.nomination_errors);
    r["unassigned_records"] = d.activity_report.unassigned_records;
    r["dropped_records"] = d.activity_report.dropped_records;
    r["dropped_nominations"] = d.friendship_report.dropped_nominations;
    json snaps = json::array();
    for (const auto& s : snapshot_sizes(d)) {
      snaps.push_back({{"network", s.network}, {"semester", s.semester}, {"label", s.label},
                       {"nodes", s.nodes}, {"edges", s.edges}});
    }
    r["snapshots"] = std::move(snaps);
    csv::open_output(out / "build_report.json") << r.dump(2) << '\n';
    std::cout << fmt::format("build: {} activity and {} friendship snapshots -> {}\n",
                             d.activity.size(), d.friendship.size(), out.string());
  });
}

int cmd_dataset(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("dataset", cfg, out / "manifest.json", [&](Manifest& m) {
    for (const auto* name : {"dataset.csv", "dataset.csv.meta.json", "train.csv",
                             "train.csv.meta.json", "test.csv", "test.csv.meta.json"}) {
      m.add_output(name);
    }
    const auto task = parse_task(get_string(cfg, "task"));
    const auto hops = get_max_hops(cfg);
    const auto seed = get_uint(cfg, "seed");
    const auto d = load_data(cfg, m);
    const auto& snaps = pick_network(d, parse_network(get_string(cfg, "network")));
    const auto ds = pooled_examples(task, snaps, d.profiles, d.schema, hops, get_agreement(cfg));
    const auto parts = split(ds, get_double(cfg, "train_fraction"), seed);
    write_dataset(out / "dataset.csv", ds, describe(ds, hops, seed));
    write_dataset(out / "train.csv", parts.train, describe(parts.train, hops, seed));
    write_dataset(out / "test.csv", parts.test, describe(parts.test, hops, seed));
    std::cout << fmt::format("dataset: {} examples ({} positive), {} train / {} test -> {}\n",
                             ds.size(), ds.count(Label::Positive), parts.train.size(),
                             parts.test.size(), out.string());
  });
}

int cmd_train(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("train", cfg, out / "manifest.json", [&](Manifest& m) {
    m.add_output("model.json");
    const auto path = get_path(cfg, "dataset");
    const auto kind = models::parse_classifier(get_string(cfg, "classifier"));
    auto kv = field(cfg, "k");
    if (kv.is_array()) {
      if (kv.size() > 1) throw InputError("train takes a single k");
      kv = kv.empty() ? json(nullptr) : json(kv[0]);
    }
    std::optional<Eigen::Index> k;
    if (!kv.is_null()) {
      if (!kv.is_number_integer() || kv.get<std::int64_t>() < 1) {
        throw InputError("setting 'k' must be a positive integer or null");
      }
      k = kv.get<Eigen::Index>();
    }
    m.add_input(path);
    m.write("incomplete");
    const auto ds = read_dataset(path);
    ModelFile mf;
    mf.feature_names = ds.feature_names;
    Eigen::MatrixXd x = ds.x;
    if (k) {
      if (*k > x.cols()) {
        throw InputError(fmt::format("k = {} exceeds the {} features", *k, x.cols()));
      }
      mf.projection = spectral::EigenfeatureMap<double>::fit(ds.x, *k);
      x = mf.projection->transform(ds.x);
    }
    models::TrainConfig tc;
    tc.seed = get_uint(cfg, "seed");
    mf.model = models::fit(kind, x, ds.y, tc);
    save_model_file(out / "model.json", mf);
    std::cout << fmt::format("train: {} on {} rows ({}) -> {}\n", models::display_name(kind),
                             ds.y.size(), feature_setting(k), (out / "model.json").string());
  });
}

int cmd_eval(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("eval", cfg, out / "manifest.json", [&](Manifest& m) {
    m.add_output("metrics.json");
    m.add_output("predictions.csv");
    const auto model_path = get_path(cfg, "model");
    const auto data_path = get_path(cfg, "dataset");
    m.add_input(model_path);
    m.add_input(data_path);
    m.write("incomplete");
    const auto mf = load_model_file(model_path);
    const auto ds = read_dataset(data_path);
    const auto preds = mf.model.predict(model_inputs(mf, ds));
    const auto met = metrics(preds, ds.y);
    json j;
    j["classifier"] = models::to_string(mf.model.kind());
    j["rows"] = ds.y.size();
    j["accuracy"] = met.accuracy;
    j["recall"] = met.recall_undefined ? json(nullptr) : json(met.recall);
    j["tp"] = met.counts.tp;
    j["fp"] = met.counts.fp;
    j["tn"] = met.counts.tn;
    j["fn"] = met.counts.fn;
    csv::open_output(out / "metrics.json") << j.dump(2) << '\n';
    auto p = csv::open_output(out / "predictions.csv");
    p << "row,label,predicted,score\n";
    for (std::size_t i = 0; i < preds.size(); ++i) {
      p << i << ',' << to_int(ds.y[i]) << ',' << to_int(preds[i].label) << ','
        << csv::format_double(preds[i].score) << '\n';
    }
    std::cout << fmt::format("eval: accuracy {:.4f}, recall {} on {} rows\n", met.accuracy,
                             met.recall_undefined ? "undefined" : fmt::format("{:.4f}", met.recall),
                             ds.y.size());
  });
}

int cmd_rank(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("rank", cfg, out / "manifest.json", [&](Manifest& m) {
    m.add_output("ranking.csv");
    const auto model_path = get_path(cfg, "model");
    m.add_input(model_path);
    m.write("incomplete");
    const auto mf = load_model_file(model_path);
    const auto lw = mf.model.linear_weights();
    if (!lw) {
      throw InputError("ranking needs a linear model (logreg or svm), got " +
                       models::to_string(mf.model.kind()));
    }
    const auto m_features = static_cast<Eigen::Index>(mf.feature_names.size());
    const Eigen::MatrixXd basis =
        mf.projection ? mf.projection->basis : Eigen::MatrixXd::Identity(m_features, m_features);
    const auto r = spectral::rank_with_basis(basis, lw->weights);
    spectral::write_ranking(out / "ranking.csv", r, mf.feature_names);
    std::cout << fmt::format("rank: top feature {} -> {}\n",
                             mf.feature_names[static_cast<std::size_t>(r.order.front())],
                             (out / "ranking.csv").string());
  });
}

PipelineOptions pipeline_options(const json& cfg) {
  PipelineOptions o;
  o.network = parse_network(get_string(cfg, "network"));
  o.max_hops = get_max_hops(cfg);
  o.ks = get_ks(cfg);
  o.include_no_svd = get_bool(cfg, "no_svd");
  o.classifiers = get_classifiers(cfg);
  o.train_fraction = get_double(cfg, "train_fraction");
  o.seed = get_uint(cfg, "seed");
  o.train.seed = o.seed;
  o.agreement = get_agreement(cfg);
  return o;
}

int cmd_pipeline(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("pipeline", cfg, out / "manifest.json", [&](Manifest& m) {
    for (const auto& f : kReportFiles) m.add_output(f);
    const auto task = get_string(cfg, "task");
    if (task != "formation" && task != "persistence" && task != "both") {
      throw InputError("setting 'task' must be formation, persistence or both");
    }
    auto opts = pipeline_options(cfg);
    const auto d = load_data(cfg, m);
    const auto& snaps = pick_network(d, opts.network);

    Report r;
    r.sizes = snapshot_sizes(d);
    r.class_stats = edge_class_stats(snaps, d.profiles, d.schema, opts.agreement);
    r.comm = comm_stats(d.activity, d.friendship);
    r.notes.push_back("network: " + to_string(opts.network));
    for (const auto t : {Task::Formation, Task::Persistence}) {
      if (task != "both" && task != to_string(t)) continue;
      opts.task = t;
      auto res = run_task(snaps, d.profiles, d.schema, opts);
      r.notes.push_back(fmt::format("{}: {} positive, {} negative, {} train, {} test", to_string(t),
                                    res.positives, res.negatives, res.train_size, res.test_size));
      (t == Task::Formation ? r.formation : r.persistence) = std::move(res.rows);
      (t == Task::Formation ? r.formation_ranking : r.persistence_ranking) =
          std::move(res.ranking);
    }
    emit_report(r, out);
    std::cout << fmt::format("pipeline: report -> {}\n", out.string());
  });
}

int cmd_stats(const json& cfg) {
  const auto out = prepare_out(cfg);
  return execute("stats", cfg, out / "manifest.json", [&](Manifest& m) {
    for (const auto& f : kReportFiles) m.add_output(f);
    const auto d = load_data(cfg, m);
    const auto net = parse_network(get_string(cfg, "network"));
    Report r;
    r.sizes = snapshot_sizes(d);
    r.class_stats = edge_class_stats(pick_network(d, net), d.profiles, d.schema, get_agreement(cfg));
    r.comm = comm_stats(d.activity, d.friendship);
    r.notes.push_back("network: " + to_string(net));
    emit_report(r, out);
    std::cout << fmt::format("stats: report -> {}\n", out.string());
  });
}

json data_defaults() {
  json j;
  j["data"] = "";
  j["out"] = "";
  j["threshold"] = 5;
  j["friendship_rule"] = "either";
  j["network"] = "activity";
  j["total_mode"] = "soft";
  return j;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"netevo: co-evolution of attitudes and social ties in semester networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("netevo ") + kArtifactVersion);

  std::vector<Command> cmds;
  cmds.reserve(8);
  auto add = [&](const std::string& name, const std::string& help, json defaults,
                 const std::vector<std::pair<std::string, std::string>>& flags) -> Command& {
    auto& c = cmds.emplace_back();
    c.name = name;
    c.defaults = std::move(defaults);
    c.app = app.add_subcommand(name, help);
    c.app->add_option("--config", c.flags.config,
                      "JSON config file or a previous manifest.json; flags override it");
    for (const auto& [key, text] : flags) c.flags.add(c.app, key, text);
    return c;
  };

  const std::pair<std::string, std::string> f_out{"out", "output directory"};
  const std::pair<std::string, std::string> f_data{
      "data", "directory with contacts.csv, profiles.csv, nominations.csv "
              "(schema.json and calendar.json optional)"};
  const std::pair<std::string, std::string> f_threshold{
      "threshold", "calls + texts per semester needed for an activity edge (default 5)"};
  const std::pair<std::string, std::string> f_seed{"seed", "random seed"};
  const std::pair<std::string, std::string> f_network{"network", "activity or friendship"};
  const std::pair<std::string, std::string> f_hops{
      "max_hops", "formation negatives within this many hops, or 'all' (default 2)"};

  add("synth", "generate a synthetic world with planted homophily and pruning", json::object(),
      {f_out, f_seed, f_threshold});

  add("build", "ingest raw files and write per-semester networks", data_defaults(),
      {f_data, f_out, f_threshold});

  auto ds_defaults = data_defaults();
  ds_defaults["task"] = "formation";
  ds_defaults["max_hops"] = 2;
  ds_defaults["seed"] = 42;
  ds_defaults["train_fraction"] = 0.8;
  add("dataset", "write labelled edge datasets and a stratified train/test split", ds_defaults,
      {f_data, f_out, f_threshold, {"task", "formation or persistence"}, f_network, f_hops, f_seed,
       {"train_fraction", "share of each class used for training (default 0.8)"}});

  json tr_defaults;
  tr_defaults["dataset"] = "";
  tr_defaults["out"] = "";
  tr_defaults["classifier"] = "logreg";
  tr_defaults["k"] = nullptr;
  tr_defaults["seed"] = 42;
  auto& train = add("train", "fit a classifier on a dataset CSV", tr_defaults,
                    {{"dataset", "dataset CSV written by `netevo dataset`"},
                     f_out,
                     {"classifier",
                      "logreg, svm, knn, naive_bayes, random_forest, svm_rbf or ensemble"},
                     f_seed});
  train.flags.add(train.app, "k", "project on the top-k eigenfeatures first");

  json ev_defaults;
  ev_defaults["model"] = "";
  ev_defaults["dataset"] = "";
  ev_defaults["out"] = "";
  add("eval", "score a trained model on a dataset CSV", ev_defaults,
      {{"model", "model.json written by `netevo train`"}, {"dataset", "dataset CSV"}, f_out});

  json rk_defaults;
  rk_defaults["model"] = "";
  rk_defaults["out"] = "";
  add("rank", "rank original features by a linear model's back-projected weights", rk_defaults,
      {{"model", "model.json of a logreg or svm model"}, f_out});

  auto pl_defaults = data_defaults();
  pl_defaults["task"] = "both";
  pl_defaults["max_hops"] = 2;
  pl_defaults["k"] = {2, 15, 28};
  pl_defaults["no_svd"] = true;
  pl_defaults["classifiers"] = json::array();
  for (const auto kind : all_classifiers()) pl_defaults["classifiers"].push_back(models::to_string(kind));
  pl_defaults["seed"] = 42;
  pl_defaults["train_fraction"] = 0.8;
  add("pipeline", "run ingest through ranking and emit the report tables", pl_defaults,
      {f_data, f_out, f_threshold, {"task", "formation, persistence or both (default both)"},
       f_network, f_hops, {"k", "comma-separated eigenfeature counts (default 2,15,28)"},
       {"classifiers", "comma-separated classifier names (default all)"}, f_seed,
       {"train_fraction", "share of each class used for training (default 0.8)"}});

  add("stats", "edge-class and communication statistics with snapshot sizes", data_defaults(),
      {f_data, f_out, f_threshold, f_network});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& c : cmds) {
      if (!c.app->parsed()) continue;
      const auto flags = c.flags.collect();
      if (c.name == "synth") return cmd_synth(flags, c.flags.config);
      const auto cfg = resolve(c.defaults, c.flags.config, flags);
      if (c.name == "build") return cmd_build(cfg);
      if (c.name == "dataset") return cmd_dataset(cfg);
      if (c.name == "train") return cmd_train(cfg);
      if (c.name == "eval") return cmd_eval(cfg);
      if (c.name == "rank") return cmd_rank(cfg);
      if (c.name == "pipeline") return cmd_pipeline(cfg);
      if (c.name == "stats") return cmd_stats(cfg);
    }
  } catch (const InputError& e) {
    std::cerr << "netevo: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "netevo: failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(const std::vector<std::string>& args) {
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("netevo");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace netevo::cli

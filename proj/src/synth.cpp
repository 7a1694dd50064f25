#include "netevo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "netevo/csv.hpp"

namespace netevo::synth {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw InputError(fmt::format("synth config field '{}' {}", field, what));
}

void require_rate(double v, const std::string& field) {
  require(std::isfinite(v) && v >= 0.0 && v <= 1.0, field, "must lie in [0, 1]");
}

void require_nonneg(double v, const std::string& field) {
  require(std::isfinite(v) && v >= 0.0, field, "must be a finite non-negative number");
}

}  // namespace

void SynthConfig::validate() const {
  require(n_nodes >= 2, "n_nodes", "must be at least 2");
  require(n_semesters >= 2, "n_semesters", "must be at least 2");
  require(schema.size() > 0, "schema", "must contain at least one attribute");
  require_nonneg(homophily_strength, "homophily_strength");
  require_nonneg(pruning_strength, "pruning_strength");
  require_nonneg(triadic_strength, "triadic_strength");
  require_rate(base_formation_rate, "base_formation_rate");
  require_rate(base_dissolution_rate, "base_dissolution_rate");
  require_rate(homophily_quantile, "homophily_quantile");
  require_rate(pruning_quantile, "pruning_quantile");
  if (homophily_pivot) require_rate(*homophily_pivot, "homophily_pivot");
  if (pruning_pivot) require_rate(*pruning_pivot, "pruning_pivot");
  require(cn_cap >= 1, "cn_cap", "must be at least 1");
  require_rate(reformation_factor, "reformation_factor");
  require_rate(seed_density, "seed_density");
  require(seed_density <= 0.5, "seed_density", "must not exceed 0.5 (sparse regime)");
  require(burn_in >= 0, "burn_in", "must be non-negative");
  require_rate(dropout_rate, "dropout_rate");
  require_rate(missing_rate, "missing_rate");
  require_rate(set_item_rate, "set_item_rate");
  require(groups >= 0, "groups", "must be non-negative");
  require_rate(group_affinity, "group_affinity");
  require(contact.threshold >= 1, "contact.threshold", "must be at least 1");
  require_nonneg(contact.extra_mean_persisting, "contact.extra_mean_persisting");
  require_nonneg(contact.extra_mean_dissolving, "contact.extra_mean_dissolving");
  require_rate(contact.call_fraction, "contact.call_fraction");
  require_nonneg(contact.background_pairs_per_node, "contact.background_pairs_per_node");
  require_rate(nominations.nomination_rate, "nominations.nomination_rate");
  require_rate(nominations.mutual_rate, "nominations.mutual_rate");
}

namespace {

template <typename T>
void read_field(const json& obj, const std::string& key, const std::string& path, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw InputError(fmt::format("synth config field '{}' has the wrong type", path + key));
  }
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
  if (!obj.is_object()) {
    throw InputError(fmt::format("synth config section '{}' must be an object",
                                 path.empty() ? "<root>" : path.substr(0, path.size() - 1)));
  }
  for (const auto& [k, v] : obj.items()) {
    if (!known.contains(k)) throw InputError(fmt::format("unknown synth config field '{}'", path + k));
  }
}

}  // namespace

SynthConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("synth config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc,
                 {"n_nodes", "n_semesters", "seed", "schema", "homophily_strength",
                  "pruning_strength", "triadic_strength", "base_formation_rate",
                  "base_dissolution_rate", "homophily_quantile", "pruning_quantile",
                  "homophily_pivot", "pruning_pivot", "cn_cap", "reformation_factor", "seed_density", "burn_in",
                  "dropout_rate", "missing_rate", "set_item_rate", "groups", "group_affinity",
                  "contact", "nominations"},
                 "");
  SynthConfig cfg;
  read_field(doc, "n_nodes", "", cfg.n_nodes);
  read_field(doc, "n_semesters", "", cfg.n_semesters);
  read_field(doc, "seed", "", cfg.seed);
  if (doc.contains("schema")) {
    try {
      cfg.schema = parse_schema(doc["schema"].dump());
    } catch (const InputError& e) {
      throw InputError(std::string("synth config field 'schema': ") + e.what());
    }
  }
  read_field(doc, "homophily_strength", "", cfg.homophily_strength);
  read_field(doc, "pruning_strength", "", cfg.pruning_strength);
  read_field(doc, "triadic_strength", "", cfg.triadic_strength);
  read_field(doc, "base_formation_rate", "", cfg.base_formation_rate);
  read_field(doc, "base_dissolution_rate", "", cfg.base_dissolution_rate);
  read_field(doc, "homophily_quantile", "", cfg.homophily_quantile);
  read_field(doc, "pruning_quantile", "", cfg.pruning_quantile);
  if (doc.contains("homophily_pivot") && !doc["homophily_pivot"].is_null()) {
    double v = 0;
    read_field(doc, "homophily_pivot", "", v);
    cfg.homophily_pivot = v;
  }
  if (doc.contains("pruning_pivot") && !doc["pruning_pivot"].is_null()) {
    double v = 0;
    read_field(doc, "pruning_pivot", "", v);
    cfg.pruning_pivot = v;
  }
  read_field(doc, "cn_cap", "", cfg.cn_cap);
  read_field(doc, "reformation_factor", "", cfg.reformation_factor);
  read_field(doc, "seed_density", "", cfg.seed_density);
  read_field(doc, "burn_in", "", cfg.burn_in);
  read_field(doc, "dropout_rate", "", cfg.dropout_rate);
  read_field(doc, "missing_rate", "", cfg.missing_rate);
  read_field(doc, "set_item_rate", "", cfg.set_item_rate);
  read_field(doc, "groups", "", cfg.groups);
  read_field(doc, "group_affinity", "", cfg.group_affinity);
  if (doc.contains("contact")) {
    const auto& c = doc["contact"];
    reject_unknown(c,
                   {"threshold", "extra_mean_persisting", "extra_mean_dissolving",
                    "call_fraction", "background_pairs_per_node"},
                   "contact.");
    read_field(c, "threshold", "contact.", cfg.contact.threshold);
    read_field(c, "extra_mean_persisting", "contact.", cfg.contact.extra_mean_persisting);
    read_field(c, "extra_mean_dissolving", "contact.", cfg.contact.extra_mean_dissolving);
    read_field(c, "call_fraction", "contact.", cfg.contact.call_fraction);
    read_field(c, "background_pairs_per_node", "contact.", cfg.contact.background_pairs_per_node);
  }
  if (doc.contains("nominations")) {
    const auto& c = doc["nominations"];
    reject_unknown(c, {"nomination_rate", "mutual_rate"}, "nominations.");
    read_field(c, "nomination_rate", "nominations.", cfg.nominations.nomination_rate);
    read_field(c, "mutual_rate", "nominations.", cfg.nominations.mutual_rate);
  }
  cfg.validate();
  return cfg;
}

SynthConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open synth config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

ordered_json config_json(const SynthConfig& cfg) {
  ordered_json j;
  j["n_nodes"] = cfg.n_nodes;
  j["n_semesters"] = cfg.n_semesters;
  j["seed"] = cfg.seed;
  j["homophily_strength"] = cfg.homophily_strength;
  j["pruning_strength"] = cfg.pruning_strength;
  j["triadic_strength"] = cfg.triadic_strength;
  j["base_formation_rate"] = cfg.base_formation_rate;
  j["base_dissolution_rate"] = cfg.base_dissolution_rate;
  j["homophily_quantile"] = cfg.homophily_quantile;
  j["pruning_quantile"] = cfg.pruning_quantile;
  j["homophily_pivot"] = nullptr;
  if (cfg.homophily_pivot) j["homophily_pivot"] = *cfg.homophily_pivot;
  j["pruning_pivot"] = nullptr;
  if (cfg.pruning_pivot) j["pruning_pivot"] = *cfg.pruning_pivot;
  j["cn_cap"] = cfg.cn_cap;
  j["reformation_factor"] = cfg.reformation_factor;
  j["seed_density"] = cfg.seed_density;
  j["burn_in"] = cfg.burn_in;
  j["dropout_rate"] = cfg.dropout_rate;
  j["missing_rate"] = cfg.missing_rate;
  j["set_item_rate"] = cfg.set_item_rate;
  j["groups"] = cfg.groups;
  j["group_affinity"] = cfg.group_affinity;
  j["contact"] = {{"threshold", cfg.contact.threshold},
                  {"extra_mean_persisting", cfg.contact.extra_mean_persisting},
                  {"extra_mean_dissolving", cfg.contact.extra_mean_dissolving},
                  {"call_fraction", cfg.contact.call_fraction},
                  {"background_pairs_per_node", cfg.contact.background_pairs_per_node}};
  j["nominations"] = {{"nomination_rate", cfg.nominations.nomination_rate},
                      {"mutual_rate", cfg.nominations.mutual_rate}};
  j["schema"] = ordered_json::parse(schema_to_json(cfg.schema));
  return j;
}

}  // namespace

std::string config_to_json(const SynthConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

enum Stream : std::uint64_t { kStructure = 1, kAttributes = 2, kContacts = 3, kNominations = 4 };

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

AttributeValue draw_value(const AttributeKind& kind, double set_item_rate, Rng& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  return std::visit(
      [&](const auto& k) -> AttributeValue {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Binary>) {
          return std::int64_t{u01(rng) < 0.5 ? 0 : 1};
        } else if constexpr (std::is_same_v<K, Categorical>) {
          return std::uniform_int_distribution<std::int64_t>(0, k.categories - 1)(rng);
        } else if constexpr (std::is_same_v<K, Ordinal>) {
          return std::uniform_int_distribution<std::int64_t>(k.min, k.max)(rng);
        } else {
          ItemSet items;
          for (const auto& item : k.universe) {
            if (u01(rng) < set_item_rate) items.push_back(item);
          }
          return items;
        }
      },
      kind);
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Undirected simple graph on dense indices 0..n-1.
class WorkGraph {
 public:
  explicit WorkGraph(std::size_t n) : n_(n), adj_(n * n, 0), nbr_(n) {}
  bool has(std::size_t i, std::size_t j) const { return adj_[i * n_ + j] != 0; }
  void set(std::size_t i, std::size_t j, bool on) {
    adj_[i * n_ + j] = adj_[j * n_ + i] = on ? 1 : 0;
  }
  void rebuild_neighbors() {
    for (std::size_t i = 0; i < n_; ++i) {
      nbr_[i].clear();
      for (std::size_t j = 0; j < n_; ++j) {
        if (adj_[i * n_ + j]) nbr_[i].push_back(j);
      }
    }
  }
  std::size_t common(std::size_t i, std::size_t j) const {
    const auto& a = nbr_[i];
    std::size_t c = 0;
    for (const auto k : a) c += adj_[j * n_ + k];
    return c;
  }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return nbr_[i]; }

 private:
  std::size_t n_;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<std::size_t>> nbr_;
};

struct PairAgreement {
  std::size_t n;
  std::vector<double> a;  // row-major upper triangle stored densely
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

Timestamp random_time(const Semester& s, Rng& rng) {
  using namespace std::chrono;
  const auto start = sys_days{s.start}.time_since_epoch();
  const auto end = (sys_days{s.end} + days{1}).time_since_epoch();
  const auto span = duration_cast<seconds>(end - start).count();
  std::uniform_int_distribution<long long> pick(0, span - 1);
  return Timestamp{duration_cast<seconds>(start) + seconds{pick(rng)}};
}

}  // namespace

SynthWorld generate(const SynthConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(cfg.n_nodes);
  const auto& schema = cfg.schema;
  const double m = static_cast<double>(schema.size());

  SynthWorld w;
  w.config = cfg;
  w.calendar = cfg.n_semesters == 4 ? SemesterCalendar::netsense()
                                    : SemesterCalendar::academic(2011, cfg.n_semesters);

  Rng rs(derive_seed(cfg.seed, kStructure));
  Rng ra(derive_seed(cfg.seed, kAttributes));
  Rng rc(derive_seed(cfg.seed, kContacts));
  Rng rn(derive_seed(cfg.seed, kNominations));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = NodeId{i + 1};

  // static profiles, optionally pulled towards a latent group prototype
  std::vector<std::vector<AttributeValue>> prototypes(static_cast<std::size_t>(cfg.groups));
  for (auto& proto : prototypes) {
    for (const auto& attr : schema.attributes()) {
      proto.push_back(draw_value(attr.kind, cfg.set_item_rate, ra));
    }
  }
  std::vector<Profile> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i].node = ids[i];
    const auto* proto =
        prototypes.empty()
            ? nullptr
            : &prototypes[std::uniform_int_distribution<std::size_t>(0, prototypes.size() - 1)(ra)];
    for (std::size_t k = 0; k < schema.size(); ++k) {
      const bool missing = cfg.missing_rate > 0 && u01(ra) < cfg.missing_rate;
      const bool copy = proto && u01(ra) < cfg.group_affinity;
      auto v = draw_value(schema[k].kind, cfg.set_item_rate, ra);
      if (copy) v = (*proto)[k];
      base[i].values.push_back(missing ? AttributeValue{Missing{}} : std::move(v));
    }
  }

  PairAgreement agree{n, std::vector<double>(n * n, 0.0)};
  std::vector<double> all_pairs;
  all_pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = total_agreement(agreement_vector(schema, base[i], base[j])) / m;
      agree.a[i * n + j] = agree.a[j * n + i] = a;
      all_pairs.push_back(a);
    }
  }
  w.homophily_pivot = cfg.homophily_pivot.value_or(quantile(all_pairs, cfg.homophily_quantile));
  w.pruning_pivot = cfg.pruning_pivot.value_or(quantile(all_pairs, cfg.pruning_quantile));

  double expected_density = 0.0;
  for (const double a : all_pairs) {
    expected_density +=
        clamp01(cfg.base_formation_rate + cfg.homophily_strength * (a - w.homophily_pivot));
  }
  expected_density /= static_cast<double>(all_pairs.size());
  if (expected_density > 0.5) {
    throw InputError(fmt::format(
        "synth config yields expected formation density {:.3f} > 0.5; lower "
        "base_formation_rate or homophily_strength",
        expected_density));
  }

  WorkGraph g(n);
  std::vector<std::uint8_t> ever(n * n, 0);  // pair has been an edge
  std::vector<bool> alive(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u01(rs) < cfg.seed_density) g.set(i, j, true);
    }
  }
  g.rebuild_neighbors();

  const double cn_cap = static_cast<double>(cfg.cn_cap);
  auto transition = [&](bool record, int semester) {
    TransitionSummary ts;
    ts.semester = semester;
    std::vector<bool> stays = alive;
    if (record) {
      for (std::size_t i = 0; i < n; ++i) {
        if (alive[i] && u01(rs) < cfg.dropout_rate) {
          stays[i] = false;
          ++ts.departed_nodes;
        }
      }
    }
    WorkGraph next(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (std::size_t j = i + 1; j < n; ++j) {
        if (!alive[j]) continue;
        const bool edge = g.has(i, j);
        if (!stays[i] || !stays[j]) {
          ts.edges_lost_to_departure += edge;
          continue;
        }
        const double draw = u01(rs);
        const double a = agree.at(i, j);
        if (edge) {
          const double pd =
              clamp01(cfg.base_dissolution_rate - cfg.pruning_strength * (a - w.pruning_pivot));
          const bool dissolved = draw < pd;
          if (record) {
            w.dissolutions.push_back({semester, make_pair_canonical(ids[i], ids[j]), a, pd, dissolved});
          }
          if (dissolved) {
            ++ts.dissolved;
          } else {
            ++ts.persisted;
            next.set(i, j, true);
          }
        } else {
          ++ts.candidates;
          const double cn = std::min(static_cast<double>(g.common(i, j)), cn_cap) / cn_cap;
          double pf = clamp01(cfg.base_formation_rate +
                              cfg.homophily_strength * (a - w.homophily_pivot) +
                              cfg.triadic_strength * cn);
          if (ever[i * n + j]) pf *= cfg.reformation_factor;
          if (draw < pf) {
            ++ts.formed;
            next.set(i, j, true);
          }
        }
      }
    }
    next.rebuild_neighbors();
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto j : g.neighbors(i)) ever[i * n + j] = 1;
    }
    g = std::move(next);
    alive = std::move(stays);
    if (record) w.transitions.push_back(ts);
  };

  for (int b = 0; b < cfg.burn_in; ++b) transition(false, 0);

  // edge sets and rosters per semester
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges;
  std::vector<std::vector<std::size_t>> roster;
  for (int s = 0; s < cfg.n_semesters; ++s) {
    if (s > 0) transition(true, w.calendar.semesters()[static_cast<std::size_t>(s - 1)].index);
    std::vector<std::pair<std::size_t, std::size_t>> es;
    std::vector<std::size_t> r;
    for (std::size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      r.push_back(i);
      for (const auto j : g.neighbors(i)) {
        if (j > i) es.emplace_back(i, j);
      }
    }
    edges.push_back(std::move(es));
    roster.push_back(std::move(r));
  }

  // profiles and rosters
  for (int s = 0; s < cfg.n_semesters; ++s) {
    const int sem = w.calendar.semesters()[static_cast<std::size_t>(s)].index;
    auto& r = w.rosters[sem];
    for (const auto i : roster[static_cast<std::size_t>(s)]) {
      r.insert(ids[i]);
      Profile p = base[i];
      p.semester = sem;
      w.profiles.add(schema, std::move(p));
    }
  }

  // contact log
  const auto& cc = cfg.contact;
  for (int s = 0; s < cfg.n_semesters; ++s) {
    const auto& sem = w.calendar.semesters()[static_cast<std::size_t>(s)];
    std::set<std::pair<std::size_t, std::size_t>> next_edges;
    if (s + 1 < cfg.n_semesters) {
      next_edges.insert(edges[static_cast<std::size_t>(s + 1)].begin(),
                        edges[static_cast<std::size_t>(s + 1)].end());
    }
    auto emit = [&](std::size_t i, std::size_t j, std::uint64_t events) {
      for (std::uint64_t e = 0; e < events; ++e) {
        ContactRecord rec;
        rec.timestamp = random_time(sem, rc);
        const bool forward = u01(rc) < 0.5;
        rec.sender = forward ? ids[i] : ids[j];
        rec.receiver = forward ? ids[j] : ids[i];
        const bool call = u01(rc) < cc.call_fraction;
        rec.kind = call ? ContactKind::Call : ContactKind::Text;
        rec.magnitude = call ? std::round(1.0 + std::exponential_distribution<double>(1.0 / 120.0)(rc))
                             : std::round(1.0 + std::exponential_distribution<double>(1.0 / 40.0)(rc));
        w.contacts.push_back(rec);
      }
    };
    for (const auto& [i, j] : edges[static_cast<std::size_t>(s)]) {
      const bool last = s + 1 == cfg.n_semesters;
      const bool persists = last || next_edges.contains({i, j});
      const double mean = persists ? cc.extra_mean_persisting : cc.extra_mean_dissolving;
      const std::uint64_t extra = mean > 0 ? std::poisson_distribution<std::uint64_t>(mean)(rc) : 0;
      emit(i, j, static_cast<std::uint64_t>(cc.threshold) + extra);
    }
    // sub-threshold background contacts between non-adjacent roster members
    const auto& r = roster[static_cast<std::size_t>(s)];
    std::set<std::pair<std::size_t, std::size_t>> current(edges[static_cast<std::size_t>(s)].begin(),
                                                          edges[static_cast<std::size_t>(s)].end());
    const auto pairs = static_cast<std::size_t>(std::llround(cc.background_pairs_per_node *
                                                             static_cast<double>(r.size())));
    std::set<std::pair<std::size_t, std::size_t>> used;
    if (r.size() >= 2 && cc.threshold > 1) {
      std::uniform_int_distribution<std::size_t> pick(0, r.size() - 1);
      std::uniform_int_distribution<int> count(1, cc.threshold - 1);
      for (std::size_t k = 0; k < pairs; ++k) {
        auto i = r[pick(rc)];
        auto j = r[pick(rc)];
        const int events = count(rc);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        if (current.contains({i, j}) || !used.insert({i, j}).second) continue;
        emit(i, j, static_cast<std::uint64_t>(events));
      }
    }
  }
  std::stable_sort(w.contacts.begin(), w.contacts.end(),
                   [](const ContactRecord& a, const ContactRecord& b) {
                     return std::tie(a.timestamp, a.sender, a.receiver) <
                            std::tie(b.timestamp, b.sender, b.receiver);
                   });

  // nominations derived from activity edges
  for (int s = 0; s < cfg.n_semesters; ++s) {
    const int sem = w.calendar.semesters()[static_cast<std::size_t>(s)].index;
    for (const auto& [i, j] : edges[static_cast<std::size_t>(s)]) {
      if (u01(rn) >= cfg.nominations.nomination_rate) continue;
      const bool mutual = u01(rn) < cfg.nominations.mutual_rate;
      const bool forward = u01(rn) < 0.5;
      if (mutual || forward) w.nominations.push_back({sem, ids[i], ids[j]});
      if (mutual || !forward) w.nominations.push_back({sem, ids[j], ids[i]});
    }
  }

  ActivityOptions aopts;
  aopts.threshold = cc.threshold;
  w.activity = build_activity_network(w.contacts, w.calendar, aopts, &w.rosters);
  w.friendship = attach_contact_counts(
      build_friendship_network(w.nominations, w.calendar, w.rosters), w.contacts);

  // the contact log must reproduce the planted structure exactly
  for (int s = 0; s < cfg.n_semesters; ++s) {
    const auto& snap = w.activity[static_cast<std::size_t>(s)];
    const auto& es = edges[static_cast<std::size_t>(s)];
    bool ok = snap.edge_count() == es.size() &&
              snap.node_count() == roster[static_cast<std::size_t>(s)].size();
    for (const auto& [i, j] : es) ok = ok && snap.has_edge(ids[i], ids[j]);
    if (!ok) throw Error(fmt::format("generated contact log does not reproduce semester {}", s + 1));
  }
  return w;
}

std::string describe(const SynthWorld& w) {
  ordered_json j;
  j["format"] = "netevo-synth-ground-truth";
  j["version"] = 1;
  j["parameters"] = config_json(w.config);
  j["parameters"].erase("schema");
  j["homophily_pivot"] = w.homophily_pivot;
  j["pruning_pivot"] = w.pruning_pivot;
  ordered_json sems = ordered_json::array();
  for (std::size_t s = 0; s < w.activity.size(); ++s) {
    const auto& a = w.activity[s];
    sems.push_back({{"semester", a.semester().index},
                    {"label", a.semester().label},
                    {"nodes", a.node_count()},
                    {"activity_edges", a.edge_count()},
                    {"friendship_edges", w.friendship[s].edge_count()}});
  }
  j["semesters"] = std::move(sems);
  ordered_json tr = ordered_json::array();
  for (const auto& t : w.transitions) {
    ordered_json e;
    e["semester"] = t.semester;
    e["departed_nodes"] = t.departed_nodes;
    e["edges_lost_to_departure"] = t.edges_lost_to_departure;
    e["candidates"] = t.candidates;
    e["formed"] = t.formed;
    e["dissolved"] = t.dissolved;
    e["persisted"] = t.persisted;
    tr.push_back(std::move(e));
  }
  j["transitions"] = std::move(tr);
  ordered_json dec = ordered_json::array();
  for (const auto& d : w.dissolutions) {
    dec.push_back({d.semester, d.pair.lo.value, d.pair.hi.value, d.agreement, d.probability,
                   d.dissolved ? 1 : 0});
  }
  j["dissolution_columns"] = {"semester", "node_u", "node_v", "agreement", "probability",
                              "dissolved"};
  j["dissolutions"] = std::move(dec);
  return j.dump(1) + "\n";
}

std::vector<std::filesystem::path> write_world(const SynthWorld& w,
                                               const std::filesystem::path& dir) {
  const auto& schema = w.config.schema;
  std::vector<std::filesystem::path> out{dir / "contacts.csv",    dir / "profiles.csv",
                                         dir / "nominations.csv", dir / "schema.json",
                                         dir / "calendar.json",   dir / "edges.csv",
                                         dir / "nodes.csv",       dir / "ground_truth.json"};
  write_contact_log(out[0], w.contacts);
  write_profiles(out[1], schema, w.profiles);
  write_nominations(out[2], w.nominations);
  csv::open_output(out[3]) << schema_to_json(schema);
  csv::open_output(out[4]) << calendar_to_json(w.calendar);
  write_snapshots(w.activity, out[5], out[6]);
  csv::open_output(out[7]) << describe(w);
  return out;
}

}  // namespace netevo::synth

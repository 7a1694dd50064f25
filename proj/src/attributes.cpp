#include "netevo/attributes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "netevo/csv.hpp"

namespace netevo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::string> numbered(const std::string& prefix, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(fmt::format("{}_{:02d}", prefix, i));
  return out;
}

std::string kind_name(const AttributeKind& k) {
  return std::visit(overloaded{[](const Binary&) { return std::string("binary"); },
                               [](const Categorical&) { return std::string("categorical"); },
                               [](const Ordinal&) { return std::string("ordinal"); },
                               [](const SetValued&) { return std::string("set"); }},
                    k);
}

}  // namespace

void validate_kind(const AttributeKind& kind) {
  std::visit(overloaded{
                 [](const Binary&) {},
                 [](const Categorical& c) {
                   if (c.categories < 2) throw InputError("categorical attribute needs >= 2 categories");
                 },
                 [](const Ordinal& o) {
                   if (o.max <= o.min) throw InputError("ordinal attribute needs max > min");
                 },
                 [](const SetValued& s) {
                   if (s.universe.empty()) throw InputError("set attribute needs a non-empty universe");
                   if (!std::is_sorted(s.universe.begin(), s.universe.end()) ||
                       std::adjacent_find(s.universe.begin(), s.universe.end()) != s.universe.end()) {
                     throw InputError("set attribute universe must be sorted and unique");
                   }
                 }},
             kind);
}

AttributeSchema::AttributeSchema(std::vector<Attribute> attributes)
    : attributes_(std::move(attributes)) {
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    auto& a = attributes_[i];
    if (a.name.empty()) throw InputError(fmt::format("attribute {} has an empty name", i));
    if (a.label.empty()) a.label = a.name;
    validate_kind(a.kind);
    if (!by_name_.emplace(a.name, i).second) {
      throw InputError("duplicate attribute name '" + a.name + "'");
    }
  }
}

std::optional<std::size_t> AttributeSchema::find(const std::string& name) const {
  const auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

AttributeSchema AttributeSchema::default_schema() {
  const Ordinal view{1, 5};
  const Ordinal weekly_hours{0, 5};
  return AttributeSchema({
      {"major", "Major", Categorical{10}},
      {"talkative", "Is Talkative", Binary{}},
      {"outgoing", "Is Outgoing", Binary{}},
      {"enthusiastic", "Is Enthusiastic", Binary{}},
      {"parental_income", "Parental Income", Ordinal{1, 8}},
      {"race", "Race", Categorical{6}},
      {"religion", "Religion", Categorical{8}},
      {"political_views", "Political Views", Ordinal{1, 7}},
      {"abortion", "Views on Abortion", view},
      {"marijuana_legalization", "Views on Marijuana Legalization", view},
      {"homosexuality", "Views on Homosexuality", view},
      {"gay_marriage", "Views on Gay Marriage Legalization", view},
      {"premarital_sex", "Views on Pre Marital Sex", view},
      {"social_welfare", "Views on Social Welfare", view},
      {"social_security", "Views on Social Security", view},
      {"racial_equality", "Views on Equality", view},
      {"affirmative_action", "Views on Affirmative Action", view},
      {"hard_drinking", "Hard Drinking", Ordinal{0, 4}},
      {"time_studying", "Time Spent Studying", weekly_hours},
      {"time_partying", "Time Spent on Partying", weekly_hours},
      {"time_socializing", "Time Spent Socializing", weekly_hours},
      {"time_volunteering", "Time Spent on Volunteering", weekly_hours},
      {"time_campaigning", "Time Spent on Campaigning", weekly_hours},
      {"time_exercising", "Time Spent on Exercising", weekly_hours},
      {"time_college_clubs", "Time Spent at College Clubs", weekly_hours},
      {"classes_taken", "Classes Taken", SetValued{numbered("course", 24)}},
      {"clubs_joined", "Clubs Joined", SetValued{numbered("club", 16)}},
  });
}

AttributeSchema parse_schema(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("schema is not valid JSON: ") + e.what());
  }
  if (!doc.contains("attributes") || !doc["attributes"].is_array()) {
    throw InputError("schema must contain an 'attributes' array");
  }
  std::vector<Attribute> attrs;
  for (const auto& entry : doc["attributes"]) {
    try {
      Attribute a;
      a.name = entry.at("name").get<std::string>();
      a.label = entry.value("label", a.name);
      const auto kind = entry.at("kind").get<std::string>();
      if (kind == "binary") {
        a.kind = Binary{};
      } else if (kind == "categorical") {
        a.kind = Categorical{entry.at("categories").get<int>()};
      } else if (kind == "ordinal") {
        a.kind = Ordinal{entry.at("min").get<int>(), entry.at("max").get<int>()};
      } else if (kind == "set") {
        auto universe = entry.at("universe").get<std::vector<std::string>>();
        std::sort(universe.begin(), universe.end());
        a.kind = SetValued{std::move(universe)};
      } else {
        throw InputError("attribute '" + a.name + "' has unknown kind '" + kind + "'");
      }
      attrs.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("malformed schema entry: ") + e.what());
    }
  }
  return AttributeSchema(std::move(attrs));
}

AttributeSchema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open schema file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_schema(ss.str());
}

std::string schema_to_json(const AttributeSchema& schema) {
  nlohmann::ordered_json attrs = nlohmann::ordered_json::array();
  for (const auto& a : schema.attributes()) {
    nlohmann::ordered_json e;
    e["name"] = a.name;
    e["label"] = a.label;
    e["kind"] = kind_name(a.kind);
    std::visit(overloaded{[](const Binary&) {},
                          [&](const Categorical& c) { e["categories"] = c.categories; },
                          [&](const Ordinal& o) {
                            e["min"] = o.min;
                            e["max"] = o.max;
                          },
                          [&](const SetValued& s) { e["universe"] = s.universe; }},
               a.kind);
    attrs.push_back(std::move(e));
  }
  nlohmann::ordered_json doc;
  doc["attributes"] = std::move(attrs);
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

void validate_value(const AttributeKind& kind, const AttributeValue& value) {
  if (is_missing(value)) return;
  std::visit(
      overloaded{
          [&](const Binary&) {
            const auto* v = std::get_if<std::int64_t>(&value);
            if (!v || (*v != 0 && *v != 1)) throw InputError("binary value must be 0 or 1");
          },
          [&](const Categorical& c) {
            const auto* v = std::get_if<std::int64_t>(&value);
            if (!v || *v < 0 || *v >= c.categories) {
              throw InputError(fmt::format("categorical value must be in [0, {})", c.categories));
            }
          },
          [&](const Ordinal& o) {
            const auto* v = std::get_if<std::int64_t>(&value);
            if (!v || *v < o.min || *v > o.max) {
              throw InputError(fmt::format("ordinal value must be in [{}, {}]", o.min, o.max));
            }
          },
          [&](const SetValued& s) {
            const auto* v = std::get_if<ItemSet>(&value);
            if (!v) throw InputError("set attribute needs a set value");
            for (const auto& item : *v) {
              if (!std::binary_search(s.universe.begin(), s.universe.end(), item)) {
                throw InputError("set item '" + item + "' is outside the attribute universe");
              }
            }
          }},
      kind);
}

AttributeValue parse_value(const AttributeKind& kind, const std::string& text) {
  const auto t = csv::trim(text);
  if (t.empty()) return Missing{};
  AttributeValue value;
  if (std::holds_alternative<SetValued>(kind)) {
    ItemSet items;
    for (auto& item : csv::split(t, ';')) {
      if (!item.empty()) items.push_back(std::move(item));
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    value = std::move(items);
  } else {
    value = csv::parse_int(t, "attribute value");
  }
  validate_value(kind, value);
  return value;
}

std::string format_value(const AttributeValue& value) {
  return std::visit(overloaded{[](const Missing&) { return std::string(); },
                               [](std::int64_t v) { return std::to_string(v); },
                               [](const ItemSet& s) { return csv::join(s, ';'); }},
                    value);
}

Profile missing_profile(const AttributeSchema& schema, NodeId node, int semester) {
  return Profile{node, semester, std::vector<AttributeValue>(schema.size(), Missing{})};
}

void ProfileTable::add(const AttributeSchema& schema, Profile p) {
  if (p.values.size() != schema.size()) {
    throw InputError(fmt::format("profile for node {} has {} values, schema has {}",
                                 p.node.value, p.values.size(), schema.size()));
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    try {
      validate_value(schema[i].kind, p.values[i]);
    } catch (const InputError& e) {
      throw InputError(fmt::format("node {}, attribute '{}': {}", p.node.value, schema[i].name,
                                   e.what()));
    }
  }
  const auto key = std::make_pair(p.semester, p.node);
  profiles_.insert_or_assign(key, std::move(p));
}

const Profile* ProfileTable::find(int semester, NodeId node) const {
  const auto it = profiles_.find({semester, node});
  return it == profiles_.end() ? nullptr : &it->second;
}

std::set<NodeId> ProfileTable::roster(int semester) const {
  std::set<NodeId> out;
  for (auto it = profiles_.lower_bound({semester, NodeId{0}});
       it != profiles_.end() && it->first.first == semester; ++it) {
    out.insert(it->first.second);
  }
  return out;
}

std::set<int> ProfileTable::semesters() const {
  std::set<int> out;
  for (const auto& [key, p] : profiles_) out.insert(key.first);
  return out;
}

ProfileTable read_profiles(const std::filesystem::path& path, const AttributeSchema& schema) {
  csv::LineReader reader(path);
  reader.expect_header({"semester", "node", "attr_name", "value"}, true);
  std::map<std::pair<int, NodeId>, Profile> partial;
  std::string line;
  while (reader.next(line)) {
    const auto where = fmt::format("{}:{}", path.string(), reader.line_number());
    auto f = csv::split(line);
    if (f.size() == 3) f.emplace_back();  // trailing empty value = Missing
    if (f.size() != 4) throw InputError(where + ": expected 4 fields");
    const int sem = static_cast<int>(csv::parse_int(f[0], "semester"));
    const NodeId node{csv::parse_uint(f[1], "node")};
    const auto idx = schema.find(f[2]);
    if (!idx) throw InputError(where + ": unknown attribute '" + f[2] + "'");
    auto [it, inserted] = partial.try_emplace({sem, node}, missing_profile(schema, node, sem));
    try {
      it->second.values[*idx] = parse_value(schema[*idx].kind, f[3]);
    } catch (const InputError& e) {
      throw InputError(where + ": attribute '" + f[2] + "': " + e.what());
    }
  }
  ProfileTable table;
  for (auto& [key, p] : partial) table.add(schema, std::move(p));
  return table;
}

void write_profiles(const std::filesystem::path& path, const AttributeSchema& schema,
                    const ProfileTable& profiles) {
  auto out = csv::open_output(path);
  out << "semester,node,attr_name,value\n";
  for (const auto& [key, p] : profiles.all()) {
    for (std::size_t i = 0; i < schema.size(); ++i) {
      out << p.semester << ',' << p.node.value << ',' << schema[i].name << ','
          << format_value(p.values[i]) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------

double agreement(const AttributeKind& kind, const AttributeValue& a, const AttributeValue& b,
                 double neutral) {
  if (is_missing(a) || is_missing(b)) return neutral;
  validate_value(kind, a);
  validate_value(kind, b);
  return std::visit(
      overloaded{[&](const Binary&) { return std::get<std::int64_t>(a) == std::get<std::int64_t>(b) ? 1.0 : 0.0; },
                 [&](const Categorical&) {
                   return std::get<std::int64_t>(a) == std::get<std::int64_t>(b) ? 1.0 : 0.0;
                 },
                 [&](const Ordinal& o) {
                   const auto diff = std::abs(std::get<std::int64_t>(a) - std::get<std::int64_t>(b));
                   return 1.0 - static_cast<double>(diff) / static_cast<double>(o.max - o.min);
                 },
                 [&](const SetValued&) {
                   const auto& x = std::get<ItemSet>(a);
                   const auto& y = std::get<ItemSet>(b);
                   std::size_t common = 0;
                   auto i = x.begin();
                   auto j = y.begin();
                   while (i != x.end() && j != y.end()) {
                     if (*i < *j) {
                       ++i;
                     } else if (*j < *i) {
                       ++j;
                     } else {
                       ++common;
                       ++i;
                       ++j;
                     }
                   }
                   const auto uni = x.size() + y.size() - common;
                   return uni == 0 ? 1.0 : static_cast<double>(common) / static_cast<double>(uni);
                 }},
      kind);
}

Eigen::VectorXd agreement_vector(const AttributeSchema& schema, const Profile& a,
                                 const Profile& b, const AgreementOptions& opts) {
  if (a.values.size() != schema.size() || b.values.size() != schema.size()) {
    throw Error("profile length does not match schema");
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(schema.size()));
  for (std::size_t i = 0; i < schema.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) =
        agreement(schema[i].kind, a.values[i], b.values[i], opts.neutral);
  }
  return out;
}

double total_agreement(const Eigen::VectorXd& agreements, const AgreementOptions& opts) {
  if (opts.total == TotalMode::Hard) {
    return static_cast<double>((agreements.array() >= opts.hard_threshold).count());
  }
  return agreements.sum();
}

Eigen::VectorXd EdgeFeatureVector::flatten() const {
  Eigen::VectorXd out(size());
  out << agreements, common_neighbors, total_agreement;
  return out;
}

EdgeFeatureVector edge_features(const AttributeSchema& schema, const Profile& pu,
                                const Profile& pv, const Snapshot& snap,
                                const AgreementOptions& opts) {
  const int sem = snap.semester().index;
  if (pu.semester != sem || pv.semester != sem) {
    throw Error(fmt::format("profiles for semesters {} and {} do not match snapshot semester {}",
                            pu.semester, pv.semester, sem));
  }
  EdgeFeatureVector f;
  f.agreements = agreement_vector(schema, pu, pv, opts);
  f.common_neighbors = static_cast<double>(common_neighbors(snap, pu.node, pv.node));
  f.total_agreement = total_agreement(f.agreements, opts);
  return f;
}

std::vector<std::string> feature_names(const AttributeSchema& schema) {
  std::vector<std::string> out;
  for (const auto& a : schema.attributes()) out.push_back(a.name);
  out.emplace_back(kCommonNeighborsFeature);
  out.emplace_back(kTotalAgreementFeature);
  return out;
}

std::vector<std::string> feature_labels(const AttributeSchema& schema) {
  std::vector<std::string> out;
  for (const auto& a : schema.attributes()) out.push_back(a.label);
  out.emplace_back("Number of Common Neighbors");
  out.emplace_back("Number of Common Traits");
  return out;
}

}  // namespace netevo

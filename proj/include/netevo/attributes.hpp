#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "netevo/core.hpp"
#include "netevo/graph.hpp"

namespace netevo {

// ---------------------------------------------------------------------------
// Schema
// ---------------------------------------------------------------------------

struct Binary {
  friend bool operator==(const Binary&, const Binary&) = default;
};
struct Categorical {
  int categories = 2;
  friend bool operator==(const Categorical&, const Categorical&) = default;
};
struct Ordinal {
  int min = 0;
  int max = 1;
  friend bool operator==(const Ordinal&, const Ordinal&) = default;
};
struct SetValued {
  std::vector<std::string> universe;  // sorted, unique
  friend bool operator==(const SetValued&, const SetValued&) = default;
};

using AttributeKind = std::variant<Binary, Categorical, Ordinal, SetValued>;

/// Throws InputError if the kind's parameters are invalid
/// (Categorical < 2 categories, Ordinal max <= min, empty/duplicate universe).
void validate_kind(const AttributeKind& kind);

struct Attribute {
  std::string name;
  std::string label;  // human-readable name for reports
  AttributeKind kind;
};

/// Ordered attribute list. Names are unique.
class AttributeSchema {
 public:
  AttributeSchema() = default;
  explicit AttributeSchema(std::vector<Attribute> attributes);

  std::size_t size() const { return attributes_.size(); }
  const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
  const std::vector<Attribute>& attributes() const { return attributes_; }
  std::optional<std::size_t> find(const std::string& name) const;

  /// 27 attributes covering background, views and habits; the three
  /// behavioral traits are separate binary attributes.
  static AttributeSchema default_schema();

 private:
  std::vector<Attribute> attributes_;
  std::map<std::string, std::size_t> by_name_;
};

/// JSON: {"attributes": [{"name": ..., "label": ..., "kind": "binary" |
/// "categorical" | "ordinal" | "set", "categories": n, "min": a, "max": b,
/// "universe": [...]}, ...]}
AttributeSchema parse_schema(const std::string& json_text);
AttributeSchema load_schema(const std::filesystem::path& path);
std::string schema_to_json(const AttributeSchema& schema);

// ---------------------------------------------------------------------------
// Values and profiles
// ---------------------------------------------------------------------------

struct Missing {
  friend bool operator==(const Missing&, const Missing&) = default;
};
using ItemSet = std::vector<std::string>;  // sorted, unique
using AttributeValue = std::variant<Missing, std::int64_t, ItemSet>;

inline bool is_missing(const AttributeValue& v) { return std::holds_alternative<Missing>(v); }

/// Throws InputError when a non-missing value does not conform to `kind`.
void validate_value(const AttributeKind& kind, const AttributeValue& value);

/// Empty text is Missing; set-valued items are `;`-joined.
AttributeValue parse_value(const AttributeKind& kind, const std::string& text);
std::string format_value(const AttributeValue& value);

struct Profile {
  NodeId node;
  int semester = 0;
  std::vector<AttributeValue> values;  // one per schema attribute
};

/// All-Missing profile, used for participants without a survey response.
Profile missing_profile(const AttributeSchema& schema, NodeId node, int semester);

/// Profiles keyed by (semester, node).
class ProfileTable {
 public:
  /// Validates the profile against the schema and inserts or replaces it.
  void add(const AttributeSchema& schema, Profile p);

  const Profile* find(int semester, NodeId node) const;
  /// Nodes with a profile in `semester`.
  std::set<NodeId> roster(int semester) const;
  std::set<int> semesters() const;
  std::size_t size() const { return profiles_.size(); }
  const std::map<std::pair<int, NodeId>, Profile>& all() const { return profiles_; }

 private:
  std::map<std::pair<int, NodeId>, Profile> profiles_;
};

/// CSV `semester,node,attr_name,value`. Unknown attribute names and
/// non-conforming values are InputErrors.
ProfileTable read_profiles(const std::filesystem::path& path, const AttributeSchema& schema);
void write_profiles(const std::filesystem::path& path, const AttributeSchema& schema,
                    const ProfileTable& profiles);

// ---------------------------------------------------------------------------
// Agreement and edge features
// ---------------------------------------------------------------------------

enum class TotalMode : std::uint8_t { Soft, Hard };

struct AgreementOptions {
  double neutral = 0.5;        // agreement when either side is Missing
  TotalMode total = TotalMode::Soft;
  double hard_threshold = 0.5;  // Hard mode counts entries >= threshold
};

/// Agreement in [0, 1]: equality for binary/categorical, 1 - |a-b|/(max-min)
/// for ordinal, Jaccard for sets (1 when both empty).
double agreement(const AttributeKind& kind, const AttributeValue& a, const AttributeValue& b,
                 double neutral = 0.5);

Eigen::VectorXd agreement_vector(const AttributeSchema& schema, const Profile& a,
                                 const Profile& b, const AgreementOptions& opts = {});

double total_agreement(const Eigen::VectorXd& agreements, const AgreementOptions& opts = {});

struct EdgeFeatureVector {
  Eigen::VectorXd agreements;
  double common_neighbors = 0.0;
  double total_agreement = 0.0;

  Eigen::Index size() const { return agreements.size() + 2; }
  /// [agreements..., common_neighbors, total_agreement]
  Eigen::VectorXd flatten() const;
};

EdgeFeatureVector edge_features(const AttributeSchema& schema, const Profile& pu,
                                const Profile& pv, const Snapshot& snap,
                                const AgreementOptions& opts = {});

inline constexpr const char* kCommonNeighborsFeature = "common_neighbors";
inline constexpr const char* kTotalAgreementFeature = "total_agreement";

/// Attribute names followed by the two structural/aggregate features.
std::vector<std::string> feature_names(const AttributeSchema& schema);
std::vector<std::string> feature_labels(const AttributeSchema& schema);

}  // namespace netevo

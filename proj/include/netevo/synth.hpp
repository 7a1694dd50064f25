#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "netevo/attributes.hpp"
#include "netevo/graph.hpp"
#include "netevo/ingest.hpp"

namespace netevo::synth {

struct ContactConfig {
  int threshold = 5;                 // every edge gets at least this many events
  double extra_mean_persisting = 30.0;  // Poisson mean of events above the threshold
  double extra_mean_dissolving = 8.0;
  double call_fraction = 0.3;
  double background_pairs_per_node = 0.5;  // sub-threshold contact pairs per semester
};

struct NominationConfig {
  double nomination_rate = 0.6;  // share of activity edges that are friendships
  double mutual_rate = 0.5;      // share of friendships nominated both ways
};

/// Formation of a non-edge: clamp(base_f + h (a - pivot_h) + c cn_norm).
/// Dissolution of an edge:  clamp(base_d - p (a - pivot_p)).
/// a = total agreement / schema size; cn_norm = min(cn, cn_cap) / cn_cap.
/// Pivots default to quantiles of a over all node pairs. Pairs that were
/// connected before form with their probability scaled by reformation_factor.
struct SynthConfig {
  int n_nodes = 200;
  int n_semesters = 4;
  std::uint64_t seed = 1;
  AttributeSchema schema = AttributeSchema::default_schema();

  double homophily_strength = 0.0;
  double pruning_strength = 0.0;
  double triadic_strength = 0.0;
  double base_formation_rate = 0.002;
  double base_dissolution_rate = 0.35;
  double homophily_quantile = 0.98;
  double pruning_quantile = 0.5;
  std::optional<double> homophily_pivot;  // overrides the quantile
  std::optional<double> pruning_pivot;
  int cn_cap = 5;
  double reformation_factor = 0.1;

  double seed_density = 0.005;
  int burn_in = 2;  // unrecorded transitions before the first semester
  double dropout_rate = 0.03;  // per node and transition
  double missing_rate = 0.0;   // per profile value
  double set_item_rate = 0.15;
  int groups = 0;                // latent groups with shared attribute prototypes
  double group_affinity = 0.0;   // chance a value is copied from the group prototype

  ContactConfig contact;
  NominationConfig nominations;

  /// Throws InputError naming the first invalid field.
  void validate() const;
};

/// Unknown keys and out-of-range values are InputErrors naming the field.
SynthConfig parse_config(const std::string& json_text);
SynthConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const SynthConfig& cfg);

struct DissolutionDecision {
  int semester = 0;  // t of the transition t -> t+1
  EdgePair pair;
  double agreement = 0.0;  // normalized total agreement
  double probability = 0.0;
  bool dissolved = false;
};

struct TransitionSummary {
  int semester = 0;
  std::size_t departed_nodes = 0;
  std::size_t edges_lost_to_departure = 0;
  std::size_t candidates = 0;  // non-edges between staying nodes
  std::size_t formed = 0;
  std::size_t dissolved = 0;
  std::size_t persisted = 0;
};

struct SynthWorld {
  SynthConfig config;
  SemesterCalendar calendar;
  ProfileTable profiles;
  Rosters rosters;
  std::vector<Snapshot> activity;    // one per semester, weights from the contact log
  std::vector<Snapshot> friendship;  // weights from the contact log
  std::vector<ContactRecord> contacts;
  std::vector<Nomination> nominations;
  double homophily_pivot = 0.0;
  double pruning_pivot = 0.0;
  std::vector<TransitionSummary> transitions;
  std::vector<DissolutionDecision> dissolutions;
};

/// Deterministic for a fixed config. Structure, attributes, contacts and
/// nominations use separate random streams derived from cfg.seed.
SynthWorld generate(const SynthConfig& cfg);

/// Ground-truth summary: planted parameters, pivots, per-transition counts
/// and every logged dissolution decision.
std::string describe(const SynthWorld& world);

/// Writes contacts.csv, profiles.csv, nominations.csv, schema.json,
/// calendar.json, edges.csv, nodes.csv and ground_truth.json.
std::vector<std::filesystem::path> write_world(const SynthWorld& world,
                                               const std::filesystem::path& dir);

}  // namespace netevo::synth

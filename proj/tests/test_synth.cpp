#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "netevo/eval.hpp"
#include "netevo/synth.hpp"
#include "support.hpp"

using namespace netevo;
using namespace netevo::synth;

namespace {

SynthConfig small(std::uint64_t seed) {
  SynthConfig c;
  c.n_nodes = 60;
  c.seed = seed;
  c.base_formation_rate = 0.01;
  return c;
}

/// Agreement (normalized) of every pair that formed, pooled over transitions.
std::vector<double> formed_agreements(const SynthWorld& w) {
  std::vector<double> out;
  const double m = static_cast<double>(w.config.schema.size());
  for (std::size_t s = 0; s + 1 < w.activity.size(); ++s) {
    const auto& t = w.activity[s];
    const auto& t1 = w.activity[s + 1];
    const int sem = t.semester().index;
    for (const auto& [e, wt] : t1.edges()) {
      if (!t.has_node(e.lo) || !t.has_node(e.hi) || t.has_edge(e.lo, e.hi)) continue;
      out.push_back(total_agreement(agreement_vector(w.config.schema, *w.profiles.find(sem, e.lo),
                                                     *w.profiles.find(sem, e.hi))) /
                    m);
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("generation is deterministic under a seed") {
  const auto a = generate(small(5));
  const auto b = generate(small(5));
  REQUIRE(a.activity.size() == b.activity.size());
  for (std::size_t s = 0; s < a.activity.size(); ++s) {
    CHECK(a.activity[s].edges() == b.activity[s].edges());
    CHECK(a.friendship[s].edges() == b.friendship[s].edges());
  }
  CHECK(a.contacts == b.contacts);
  CHECK(a.nominations == b.nominations);
  CHECK(describe(a) == describe(b));
  const auto c = generate(small(6));
  CHECK(describe(a) != describe(c));
}

TEST_CASE("invalid configurations name the offending field") {
  auto expect_field = [](const std::string& json, const std::string& field) {
    try {
      parse_config(json);
      FAIL("accepted " << json);
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  expect_field(R"({"n_nodes": 1})", "n_nodes");
  expect_field(R"({"n_semesters": 1})", "n_semesters");
  expect_field(R"({"base_formation_rate": 1.5})", "base_formation_rate");
  expect_field(R"({"homophily_strength": -1})", "homophily_strength");
  expect_field(R"({"colour": "blue"})", "colour");
  expect_field(R"({"contact": {"threshold": 0}})", "contact.threshold");
  CHECK_THROWS_AS(parse_config("[1, 2"), InputError);
  const auto cfg = parse_config(config_to_json(small(9)));
  CHECK(cfg.n_nodes == 60);
  CHECK(cfg.base_formation_rate == 0.01);
}

TEST_CASE("dense configurations are refused") {
  SynthConfig c = small(1);
  c.base_formation_rate = 0.9;
  CHECK_THROWS_AS(generate(c), InputError);
}

TEST_CASE("snapshots satisfy graph invariants and every edge meets the threshold") {
  SynthConfig c = small(7);
  c.homophily_strength = 2.0;
  c.triadic_strength = 0.3;
  const auto w = generate(c);
  for (const auto& s : w.activity) {
    std::size_t deg = 0;
    for (std::size_t i = 0; i < s.node_count(); ++i) deg += s.adjacency(i).size();
    CHECK(deg == 2 * s.edge_count());
    for (const auto& [e, wt] : s.edges()) {
      CHECK(e.lo < e.hi);
      CHECK(wt.total() >= static_cast<std::uint64_t>(c.contact.threshold));
    }
  }
}

TEST_CASE("without planted mechanisms formation ignores agreement") {
  std::vector<double> formed, other;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig c;
    c.seed = seed;
    const auto w = generate(c);
    for (std::size_t s = 0; s + 1 < w.activity.size(); ++s) {
      const auto& t = w.activity[s];
      const auto& t1 = w.activity[s + 1];
      const int sem = t.semester().index;
      const auto shared = shared_nodes(t, t1);
      for (std::size_t a = 0; a < shared.size(); ++a) {
        for (std::size_t b = a + 1; b < shared.size(); ++b) {
          const auto cls = classify_edge(t, t1, shared[a], shared[b]);
          if (cls == EdgeClass::Existing) continue;
          const double v = total_agreement(agreement_vector(
              c.schema, *w.profiles.find(sem, shared[a]), *w.profiles.find(sem, shared[b])));
          (cls == EdgeClass::ToBeFormed ? formed : other).push_back(v);
        }
      }
    }
  }
  const auto f = summarize(formed);
  const auto n = summarize(other);
  REQUIRE(f.n > 100);
  const double gap = (*f.mean - *n.mean) / std::sqrt(*f.se * *f.se + *n.se * *n.se);
  CHECK(std::abs(gap) < 2.0);
}

TEST_CASE("saturating homophily forms only above-median pairs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SynthConfig c;
    c.seed = seed;
    c.homophily_strength = 1000.0;
    c.base_formation_rate = 0.001;
    const auto w = generate(c);
    const double m = static_cast<double>(c.schema.size());
    for (std::size_t s = 0; s + 1 < w.activity.size(); ++s) {
      const auto& t = w.activity[s];
      const auto& t1 = w.activity[s + 1];
      const int sem = t.semester().index;
      const auto shared = shared_nodes(t, t1);
      std::vector<double> formed, rest;
      for (std::size_t a = 0; a < shared.size(); ++a) {
        for (std::size_t b = a + 1; b < shared.size(); ++b) {
          const auto cls = classify_edge(t, t1, shared[a], shared[b]);
          if (cls == EdgeClass::Existing) continue;
          const double v = total_agreement(agreement_vector(
                               c.schema, *w.profiles.find(sem, shared[a]),
                               *w.profiles.find(sem, shared[b]))) /
                           m;
          (cls == EdgeClass::ToBeFormed ? formed : rest).push_back(v);
        }
      }
      std::nth_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(rest.size() / 2),
                       rest.end());
      const double median = rest[rest.size() / 2];
      for (double v : formed) CHECK(v >= median);
    }
  }
}

TEST_CASE("raising homophily does not lower the agreement of formed edges") {
  // burn_in = 0 keeps the candidate pool of the first transition identical
  // across strengths, so only the formation kernel differs
  int up = 0, down = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig lo;
    lo.seed = seed;
    lo.burn_in = 0;
    lo.n_semesters = 2;
    lo.seed_density = 0.02;
    lo.triadic_strength = 0.2;
    lo.homophily_strength = 0.5;
    lo.homophily_quantile = 0.8;
    SynthConfig hi = lo;
    hi.homophily_strength = 3.0;
    const double a = mean(formed_agreements(generate(lo)));
    const double b = mean(formed_agreements(generate(hi)));
    up += b > a;
    down += b < a;
  }
  // one-sided sign test, P(X >= 15 | n = 20, 1/2) < 0.021
  CHECK(up >= 15);
  CHECK(down <= 5);
}

TEST_CASE("with no pruning dissolution is uncorrelated with agreement") {
  std::vector<double> a, d;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    SynthConfig c;
    c.seed = seed;
    c.homophily_strength = 1.0;
    const auto w = generate(c);
    for (const auto& dec : w.dissolutions) {
      a.push_back(dec.agreement);
      d.push_back(dec.dissolved ? 1.0 : 0.0);
      CHECK(dec.probability == doctest::Approx(c.base_dissolution_rate));
    }
  }
  REQUIRE(a.size() >= 500);
  const double ma = mean(a), md = mean(d);
  double sab = 0, saa = 0, sdd = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (d[i] - md);
    saa += (a[i] - ma) * (a[i] - ma);
    sdd += (d[i] - md) * (d[i] - md);
  }
  CHECK(std::abs(sab / std::sqrt(saa * sdd)) < 0.1);
}

TEST_CASE("ground truth summary agrees with the generated world") {
  SynthConfig c = small(11);
  c.homophily_strength = 1.0;
  c.pruning_strength = 0.5;
  const auto w = generate(c);
  const auto j = nlohmann::json::parse(describe(w));
  CHECK(j["parameters"]["homophily_strength"] == 1.0);
  CHECK(j["parameters"]["pruning_strength"] == 0.5);
  CHECK(j["parameters"]["n_nodes"] == 60);
  CHECK(j["parameters"]["seed"] == 11);
  REQUIRE(j["transitions"].size() == w.activity.size() - 1);
  for (std::size_t s = 0; s + 1 < w.activity.size(); ++s) {
    const auto& t = w.activity[s];
    const auto& t1 = w.activity[s + 1];
    std::size_t formed = 0, dissolved = 0;
    const auto shared = shared_nodes(t, t1);
    for (std::size_t a = 0; a < shared.size(); ++a) {
      for (std::size_t b = a + 1; b < shared.size(); ++b) {
        formed += classify_edge(t, t1, shared[a], shared[b]) == EdgeClass::ToBeFormed;
        if (t.has_edge(shared[a], shared[b])) {
          dissolved += classify_persistence(t, t1, shared[a], shared[b]) ==
                       PersistenceClass::Dissolving;
        }
      }
    }
    CHECK(j["transitions"][s]["formed"] == formed);
    CHECK(j["transitions"][s]["dissolved"] == dissolved);
  }
}

TEST_CASE("written files ingest back to the generated snapshots") {
  SynthConfig c = small(13);
  c.homophily_strength = 1.0;
  c.triadic_strength = 0.2;
  const auto w = generate(c);
  testsupport::TempDir dir("synth_rt");
  const auto files = write_world(w, dir.path());
  for (const auto& f : files) CHECK(std::filesystem::exists(f));

  const auto contacts = parse_contact_log(dir / "contacts.csv", {true});
  const auto noms = parse_nominations(dir / "nominations.csv", {true});
  const auto profiles = read_profiles(dir / "profiles.csv", c.schema);
  const auto cal = load_calendar(dir / "calendar.json");
  CHECK(contacts.records == w.contacts);
  CHECK(noms.records == w.nominations);
  CHECK(profiles.size() == w.profiles.size());

  Rosters rosters;
  for (int sem : profiles.semesters()) rosters[sem] = profiles.roster(sem);
  ActivityOptions opts;
  opts.threshold = static_cast<std::uint64_t>(c.contact.threshold);
  const auto act = build_activity_network(contacts.records, cal, opts, &rosters);
  REQUIRE(act.size() == w.activity.size());
  for (std::size_t s = 0; s < act.size(); ++s) {
    CHECK(act[s].nodes() == w.activity[s].nodes());
    CHECK(act[s].edges() == w.activity[s].edges());
  }
  const auto fr = attach_contact_counts(
      build_friendship_network(noms.records, cal, rosters), contacts.records);
  for (std::size_t s = 0; s < fr.size(); ++s) CHECK(fr[s].edges() == w.friendship[s].edges());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "netevo/eval.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace netevo;

TEST_CASE("metrics match the brute-force confusion matrix") {
  Rng rng(71);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = std::uniform_int_distribution<std::size_t>(1, 50)(rng);
    std::bernoulli_distribution coin(trial % 3 == 0 ? 0.05 : 0.4);
    std::vector<Label> pred, truth;
    for (std::size_t i = 0; i < n; ++i) {
      pred.push_back(label_from_bool(coin(rng)));
      truth.push_back(label_from_bool(coin(rng)));
    }
    const auto want = oracle::confusion(pred, truth);
    const auto m = metrics(pred, truth);
    REQUIRE(m.counts == want);
    CHECK(m.accuracy == static_cast<double>(want.tp + want.tn) / static_cast<double>(n));
    if (want.tp + want.fn == 0) {
      CHECK(m.recall_undefined);
      CHECK(m.recall == 0.0);
    } else {
      CHECK(m.recall == static_cast<double>(want.tp) / static_cast<double>(want.tp + want.fn));
    }
  }
  CHECK_THROWS_AS(metrics(std::vector<Label>{}, std::vector<Label>{}), InputError);
  CHECK_THROWS_AS(metrics(std::vector<Label>{Label::Positive}, std::vector<Label>{}), InputError);
}

TEST_CASE("summaries report the mean and standard error") {
  const auto s = summarize({1.0, 2.0, 3.0, 6.0});
  CHECK(s.n == 4);
  CHECK(*s.mean == doctest::Approx(3.0));
  CHECK(*s.se == doctest::Approx(std::sqrt(14.0 / 3.0) / 2.0));
  const auto one = summarize({5.0});
  CHECK(*one.mean == 5.0);
  CHECK_FALSE(one.se.has_value());
  const auto none = summarize({});
  CHECK(none.n == 0);
  CHECK_FALSE(none.mean.has_value());
}

TEST_CASE("edge class statistics match exhaustive enumeration") {
  const auto schema = AttributeSchema::default_schema();
  Rng rng(72);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<Snapshot> snaps;
    for (int s = 1; s <= 3; ++s) snaps.push_back(testsupport::random_snapshot(rng, 18, 0.2, s, 0.9));
    const auto profiles = testsupport::random_profiles(schema, rng, snaps);
    const auto stats = edge_class_stats(snaps, profiles, schema);
    REQUIRE(stats.cells.size() == 6);
    for (int t = 0; t < 2; ++t) {
      const auto& a = snaps[static_cast<std::size_t>(t)];
      const auto& b = snaps[static_cast<std::size_t>(t + 1)];
      std::array<std::vector<double>, 3> total, cn;
      for (auto u : a.nodes()) {
        for (auto v : a.nodes()) {
          if (!(u < v) || !b.has_node(u) || !b.has_node(v)) continue;
          const int cls = a.has_edge(u, v) ? 0 : (b.has_edge(u, v) ? 1 : 2);
          const auto ag = agreement_vector(schema, *profiles.find(t + 1, u), *profiles.find(t + 1, v));
          total[static_cast<std::size_t>(cls)].push_back(ag.sum());
          cn[static_cast<std::size_t>(cls)].push_back(
              static_cast<double>(oracle::common_neighbors(a, u, v)));
        }
      }
      for (auto cls : kEdgeClasses) {
        const auto& cell = stats.at(t + 1, cls);
        const auto i = static_cast<std::size_t>(cls);
        CHECK(cell.total_agreement.n == total[i].size());
        const auto want_total = summarize(total[i]);
        const auto want_cn = summarize(cn[i]);
        if (want_total.mean) {
          CHECK(*cell.total_agreement.mean == doctest::Approx(*want_total.mean));
          CHECK(*cell.common_neighbors.mean == doctest::Approx(*want_cn.mean));
        }
        CHECK(cell.per_attribute.size() == schema.size());
      }
    }
  }
}

TEST_CASE("communication statistics split edges by persistence") {
  const auto cal = SemesterCalendar::academic(2011, 2);
  SnapshotBuilder a(cal.at_index(1)), b(cal.at_index(2));
  a.add_edge(NodeId{1}, NodeId{2}, {10, 20}).add_edge(NodeId{2}, NodeId{3}, {2, 4});
  a.add_edge(NodeId{1}, NodeId{3}, {6, 0});
  b.add_edge(NodeId{1}, NodeId{2}).add_node(NodeId{3});
  const std::vector<Snapshot> snaps{a.build(), b.build()};
  const auto stats = comm_stats(snaps, {});
  const auto& keep = stats.at("activity", 1, PersistenceClass::Persisting);
  const auto& drop = stats.at("activity", 1, PersistenceClass::Dissolving);
  CHECK(keep.calls.n == 1);
  CHECK(*keep.calls.mean == 10.0);
  CHECK(*keep.texts.mean == 20.0);
  CHECK(*keep.common_neighbors.mean == 1.0);
  CHECK(drop.calls.n == 2);
  CHECK(*drop.calls.mean == 4.0);
  CHECK(*drop.texts.mean == 2.0);
  CHECK_THROWS_AS(stats.at("friendship", 1, PersistenceClass::Persisting), Error);
}

TEST_CASE("report emission is deterministic and complete") {
  const auto schema = AttributeSchema::default_schema();
  Rng rng(73);
  std::vector<Snapshot> snaps;
  for (int s = 1; s <= 3; ++s) snaps.push_back(testsupport::random_snapshot(rng, 15, 0.2, s));
  const auto profiles = testsupport::random_profiles(schema, rng, snaps);
  Report r;
  for (const auto& s : snaps) {
    r.sizes.push_back({"activity", s.semester().index, s.semester().label, s.node_count(),
                       s.edge_count()});
  }
  r.class_stats = edge_class_stats(snaps, profiles, schema);
  r.comm = comm_stats(snaps, snaps);
  Metrics m;
  m.accuracy = 0.75;
  m.recall = 0.5;
  r.formation.push_back({"Logistic Regression", "no_svd", m});
  r.persistence.push_back({"Logistic Regression", "top_2", m});
  RankingReport rk;
  rk.feature_names = feature_names(schema);
  rk.feature_labels = feature_labels(schema);
  rk.ranking = spectral::rank_with_basis(Eigen::MatrixXd::Identity(29, 29),
                                         Eigen::VectorXd::LinSpaced(29, -1.0, 1.0));
  rk.k = 29;
  rk.classifier = "Logistic Regression";
  r.formation_ranking = rk;
  r.notes.push_back("synthetic");

  testsupport::TempDir d1("report_a"), d2("report_b");
  emit_report(r, d1.path());
  emit_report(r, d2.path());
  for (const char* name : {"tableI.csv", "fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "fig5.csv",
                           "fig6.csv", "fig7.csv", "fig8_13.csv", "tableII.csv", "tableIII.csv",
                           "tableIV.csv", "tableV.csv", "summary.txt"}) {
    CAPTURE(name);
    REQUIRE(std::filesystem::exists(d1 / name));
    CHECK(testsupport::slurp(d1 / name) == testsupport::slurp(d2 / name));
  }
  const auto t3 = testsupport::slurp(d1 / "tableIII.csv");
  CHECK(t3.find("Number of Common Traits") != std::string::npos);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "netevo/attributes.hpp"
#include "support.hpp"

using namespace netevo;

using testsupport::random_profile;

TEST_CASE("default schema has 27 named attributes and 29 features") {
  const auto s = AttributeSchema::default_schema();
  CHECK(s.size() == 27);
  const auto names = feature_names(s);
  REQUIRE(names.size() == 29);
  CHECK(names[27] == kCommonNeighborsFeature);
  CHECK(names[28] == kTotalAgreementFeature);
  const auto labels = feature_labels(s);
  CHECK(labels[27] == "Number of Common Neighbors");
  CHECK(labels[28] == "Number of Common Traits");
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.find(s[i].name) == i);
    CHECK_NOTHROW(validate_kind(s[i].kind));
  }
}

TEST_CASE("schema JSON round-trips and rejects bad kinds") {
  const auto s = AttributeSchema::default_schema();
  const auto back = parse_schema(schema_to_json(s));
  REQUIRE(back.size() == s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(back[i].name == s[i].name);
    CHECK(back[i].label == s[i].label);
    CHECK(back[i].kind == s[i].kind);
  }
  CHECK_THROWS_AS(parse_schema(R"({"attributes":[{"name":"a","kind":"categorical","categories":1}]})"),
                  InputError);
  CHECK_THROWS_AS(parse_schema(R"({"attributes":[{"name":"a","kind":"ordinal","min":3,"max":3}]})"),
                  InputError);
  CHECK_THROWS_AS(parse_schema(R"({"attributes":[{"name":"a","kind":"binary"},{"name":"a","kind":"binary"}]})"),
                  InputError);
  CHECK_THROWS_AS(parse_schema("not json"), InputError);
}

TEST_CASE("agreement per kind") {
  const double neutral = 0.5;
  CHECK(agreement(Binary{}, std::int64_t{1}, std::int64_t{1}) == 1.0);
  CHECK(agreement(Binary{}, std::int64_t{0}, std::int64_t{1}) == 0.0);
  CHECK(agreement(Categorical{4}, std::int64_t{2}, std::int64_t{2}) == 1.0);
  CHECK(agreement(Categorical{4}, std::int64_t{2}, std::int64_t{3}) == 0.0);
  CHECK(agreement(Ordinal{1, 5}, std::int64_t{1}, std::int64_t{5}) == 0.0);
  CHECK(agreement(Ordinal{1, 5}, std::int64_t{2}, std::int64_t{3}) == doctest::Approx(0.75));
  const SetValued sv{{"a", "b", "c", "d"}};
  CHECK(agreement(sv, ItemSet{"a", "b"}, ItemSet{"b", "c"}) == doctest::Approx(1.0 / 3.0));
  CHECK(agreement(sv, ItemSet{}, ItemSet{}) == 1.0);
  CHECK(agreement(sv, ItemSet{"a"}, ItemSet{}) == 0.0);
  CHECK(agreement(Binary{}, Missing{}, std::int64_t{1}, neutral) == neutral);
  CHECK(agreement(Ordinal{0, 3}, std::int64_t{1}, Missing{}, 0.25) == 0.25);
  CHECK_THROWS_AS(agreement(Binary{}, std::int64_t{2}, std::int64_t{1}), InputError);
  CHECK_THROWS_AS(agreement(sv, ItemSet{"z"}, ItemSet{}), InputError);
}

TEST_CASE("agreement is symmetric, bounded and 1 on identical profiles") {
  const auto s = AttributeSchema::default_schema();
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_profile(s, rng, NodeId{1}, 1);
    const auto b = random_profile(s, rng, NodeId{2}, 1);
    const auto ab = agreement_vector(s, a, b);
    const auto ba = agreement_vector(s, b, a);
    CHECK(ab.isApprox(ba));
    CHECK(ab.minCoeff() >= 0.0);
    CHECK(ab.maxCoeff() <= 1.0);
    const auto aa = agreement_vector(s, a, a);
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double want = is_missing(a.values[i]) ? 0.5 : 1.0;
      CHECK(aa(static_cast<Eigen::Index>(i)) == want);
    }
  }
}

TEST_CASE("soft and hard totals") {
  Eigen::VectorXd v(4);
  v << 1.0, 0.5, 0.25, 0.0;
  CHECK(total_agreement(v) == doctest::Approx(1.75));
  AgreementOptions hard;
  hard.total = TotalMode::Hard;
  CHECK(total_agreement(v, hard) == 2.0);
  hard.hard_threshold = 0.9;
  CHECK(total_agreement(v, hard) == 1.0);
}

TEST_CASE("edge features flatten in feature-name order") {
  const auto s = AttributeSchema::default_schema();
  Rng rng(22);
  SnapshotBuilder b(testsupport::semester(1));
  b.add_edge(NodeId{1}, NodeId{3}).add_edge(NodeId{2}, NodeId{3}).add_edge(NodeId{1}, NodeId{4});
  b.add_edge(NodeId{2}, NodeId{4}).add_edge(NodeId{1}, NodeId{5});
  const auto snap = b.build();
  const auto pu = random_profile(s, rng, NodeId{1}, 1);
  const auto pv = random_profile(s, rng, NodeId{2}, 1);
  const auto f = edge_features(s, pu, pv, snap);
  const auto flat = f.flatten();
  REQUIRE(flat.size() == 29);
  CHECK(flat.head(27).isApprox(agreement_vector(s, pu, pv)));
  CHECK(flat(27) == 2.0);
  CHECK(flat(28) == doctest::Approx(f.agreements.sum()));
}

TEST_CASE("value parsing and profile tables round-trip") {
  const auto s = AttributeSchema::default_schema();
  Rng rng(23);
  ProfileTable table;
  for (int sem = 1; sem <= 2; ++sem) {
    for (std::uint64_t n = 1; n <= 12; ++n) table.add(s, random_profile(s, rng, NodeId{n * 5}, sem));
  }
  testsupport::TempDir dir("profiles_rt");
  write_profiles(dir / "p.csv", s, table);
  const auto back = read_profiles(dir / "p.csv", s);
  REQUIRE(back.size() == table.size());
  for (const auto& [key, p] : table.all()) {
    const auto* q = back.find(key.first, key.second);
    REQUIRE(q != nullptr);
    CHECK(q->values == p.values);
  }
  CHECK(back.roster(1).size() == 12);
  CHECK(back.semesters() == std::set<int>{1, 2});

  CHECK(is_missing(parse_value(Binary{}, "")));
  CHECK(parse_value(SetValued{{"x", "y"}}, "y;x") == AttributeValue{ItemSet{"x", "y"}});
  CHECK_THROWS_AS(parse_value(Ordinal{1, 3}, "7"), InputError);
  CHECK_THROWS_AS(parse_value(Binary{}, "yes"), InputError);
}

TEST_CASE("profile files with unknown attributes are rejected") {
  const auto s = AttributeSchema::default_schema();
  testsupport::TempDir dir("profiles_bad");
  {
    std::ofstream out(dir / "p.csv");
    out << "semester,node,attr_name,value\n1,4,shoe_size,3\n";
  }
  CHECK_THROWS_AS(read_profiles(dir / "p.csv", s), InputError);
  {
    std::ofstream out(dir / "q.csv");
    out << "sem,node,attr,value\n";
  }
  CHECK_THROWS_AS(read_profiles(dir / "q.csv", s), InputError);
}

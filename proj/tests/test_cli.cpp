#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include <nlohmann/json.hpp>

#include "netevo/cli.hpp"
#include "netevo/synth.hpp"
#include "support.hpp"

using namespace netevo;
namespace fs = std::filesystem;
using testsupport::slurp;
using testsupport::TempDir;

namespace {

const char* const kReport[] = {"tableI.csv", "fig1.csv",     "fig2.csv",    "fig3.csv",
                               "fig4.csv",   "fig5.csv",     "fig6.csv",    "fig7.csv",
                               "fig8_13.csv", "tableII.csv", "tableIII.csv", "tableIV.csv",
                               "tableV.csv", "summary.txt"};

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

/// Synthesizes one world through the CLI per test binary.
const fs::path& world() {
  static TempDir dir("cli_world");
  static const fs::path data = [] {
    synth::SynthConfig c;
    c.homophily_strength = 1.0;
    c.triadic_strength = 0.3;
    c.pruning_strength = 0.5;
    write_text(dir / "synth.json", synth::config_to_json(c));
    const auto out = dir / "data";
    REQUIRE(cli::run({"synth", "--config", (dir / "synth.json").string(), "--seed", "3", "--out",
                      out.string()}) == 0);
    return out;
  }();
  return data;
}

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) n += !line.empty() && line[0] != '#';
  return n - 1;  // header
}

}  // namespace

TEST_CASE("sha256 of known content") {
  TempDir d("cli_sha");
  write_text(d / "abc", "abc");
  CHECK(cli::sha256_file(d / "abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("synth writes a complete world and manifest") {
  const auto& data = world();
  for (const auto* f : {"contacts.csv", "profiles.csv", "nominations.csv", "schema.json",
                        "calendar.json", "edges.csv", "nodes.csv", "ground_truth.json"}) {
    CHECK(fs::is_regular_file(data / f));
  }
  const auto m = read_json(data / "manifest.json");
  CHECK(m["format"] == "netevo-manifest");
  CHECK(m["command"] == "synth");
  CHECK(m["status"] == "complete");
  CHECK(m["seed"] == 3);
  CHECK(m["config"]["n_nodes"] == 200);
  CHECK(m["outputs"].size() == 8);
  const auto truth = read_json(data / "ground_truth.json");
  CHECK(truth["parameters"]["seed"] == 3);
}

TEST_CASE("pipeline grid, manifest and determinism") {
  const auto& data = world();
  TempDir d("cli_pipeline");
  const std::vector<std::string> base{"pipeline", "--data", data.string(), "--classifiers",
                                      "logreg,knn", "--k", "2,15", "--seed", "7"};
  auto with_out = [&](const fs::path& out) {
    auto a = base;
    a.insert(a.end(), {"--out", out.string()});
    return a;
  };
  REQUIRE(cli::run(with_out(d / "a")) == 0);
  REQUIRE(cli::run(with_out(d / "b")) == 0);
  REQUIRE(cli::run({"pipeline", "--config", (d / "a" / "manifest.json").string(), "--out",
                    (d / "c").string()}) == 0);

  // two classifiers times (no_svd + two projections)
  CHECK(data_rows(d / "a" / "tableII.csv") == 6);
  CHECK(data_rows(d / "a" / "tableIV.csv") == 6);
  CHECK(data_rows(d / "a" / "tableIII.csv") == 29);
  for (const auto* f : kReport) {
    CAPTURE(f);
    CHECK(slurp(d / "a" / f) == slurp(d / "b" / f));
    CHECK(slurp(d / "a" / f) == slurp(d / "c" / f));
  }

  const auto m = read_json(d / "a" / "manifest.json");
  CHECK(m["status"] == "complete");
  CHECK(m["command"] == "pipeline");
  CHECK(m["seed"] == 7);
  CHECK(m["config"]["k"] == nlohmann::json::array({2, 15}));
  CHECK(m["outputs"].size() == std::size(kReport));
  REQUIRE(m["inputs"].size() >= 3);
  for (const auto& in : m["inputs"]) {
    const fs::path p = in["path"].get<std::string>();
    CHECK(in["sha256"] == cli::sha256_file(p));
    CHECK(in["bytes"] == fs::file_size(p));
  }
  auto replay = read_json(d / "c" / "manifest.json");
  replay["config"].erase("out");
  auto orig = m;
  orig["config"].erase("out");
  CHECK(replay["config"] == orig["config"]);
}

TEST_CASE("dataset, train, eval and rank chain") {
  const auto& data = world();
  TempDir d("cli_chain");
  const auto ds = d / "ds", model = d / "model", ev = d / "eval", rk = d / "rank";
  REQUIRE(cli::run({"dataset", "--data", data.string(), "--out", ds.string()}) == 0);
  REQUIRE(cli::run({"train", "--dataset", (ds / "train.csv").string(), "--classifier", "logreg",
                    "--k", "15", "--out", model.string()}) == 0);
  REQUIRE(cli::run({"eval", "--model", (model / "model.json").string(), "--dataset",
                    (ds / "test.csv").string(), "--out", ev.string()}) == 0);
  REQUIRE(cli::run({"rank", "--model", (model / "model.json").string(), "--out", rk.string()}) ==
          0);
  CHECK(data_rows(ds / "dataset.csv") == data_rows(ds / "train.csv") + data_rows(ds / "test.csv"));
  const auto met = read_json(ev / "metrics.json");
  CHECK(met["rows"] == data_rows(ds / "test.csv"));
  CHECK(met["accuracy"].get<double>() >= 0.0);
  CHECK(data_rows(ev / "predictions.csv") == data_rows(ds / "test.csv"));
  CHECK(data_rows(rk / "ranking.csv") == 29);

  // a non-linear model cannot be ranked
  REQUIRE(cli::run({"train", "--dataset", (ds / "train.csv").string(), "--classifier",
                    "naive_bayes", "--out", (d / "nb").string()}) == 0);
  CHECK(cli::run({"rank", "--model", (d / "nb" / "model.json").string(), "--out",
                  (d / "nbrank").string()}) == 2);
}

TEST_CASE("configuration and input errors exit with code 2") {
  const auto& data = world();
  TempDir d("cli_errors");
  write_text(d / "bad_seed.json", R"({"seed": -4})");
  write_text(d / "unknown.json", R"({"colour": "red"})");
  write_text(d / "broken.json", R"({"seed": )");
  write_text(d / "bad_synth.json", R"({"n_nodes": 1})");
  const auto out = (d / "out").string();

  CHECK(cli::run({"pipeline", "--config", (d / "bad_seed.json").string(), "--data", data.string(),
                  "--out", out}) == 2);
  CHECK(cli::run({"pipeline", "--config", (d / "unknown.json").string(), "--data", data.string(),
                  "--out", out}) == 2);
  CHECK(cli::run({"pipeline", "--config", (d / "broken.json").string(), "--out", out}) == 2);
  CHECK(cli::run({"synth", "--config", (d / "bad_synth.json").string(), "--out", out}) == 2);
  CHECK(cli::run({"stats", "--data", data.string(), "--out", out, "--threshold", "0"}) == 2);
  CHECK(cli::run({"dataset", "--data", data.string(), "--out", out, "--max-hops", "1"}) == 2);
  CHECK(cli::run({"pipeline", "--data", data.string(), "--out", out, "--classifiers", "perceptron"}) ==
        2);
  CHECK(cli::run({"frobnicate"}) == 2);
  CHECK(cli::run({"stats", "--out", out}) == 2);

  const auto missing = d / "nowhere";
  CHECK(cli::run({"stats", "--data", missing.string(), "--out", out}) == 2);
  const auto m = read_json(d / "out" / "manifest.json");
  CHECK(m["status"] == "failed");
  CHECK(m["error"].get<std::string>().find("nowhere") != std::string::npos);
}

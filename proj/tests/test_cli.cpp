#include "commands.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("mlcd_cli_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mlcd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

const char* kTwoCliques =
    "1 a b\n1 a c\n1 b c\n1 d e\n1 d f\n1 e f\n1 c d\n"
    "2 a b\n2 a c\n2 b c\n2 d e\n2 d f\n2 e f\n";

}  // namespace

TEST_CASE("cli usage errors") {
  TempDir dir;
  write_file(dir / "g.txt", kTwoCliques);
  CHECK(run({"detect", "--input", dir / "g.txt", "--output", dir / "p.txt"}).code == 2);
  CHECK(run({"detect", "--input", dir / "g.txt", "--output", dir / "p.txt", "--seed", "1", "--measure", "bogus"}).code == 2);
  CHECK(run({"detect", "--input", dir / "missing.txt", "--output", dir / "p.txt", "--seed", "1"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli precondition failures exit with 3") {
  TempDir dir;
  write_file(dir / "g.txt", "1 a b\n2 c d\n");
  const auto r = run({"detect", "--input", dir / "g.txt", "--restrict", "cross-layer", "--output", dir / "p.txt",
                      "--seed", "1"});
  CHECK(r.code == 3);
  CHECK(!r.err.empty());
}

TEST_CASE("cli detect finds the cliques and reruns byte-identically") {
  TempDir dir;
  write_file(dir / "g.txt", kTwoCliques);
  for (const char* measure : {"mnavrg", "sdlocal", "sdratio"}) {
    const auto first = run({"detect", "--input", dir / "g.txt", "--measure", measure, "--seed", "5", "--output",
                            dir / "p1.txt", "--summary", dir / "s1.json"});
    REQUIRE(first.code == 0);
    const auto second = run({"detect", "--input", dir / "g.txt", "--measure", measure, "--seed", "5", "--output",
                             dir / "p2.txt", "--summary", dir / "s2.json", "--threads", "3"});
    REQUIRE(second.code == 0);
    CHECK(slurp(dir / "p1.txt") == slurp(dir / "p2.txt"));
    CHECK(slurp(dir / "s1.json") == slurp(dir / "s2.json"));
    const auto summary = nlohmann::json::parse(slurp(dir / "s1.json"));
    CHECK(summary["schema"] == "mlcd.detect/1");
    CHECK(summary["k_detected"] == 2);
  }
  const auto kl = run({"detect", "--input", dir / "g.txt", "--k", "2", "--measure", "dcmlsbm", "--seed", "5", "--output", dir / "kl.txt",
                       "--summary", "-"});
  REQUIRE(kl.code == 0);
  write_file(dir / "truth.txt", "a 1\nb 1\nc 1\nd 2\ne 2\nf 2\n");
  const auto ev = run({"eval", "--detected", dir / "kl.txt", "--truth", dir / "truth.txt"});
  REQUIRE(ev.code == 0);
  CHECK(nlohmann::json::parse(ev.out)["nmi"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("cli select-null reports the test") {
  TempDir dir;
  write_file(dir / "g.txt", kTwoCliques);
  const auto r = run({"select-null", "--input", dir / "g.txt", "--bootstrap", "20", "--seed", "3"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["B"] == 20);
  CHECK(doc["df"] == 5.0);
  const double p = doc["p_boot"];
  CHECK(p > 0.0);
  CHECK(p <= 1.0);
  CHECK((doc["recommended"] == "ID" || doc["recommended"] == "SD"));
  CHECK(run({"select-null", "--input", dir / "g.txt", "--bootstrap", "0", "--seed", "3"}).code == 2);
}

TEST_CASE("cli simulate, detect and eval pipeline") {
  TempDir dir;
  write_file(dir / "scenario.json",
             R"({"n": 90, "k": 3, "avg_degree": 18, "degree_mode": "shared",
                 "layers": [{"signal": "strong"}, {"signal": "strong"}]})");
  REQUIRE(run({"simulate", "--scenario", dir / "scenario.json", "--reps", "2", "--seed", "11", "--outdir",
               dir / "sim"}).code == 0);
  REQUIRE(run({"simulate", "--scenario", dir / "scenario.json", "--reps", "2", "--seed", "11", "--outdir",
               dir / "sim2"}).code == 0);
  CHECK(slurp(dir / "sim/rep_000.edges") == slurp(dir / "sim2/rep_000.edges"));
  CHECK(slurp(dir / "sim/manifest.json") == slurp(dir / "sim2/manifest.json"));
  CHECK(slurp(dir / "sim/rep_000.edges") != slurp(dir / "sim/rep_001.edges"));

  REQUIRE(run({"detect", "--input", dir / "sim/rep_000.edges", "--measure", "sdavrg", "--seed", "1", "--restarts",
               "3", "--output", dir / "p.txt"}).code == 0);
  const auto ev = run({"eval", "--detected", dir / "p.txt", "--truth", dir / "sim/rep_000.truth"});
  REQUIRE(ev.code == 0);
  const auto doc = nlohmann::json::parse(ev.out);
  CHECK(doc["schema"] == "mlcd.eval/1");
  CHECK(doc["nmi"].get<double>() > 0.5);

  REQUIRE(run({"degree-fit", "--input", dir / "sim/rep_000.edges", "--output", dir / "deg.csv", "--summary",
               dir / "deg.json"}).code == 0);
  CHECK(slurp(dir / "deg.csv").rfind("node,layer,observed,fitted,zero_degree\n", 0) == 0);
  REQUIRE(run({"aggregate", "--input", dir / "sim/rep_000.edges", "--output", dir / "agg.txt"}).code == 0);
  CHECK(!slurp(dir / "agg.txt").empty());
}

TEST_CASE("cli sweep writes one row per measure and replicate") {
  TempDir dir;
  write_file(dir / "scenario.json",
             R"({"n": 60, "k": 2, "avg_degree": 10, "layers": [{"signal": "strong"}, {"signal": "weak"}],
                 "axis": {"name": "avg_degree", "values": [10]}})");
  REQUIRE(run({"sweep", "--scenario", dir / "scenario.json", "--reps", "1", "--measures", "mnavrg,sdavrg,dcmlsbm",
               "--seed", "4", "--restarts", "2", "--outdir", dir / "out"}).code == 0);
  std::istringstream rows(slurp(dir / "out/replicates.csv"));
  std::string line;
  int count = -1;
  while (std::getline(rows, line)) ++count;
  CHECK(count == 3);
  const auto manifest = nlohmann::json::parse(slurp(dir / "out/manifest.json"));
  CHECK(manifest["schema"] == "mlcd.sweep/1");
}

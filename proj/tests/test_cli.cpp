#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "grs/cli.hpp"
#include "grs/metric.hpp"

using namespace grs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "grs_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& text) {
  fs::path p = scratch(name);
  std::ofstream(p) << text;
  return p.string();
}

std::string path3() {
  return write("path3.json", R"({
    "nodes": [{"id": "p0", "rm": 1}, {"id": "p1", "rm": 10}, {"id": "p2", "rm": 100}],
    "edges": [{"a": "p0", "b": "p1", "len": 0.99}, {"a": "p1", "b": "p2", "len": 0.99}]
  })");
}

}  // namespace

TEST_CASE("double and tensor") {
  auto r = run({"double", "--group", "[4,2]"});
  CHECK(r.code == 0);
  CHECK(r.doc()["direct_double"] == false);
  CHECK(r.doc()["command"] == "double");
  CHECK(r.doc().contains("anchors"));

  r = run({"double", "--group", "Dstar:2"});
  CHECK(r.code == 0);
  CHECK(r.doc()["direct_double"] == true);

  r = run({"tensor", "--group", "[2,2]", "-p", "2"});
  CHECK(r.code == 0);
}

TEST_CASE("obstruct") {
  fs::path trace = scratch("trace.json");
  auto r = run({"obstruct", "--gamma", "2I", "--trace", trace.string()});
  CHECK(r.code == 0);
  CHECK(r.doc()["verdict"]["verdict"] == "bounded-copies");
  std::ifstream in(trace);
  json t = json::parse(in);
  CHECK_FALSE(t.empty());

  CHECK(run({"obstruct", "--gamma", "Z:1"}).doc()["verdict"]["verdict"] == "inconclusive");
  CHECK(run({"obstruct", "--gamma", "Q8"}).code == 1);
}

TEST_CASE("usage and validation errors exit 1") {
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"double"}).code == 1);
  CHECK(run({"double", "--group", "[4,"}).code == 1);
  CHECK(run({"snf", "--matrix", write("ragged.json", "[[1,2],[3]]")}).code == 1);
  CHECK(run({"select", "--space", "/nonexistent.json", "--start", "p0"}).code == 1);
  CHECK(run({"feasible", "--group", "[8,2,2,2,2]", "--cap", "4"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("selection commands") {
  std::string space = path3();
  auto r = run({"select", "--space", space, "--start", "p0", "--a0", "2"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["certificate"]["x0"] == "p2");

  r = run({"sequence", "--space", space, "--starts", "p0,p1,p2"});
  REQUIRE(r.code == 0);

  CHECK(run({"select", "--space", space, "--start", "zz"}).code == 1);
}

TEST_CASE("growth commands on generated spaces") {
  fs::path cone = scratch("cone.json");
  REQUIRE(run({"--out", cone.string(), "gen", "--kind", "cone-field", "--c", "4", "--n", "5"}).code == 0);
  auto r = run({"growth", "--space", cone.string(), "--model", "quadratic"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["fit"]["C"] == 4.0);

  CHECK(run({"blowup", "--space", cone.string(), "--mode", "scale", "-k", "3"}).code == 0);
  CHECK(run({"blowup", "--space", cone.string(), "--mode", "abs", "-k", "0"}).code == 1);

  fs::path grid = scratch("grid.json");
  REQUIRE(run({"--out", grid.string(), "gen", "--kind", "grid4", "--n", "3", "--field", "constant", "--c", "0.05",
               "--vol"})
              .code == 0);
  r = run({"kappa", "--space", grid.string(), "--kappa", "0.1"});
  REQUIRE(r.code == 0);
  CHECK(r.doc()["kappa"]["pass"] == true);
}

TEST_CASE("output is deterministic") {
  for (std::vector<std::string> args : {std::vector<std::string>{"spaceform", "--family", "binary-dihedral", "--max-param", "6"},
                                        std::vector<std::string>{"feasible", "--group", "[2,2,4,4]"},
                                        std::vector<std::string>{"--seed", "7", "gen", "--kind", "random-geometric", "--n", "40"}}) {
    auto a = run(args), b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  CHECK(run({"--seed", "7", "gen", "--kind", "random-geometric", "--n", "40"}).out !=
        run({"--seed", "8", "gen", "--kind", "random-geometric", "--n", "40"}).out);
}

TEST_CASE("--out writes the report to a file") {
  fs::path p = scratch("snf.json");
  fs::remove(p);
  auto r = run({"--out", p.string(), "snf", "--matrix", write("m.json", "[[2,4],[6,8]]")});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(p);
  json j = json::parse(in);
  CHECK(j["command"] == "snf");
}

TEST_CASE("quotient cap precedence: flag > env > config > default") {
  std::string cfg = write("cfg.json", R"({"quotient_cap": 300})");
  auto cap = [](const Run& r) { return r.doc()["quotient_cap"].get<std::uint64_t>(); };

  ::unsetenv("GRS_QUOTIENT_CAP");
  CHECK(cap(run({"feasible", "--group", "[2,2]"})) == 1024);
  CHECK(cap(run({"--config", cfg, "feasible", "--group", "[2,2]"})) == 300);
  ::setenv("GRS_QUOTIENT_CAP", "200", 1);
  CHECK(cap(run({"--config", cfg, "feasible", "--group", "[2,2]"})) == 200);
  CHECK(cap(run({"--config", cfg, "--cap", "100", "feasible", "--group", "[2,2]"})) == 100);
  ::setenv("GRS_QUOTIENT_CAP", "many", 1);
  CHECK(run({"feasible", "--group", "[2,2]"}).code == 1);
  ::unsetenv("GRS_QUOTIENT_CAP");

  CHECK(run({"--config", write("bad.json", "{"), "feasible", "--group", "[2,2]"}).code == 1);
}

TEST_CASE("exact and copies") {
  std::string seq = write("seq.json", R"({
    "terms": [[], [2], [4], [2], []],
    "maps": [[], [[2]], [[1]], [[]]]
  })");
  auto r = run({"exact", "--sequence", seq});
  REQUIRE(r.code == 0);
  r = run({"copies", "--ambient", "[2,2]", "--coker", "[2]"});
  REQUIRE(r.code == 0);
  r = run({"copies", "--ambient", "[2,2]", "--coker", "[]"});
  REQUIRE(r.code == 0);
}

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mospline/cli.hpp"

using namespace mospline;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / ("mospline_cli_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("eval prints finite points") {
  const Run r = run({"eval", "fixture:hexagon", "--at", "0.0"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  REQUIRE(j["point"].size() == 2u);
  CHECK(std::isfinite(j["point"][0].get<double>()));
  CHECK(std::isfinite(j["point"][1].get<double>()));
}

TEST_CASE("eval at the open-curve start returns P_0") {
  const Run r = run({"eval", "fixture:bottle", "--at", "-0.7"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["point"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(j["point"][1].get<double>()) < 1e-13);
}

TEST_CASE("eval on surfaces takes two parameters") {
  Run r = run({"eval", "fixture:tunnel", "--at", "8,5"});
  REQUIRE(r.code == kExitOk);
  CHECK(json::parse(r.out)["point"].size() == 3u);
  r = run({"eval", "fixture:tunnel", "--at", "8"});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("classify labels the bottom hexagon edge") {
  const Run r = run({"classify", "fixture:hexagon"});
  REQUIRE(r.code == kExitOk);
  const json j = json::parse(r.out);
  CHECK(j["edges"][1]["from"] == 1);
  CHECK(j["edges"][1]["to"] == 2);
  CHECK(j["edges"][1]["class"] == "PartialStraight");
  CHECK(j["vertices"][4]["class"] == "Sharp");
  CHECK(run({"classify", "fixture:ring"}).code == kExitInvalidInput);
}

TEST_CASE("exit codes and error lines") {
  Run r = run({"eval", "fixture:bottle", "--at", "-5"});
  CHECK(r.code == kExitEvaluation);
  CHECK(r.out.empty());
  REQUIRE(!r.err.empty());
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
  CHECK(json::parse(r.err)["error"] == "out-of-domain");

  r = run({"frobnicate"});
  CHECK(r.code == kExitUsage);
  CHECK(json::parse(r.err)["error"] == "usage");

  r = run({});
  CHECK(r.code == kExitUsage);

  r = run({"eval", "fixture:hexagon"});
  CHECK(r.code == kExitUsage);

  r = run({"eval", "fixture:hexagon", "--at", "abc"});
  CHECK(r.code == kExitUsage);

  r = run({"eval", "fixture:nonesuch", "--at", "0"});
  CHECK(r.code == kExitInvalidInput);
  CHECK(json::parse(r.err)["error"] == "unknown-fixture");

  r = run({"eval", "/definitely/missing.json", "--at", "0"});
  CHECK(r.code == kExitInvalidInput);

  r = run({"--help"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("eval") != std::string::npos);
}

TEST_CASE("validate reports diagnostics") {
  const fs::path dir = temp_dir();
  const fs::path bad = dir / "bad.json";
  {
    std::ofstream f(bad);
    f << R"({"id":"bad","kind":"curve","metadata":{"name":"","created":"","modified":""},
            "payload":{"dimension":2,"order":4,"closed":false,"points":[[0,0],[1,0],[2,0]],"nodes":[0,5,6]}})";
  }
  Run r = run({"validate", bad.string()});
  CHECK(r.code == kExitInvalidInput);
  json j = json::parse(r.out);
  CHECK(j["valid"] == false);
  CHECK(j["diagnostics"][0]["code"] == "node-gap");
  CHECK(j["diagnostics"][0]["path"] == "nodes/1");

  r = run({"validate", "fixture:ring"});
  CHECK(r.code == kExitOk);
  j = json::parse(r.out);
  CHECK(j["valid"] == true);
  CHECK(j["diagnostics"].empty());

  const fs::path broken = dir / "broken.json";
  {
    std::ofstream f(broken);
    f << "{";
  }
  r = run({"validate", broken.string()});
  CHECK(r.code == kExitInvalidInput);
  CHECK(json::parse(r.err)["error"] == "parse-error");
}

TEST_CASE("fixture output feeds the other subcommands") {
  const fs::path dir = temp_dir();
  const fs::path file = dir / "poly.json";
  Run r = run({"fixture", "polygon20", "--param", "a=0.5", "-o", file.string()});
  REQUIRE(r.code == kExitOk);
  r = run({"eval", file.string(), "--at", "1.25"});
  CHECK(r.code == kExitOk);
  const Run direct = run({"eval", "fixture:polygon20?a=0.5", "--at", "1.25"});
  CHECK(r.out == direct.out);

  CHECK(run({"fixture", "polygon20", "--param", "a"}).code == kExitUsage);
  CHECK(run({"fixture", "polygon20", "--param", "zz=1"}).code == kExitInvalidInput);
}

TEST_CASE("tessellate and exports") {
  const fs::path dir = temp_dir();
  Run r = run({"tessellate", "fixture:hexagon", "--density", "4"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  CHECK(j["type"] == "polyline");
  CHECK(j["points"].size() == 24u);

  r = run({"tessellate", "fixture:ring", "--res", "8,12"});
  REQUIRE(r.code == kExitOk);
  j = json::parse(r.out);
  CHECK(j["positions"].size() == 96u);
  CHECK(j["quads"].size() == 96u);
  CHECK(run({"tessellate", "fixture:ring", "--res", "1,12"}).code == kExitUsage);

  const fs::path svg = dir / "hex.svg";
  CHECK(run({"export-svg", "fixture:hexagon", "-o", svg.string(), "--overlay"}).code == kExitOk);
  CHECK(slurp(svg).find("<svg") != std::string::npos);
  CHECK(run({"export-svg", "fixture:hexagon"}).code == kExitUsage);
  CHECK(run({"export-svg", "fixture:ring", "-o", svg.string()}).code == kExitInvalidInput);

  const fs::path obj = dir / "ring.obj";
  CHECK(run({"export-obj", "fixture:ring", "-o", obj.string(), "--res", "6,10"}).code == kExitOk);
  CHECK(slurp(obj).find("\nf ") != std::string::npos);
  CHECK(run({"export-obj", "fixture:hexagon", "-o", obj.string()}).code == kExitInvalidInput);
}

TEST_CASE("outputs are deterministic") {
  const fs::path dir = temp_dir();
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"eval", "fixture:tshape", "--at", "7.5"},
           {"classify", "fixture:tshape"},
           {"tessellate", "fixture:tunnel", "--res", "6,25"},
           {"fixture", "ring"},
           {"schema"}}) {
    const Run a = run(args);
    const Run b = run(args);
    CHECK(a.code == kExitOk);
    CHECK(a.out == b.out);
  }
  const fs::path one = dir / "a.obj", two = dir / "b.obj";
  run({"export-obj", "fixture:tunnel", "-o", one.string()});
  run({"export-obj", "fixture:tunnel", "-o", two.string()});
  CHECK(slurp(one) == slurp(two));
  const fs::path s1 = dir / "a.svg", s2 = dir / "b.svg";
  run({"export-svg", "fixture:bottle", "-o", s1.string(), "--overlay"});
  run({"export-svg", "fixture:bottle", "-o", s2.string(), "--overlay"});
  CHECK(slurp(s1) == slurp(s2));
}

TEST_CASE("schema subcommand") {
  const Run r = run({"schema"});
  CHECK(r.code == kExitOk);
  CHECK(r.out == model_schema());
}

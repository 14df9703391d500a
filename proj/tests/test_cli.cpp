#include "doctest.h"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "flexlp/io.hpp"
#include "test_util.hpp"

using namespace flexlp;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "flexlp_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("usage and flag errors") {
  CHECK(run({}).code == cli::kExitInput);
  CHECK(run({"--help"}).code == cli::kExitOk);
  const Run bad = run({"flex", test::data("two_squares.json"), "--bogus"});
  CHECK(bad.code == cli::kExitInput);
  CHECK(contains(bad.err, "Usage"));
  CHECK(run({"flex", test::data("two_squares.json"), "--eta", "-1", "--direction", "1,0"}).code == cli::kExitInput);
  CHECK(run({"flex", test::data("two_squares.json"), "--direction", "1;0"}).code == cli::kExitInput);
  CHECK(run({"flex", test::data("two_squares.json"), "--direction", "1,0", "--body", "nobody"}).code == cli::kExitInput);
}

TEST_CASE("validate") {
  const Run ok = run({"validate", test::data("jigsaw_3x3.json")});
  CHECK(ok.code == cli::kExitOk);
  CHECK(contains(ok.out, "valid scene"));
  CHECK(run({"validate", test::data("missing.json")}).code == cli::kExitInput);

  const fs::path overlap = scratch("overlap.json");
  std::string text = io::read_text(test::data("two_squares.json"));
  text.replace(text.find("1.05"), 4, "0.50");
  io::write_text(overlap, text);
  const Run pen = run({"validate", overlap.string()});
  CHECK(pen.code == cli::kExitInput);
  CHECK(contains(pen.err, "'A'"));
}

TEST_CASE("flex two squares moves A by the gap") {
  const fs::path trace = scratch("trace.json");
  const fs::path svg = scratch("flex.svg");
  fs::remove(svg);
  const Run r = run({"flex", test::data("two_squares.json"), "--direction", "1,0", "--body", "A", "--trace",
                     trace.string(), "--svg", svg.string()});
  REQUIRE(r.code == cli::kExitOk);
  CHECK(contains(r.out, "converged"));
  const nlohmann::json doc = nlohmann::json::parse(io::read_text(trace));
  CHECK(doc["final_poses"][0][0].get<double>() == doctest::Approx(0.05).epsilon(1e-6));
  CHECK(doc["final_poses"][1][0].get<double>() == 1.05);
  CHECK(fs::file_size(svg) > 0);

  // Same inputs give the same trace apart from timing.
  const fs::path again = scratch("trace2.json");
  CHECK(run({"flex", test::data("two_squares.json"), "--direction", "1,0", "--body", "A", "--trace", again.string()})
            .code == cli::kExitOk);
  nlohmann::json a = doc, b = nlohmann::json::parse(io::read_text(again));
  a.erase("timing");
  b.erase("timing");
  CHECK(a == b);

  CHECK(run({"flex", test::data("frame_4.json"), "--radial"}).code == cli::kExitOk);
}

TEST_CASE("objective files") {
  const fs::path obj = scratch("objective.json");
  io::write_text(obj, R"({"bodies": {"A": [1, 0, 0]}})");
  CHECK(run({"flex", test::data("two_squares.json"), "--objective", obj.string()}).code == cli::kExitOk);
  io::write_text(obj, R"({"weights": [1, 0]})");
  CHECK(run({"flex", test::data("two_squares.json"), "--objective", obj.string()}).code == cli::kExitInput);
}

TEST_CASE("separate") {
  const Run enclosed = run({"separate", test::data("enclosed_block.json")});
  CHECK(enclosed.code == cli::kExitAnalysis);
  CHECK(contains(enclosed.out, "inseparable under linear model"));
  const Run open = run({"separate", test::data("two_squares.json")});
  CHECK(open.code == cli::kExitOk);
  CHECK(contains(open.out, "separable"));
}

TEST_CASE("tolerance") {
  const Run r = run({"tolerance", test::data("enclosed_block.json"), "--t-max", "0.05", "--threshold", "0.05",
                     "--track", "block", "--direction", "1,0"});
  CHECK(r.code == cli::kExitOk);
  const std::size_t at = r.out.find("t* = ");
  REQUIRE(at != std::string::npos);
  CHECK(std::stod(r.out.substr(at + 5)) == doctest::Approx(0.03).epsilon(1e-4 / 0.03));
  const Run tight = run({"tolerance", test::data("enclosed_block.json"), "--t-max", "0.05", "--threshold", "0.01",
                         "--track", "block", "--direction", "1,0"});
  CHECK(tight.code == cli::kExitAnalysis);
}

TEST_CASE("flock and bench") {
  const Run f = run({"flock", test::data("flock_16.json"), "--max-iters", "5"});
  CHECK(f.code == cli::kExitOk);
  CHECK(contains(f.out, "x spread"));
  CHECK(run({"flock", test::data("two_squares.json")}).code == cli::kExitInput);

  const Run b = run({"bench", "--n", "36"});
  CHECK(b.code == cli::kExitOk);
  CHECK(contains(b.out, "x105"));
}

TEST_CASE("solver selection") {
  ::setenv("FLEXLP_SOLVER", "simplex", 1);
  CHECK(run({"flex", test::data("two_squares.json"), "--direction", "1,0"}).code == cli::kExitOk);
  ::setenv("FLEXLP_SOLVER", "gurobi", 1);
  const Run r = run({"flex", test::data("two_squares.json"), "--direction", "1,0"});
  CHECK(r.code == cli::kExitInput);
  CHECK(contains(r.err, "gurobi"));
  ::unsetenv("FLEXLP_SOLVER");
}

#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "test_support.hpp"
#include "traintrack/cli.hpp"

using nlohmann::json;
using tt::cli::ExitCode;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
  json j() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "traintrack");
  std::ostringstream out, err;
  const int code = tt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return tt::test::fixture_path(name); }

}  // namespace

TEST_CASE("analyze") {
  const auto fib = run({"analyze", fx("fib.aut")});
  REQUIRE(fib.code == ExitCode::kCompleted);
  const json j = fib.j();
  CHECK(j["strata"].size() == 1);
  CHECK(j["strata"][0]["type"] == "exponential");
  CHECK(j["rtt"]["ok"] == true);
  CHECK(j["turns"]["illegal"].size() == 1);
  // the period-2 INP fails improved property 1, which only --strict turns into a violation
  CHECK(j["improved"]["ok"] == false);
  CHECK(run({"analyze", fx("fib.aut"), "--strict"}).code == ExitCode::kViolation);

  const auto broken = run({"analyze", fx("broken.gm")});
  CHECK(broken.code == ExitCode::kViolation);
  const json b = broken.j();
  REQUIRE(b["rtt"]["violations"].size() >= 1);
  CHECK(b["rtt"]["violations"][0]["condition"] == 1);
  CHECK(b["rtt"]["violations"][0]["edge"] == "a");

  CHECK(run({"analyze", fx("fib_subdivided.gm")}).code == ExitCode::kViolation);
  CHECK(run({"analyze", fx("relative.aut")}).code == ExitCode::kCompleted);
}

TEST_CASE("probe, certify and growth") {
  const json probe = run({"probe", fx("fib.aut")}).j();
  CHECK(probe["verdict"] == "not-atoroidal");
  CHECK(probe["witnesses"][0]["class"] == "a b a^-1 b^-1");

  const json cert = run({"certify", fx("plas.aut"), "--jobs", "2"}).j();
  CHECK(cert["verdict"] == "empirical-certificate");
  CHECK(cert["M"] == 3);

  const auto growth = run({"growth", fx("fib.aut"), "--word", "a", "--from", "0", "--to", "6"});
  CHECK(growth.out == "k,length\n0,1\n1,2\n2,3\n3,5\n4,8\n5,13\n6,21\n");
  const auto back = run({"growth", fx("fib.aut"), "--word", "a", "--from", "-2", "--to", "0", "--format", "json"});
  CHECK(back.j()["series"][0]["length"] == 2);

  const json nielsen = run({"nielsen", fx("fib.aut")}).j();
  CHECK(nielsen["records"].size() >= 1);
}

TEST_CASE("validators") {
  const auto bw1 = run({"validate", fx("fib.aut"), "bw1", "--samples", "40", "--k-max", "3"});
  CHECK(bw1.code == ExitCode::kCompleted);
  CHECK(bw1.out.rfind("circuit,", 0) == 0);

  const json bcc = run({"validate", fx("plas.aut"), "bcc"}).j();
  CHECK(bcc["pass"] == true);
  CHECK(bcc["stable"] == true);

  CHECK(run({"validate", fx("fib.aut"), "tricho", "--path", "a^-1 b", "--exponent", "1"}).code ==
        ExitCode::kCompleted);
  CHECK(run({"validate", fx("fib.aut"), "decomp", "--samples", "30"}).code == ExitCode::kCompleted);
  CHECK(run({"validate", fx("fib.aut"), "illen"}).code == ExitCode::kCompleted);
  CHECK(run({"validate", fx("poly.aut"), "bw1"}).code == ExitCode::kInputError);
}

TEST_CASE("input errors exit 2") {
  CHECK(run({}).code == ExitCode::kInputError);
  CHECK(run({"frobnicate"}).code == ExitCode::kInputError);
  CHECK(run({"analyze", "/nonexistent.aut"}).code == ExitCode::kInputError);
  CHECK(run({"analyze", fx("fib.aut"), "--tol", "1"}).code == ExitCode::kInputError);
  CHECK(run({"probe", fx("fib.aut"), "-L", "0"}).code == ExitCode::kInputError);
  CHECK(run({"growth", fx("fib.aut"), "--word", "q"}).code == ExitCode::kInputError);
  CHECK(run({"validate", fx("fib.aut"), "nonsense"}).code == ExitCode::kInputError);
  const auto bad = run({"analyze", fx("fib.aut"), "--format", "xml"});
  CHECK(bad.code == ExitCode::kInputError);
  CHECK(run({"--help"}).code == ExitCode::kCompleted);
}

TEST_CASE("output is deterministic for a fixed seed") {
  const std::vector<std::string> args{"validate", fx("fib.aut"), "bw1", "--samples", "30", "--seed", "7"};
  CHECK(run(args).out == run(args).out);
  const auto other = run({"validate", fx("fib.aut"), "bw1", "--samples", "30", "--seed", "8"});
  CHECK(other.out != run(args).out);
  const auto text = run({"certify", fx("plas.aut"), "--format", "text"});
  CHECK(text.out.find("verdict: empirical-certificate") != std::string::npos);
}

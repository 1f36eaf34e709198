#include "doctest.h"

#include <cmath>
#include <string>

#include "sonic/config.hpp"

using namespace sonic;

namespace {
std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("parse with comments, lists and defaults") {
  const SolverConfig c = parse_config(
      "# run\n"
      "p1 = -3\n"
      "p4 = -2   # trailing\n"
      "\n"
      "deltas = 1.2, 1.8\n"
      "n_plus = 24\n");
  CHECK(c.wave.p1 == -3.0);
  CHECK(c.wave.p4 == -2.0);
  CHECK(c.n_plus == 24);
  REQUIRE(c.deltas.size() == 2);
  CHECK(c.deltas[1] == 1.8);
  // s0 defaults to |p1 - p4|
  CHECK(c.s0 == 1.0);
  CHECK(parse_config("p1 = -3\np4 = -1.5\n").s0 == 1.5);
  CHECK(parse_config("p1 = -3\np4 = -1.5\ns0 = 0.25\n").s0 == 0.25);
}

TEST_CASE("parse errors carry the line number") {
  CHECK(error_of("p1 = -2\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(error_of("p1 = -2\nbogus = 1\n").find("unknown key") != std::string::npos);
  CHECK(error_of("p1 = -2\n\np1 = -3\n").find("line 3") != std::string::npos);
  CHECK(error_of("p1 = -2\n\np1 = -3\n").find("duplicate") != std::string::npos);
  CHECK(error_of("t0 = 0.3x\n").find("line 1") != std::string::npos);
  CHECK(error_of("n_plus = 3.5\n").find("line 1") != std::string::npos);
  CHECK(error_of("just words\n").find("line 1") != std::string::npos);
  CHECK(error_of("t0 =\n").find("line 1") != std::string::npos);
}

TEST_CASE("validation") {
  SolverConfig c = reference_config();
  CHECK_NOTHROW(c.validate());
  c.courant = 0.95;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = reference_config();
  c.wave.p4 = -3.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = reference_config();
  c.deltas = {2.0};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = reference_config();
  c.t0 = 2.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(reference_config().refined(0), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/x.cfg"), ConfigError);
}

TEST_CASE("canonical form and hash") {
  const SolverConfig a = reference_config();
  const SolverConfig b = parse_config(a.canonical());
  CHECK(a.canonical() == b.canonical());
  CHECK(sha256_hex(a.canonical()) == sha256_hex(b.canonical()));
  SolverConfig c = a;
  c.t0 = 0.31;
  CHECK(sha256_hex(c.canonical()) != sha256_hex(a.canonical()));
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("refinement") {
  const SolverConfig a = reference_config();
  const SolverConfig r = a.refined(2);
  CHECK(r.n_plus == 2 * a.n_plus);
  CHECK(r.n_minus == 2 * a.n_minus);
  CHECK(r.dt_ratio == doctest::Approx(std::sqrt(a.dt_ratio)));
  CHECK(a.refined(1).canonical() == a.canonical());
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.0, 1e-300, 123456.789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(-2.0) == "-2");
}

#include "doctest.h"

#include <cmath>

#include "sonic/goursat.hpp"
#include "sonic/wave.hpp"

using namespace sonic;

namespace {

// With S = 0 on BC the patch is the wave itself.
double wave_error(int n) {
  SolverConfig c = reference_config();
  c.s0 = 0.0;
  c.n_plus = c.n_minus = n;
  double e = 0.0;
  for (const CharNode& nd : solve(c).nodes()) {
    e = std::max(e, std::abs(nd.w.p + nd.cart().eta));
    CHECK(nd.w.S == 0.0);
  }
  return e;
}

}  // namespace

TEST_CASE("Gamma_- profile") {
  const GammaMinusProfile g{1.0, 0.7, 1.15};
  CHECK(g.S(0.7) == doctest::Approx(0.0));
  CHECK(g.S(1.15) == doctest::Approx(-1.0));
  CHECK(g.S(0.9) < 0.0);
}

TEST_CASE("reference mesh: sign and orientation") {
  const SolverConfig c = reference_config();
  const CharacteristicMesh m = solve(c);
  CHECK(m.size() > 300);
  CHECK(m.handoff_level() == c.t0);
  for (const CharNode& nd : m.nodes()) {
    CHECK(nd.w.R <= 0.0);
    CHECK(nd.w.S <= 0.0);
  }
  int inverted = 0;
  for (int i = 1; i < m.ni(); ++i) {
    for (int j = 1; j < m.nj(); ++j) {
      if (m.has(i, j) && m.has(i - 1, j - 1) && m.has(i - 1, j) && m.has(i, j - 1) &&
          cell_signed_area(m, i, j) <= 0.0) {
        ++inverted;
      }
    }
  }
  CHECK(inverted == 0);
  const CharNode& b = m.at(0, 0);
  CHECK(b.cart().xi == doctest::Approx(1.0));
  CHECK(b.cart().eta == doctest::Approx(1.0));
}

TEST_CASE("16 x 16 mesh completes") {
  SolverConfig c = reference_config();
  c.n_plus = c.n_minus = 16;
  const CharacteristicMesh m = solve(c);
  CHECK(m.size() > 100);
  for (const CharNode& nd : m.nodes()) {
    CHECK(nd.w.R <= 0.0);
    CHECK(nd.w.S <= 0.0);
  }
}

TEST_CASE("wave data reproduce the wave at second order") {
  const double e16 = wave_error(16), e32 = wave_error(32), e64 = wave_error(64);
  CHECK(e16 < 1e-3);
  CHECK(std::log2(e16 / e32) > 1.8);
  CHECK(std::log2(e32 / e64) > 1.8);
}

TEST_CASE("level crossings") {
  const SolverConfig c = reference_config();
  const CharacteristicMesh m = solve(c);
  const auto cr = plus_strand_crossings(m, c.t0);
  REQUIRE(cr.size() > 10);
  for (std::size_t k = 0; k < cr.size(); ++k) {
    if (k) CHECK(cr[k].r > cr[k - 1].r);
    CHECK(cr[k].R <= 0.0);
  }
}

TEST_CASE("corrector failure reports the node") {
  SolverConfig c = reference_config();
  c.node_max_iter = 1;
  try {
    solve(c);
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.i() >= 0);
    CHECK(e.j() >= 0);
  }
}

TEST_CASE("deterministic") {
  const auto a = solve(reference_config()).nodes();
  const auto b = solve(reference_config()).nodes();
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].r == b[k].r);
    CHECK(a[k].w.R == b[k].w.R);
    CHECK(a[k].w.S == b[k].w.S);
  }
}

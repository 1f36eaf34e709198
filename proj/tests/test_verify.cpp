#include "doctest.h"

#include <cmath>

#include "sonic/pipeline.hpp"
#include "sonic/verify.hpp"

using namespace sonic;

namespace {
const WaveParams kRef{-2.0, -1.0, 0.5};
}

TEST_CASE("richardson removes the leading orders") {
  auto v = [](double h) { return 3.0 + 2.0 * h * h + 5.0 * std::pow(h, 4) + std::pow(h, 6); };
  const double r = richardson({v(0.1), v(0.05), v(0.025)}, {2.0, 4.0});
  CHECK(std::abs(r - 3.0) < 1e-7);
}

TEST_CASE("order report") {
  const auto r = order_report("x", "here", {0.1, 0.05, 0.025, 0.0125},
                              {1e-2, 2.5e-3, 6.25e-4, 1.5625e-4}, 2.0);
  REQUIRE(r.orders.size() == 3);
  CHECK(r.min_order == doctest::Approx(2.0));
  CHECK(r.converges());
  CHECK_FALSE(r.exact);
  const auto flat = order_report("x", "here", {0.1, 0.05, 0.025}, {1e-2, 9e-3, 8.5e-3}, 2.0);
  CHECK_FALSE(flat.converges());
  const auto zero = order_report("x", "here", {0.1, 0.05, 0.025}, {1e-13, 0.0, 2e-14}, 2.0);
  CHECK(zero.exact);
  CHECK(zero.converges());
}

TEST_CASE("wave residuals") {
  const CartField wc = wave_cartesian(kRef);
  CHECK(std::abs(residual_cartesian(wc, {0.4, 1.5}, 0.01)) < 1e-10);

  const PolarField wp = wave_polar(kRef);
  const PolarPoint q{1.5 / std::sin(1.1), 1.1};
  const auto r = halving_study("polar", "w", [&](double h) { return residual_polar(wp, q, h); },
                               0.02, 4, 2.0);
  CHECK(r.converges());
  CHECK(r.min_order > 1.9);

  int n = 0;
  CHECK(wave_polar_richardson(kRef, 0.02, &n) <= 1e-10);
  CHECK(n == 100);

  // d+ d- p - ... vanishes identically since S = 0
  const auto d = decomposition_residuals(wp, q, 0.01);
  CHECK(std::abs(d[0]) < 1e-8);
}

TEST_CASE("manufactured fields converge at second order") {
  const ManufacturedCart mc = manufactured_cartesian();
  const CartPoint c{0.7, 1.5};
  const auto r = halving_study(
      "cartesian", "m", [&](double h) { return residual_cartesian(mc.p, c, h) - mc.exact_residual(c); },
      0.04, 4, 2.0);
  CHECK(r.min_order > 1.8);

  for (const auto& rep : rt_identity_study(manufactured_rt(), {1.6, 0.2}, 0.02, 4, 1.5)) {
    INFO(rep.identity);
    CHECK(rep.converges());
    CHECK_FALSE(rep.exact);
  }
}

TEST_CASE("mutation canaries fire") {
  const auto c = mutation_canaries(manufactured_rt(), {1.6, 0.2}, 0.02, 6, 1.5);
  CHECK(c.size() == 10);
  for (const auto& x : c) {
    INFO(to_string(x.mutation));
    CHECK(x.plateaus);
    CHECK(x.mutated > 10.0 * x.clean);
  }
}

TEST_CASE("refusal near the sonic line") {
  const PolarField wp = wave_polar(kRef);
  // r sin(theta) = 1.5 with r + p = r - 1.5 tiny
  const double r = 1.5 + 1e-10;
  CHECK_THROWS(decomposition_residuals(wp, {r, std::asin(1.5 / r)}, 1e-3));
}

TEST_CASE("V evolution on a field with R = S") {
  // constant R = S: V = 0 and l2 = 0, so the residual is zero
  RSField f;
  f.rs = [](RTPoint) { return std::array<double, 2>{-0.7, -0.7}; };
  CHECK(std::abs(v_evolution_residual(f, {1.5, 0.2}, 0.01, 1.5)) < 1e-12);
  const auto com = commutator_residuals(f, {1.5, 0.2}, 0.01);
  CHECK(std::abs(com[1]) < 1e-9);
  CHECK(std::abs(com[2]) < 1e-9);
}

TEST_CASE("patch interpolant") {
  const SolverConfig c = reference_config();
  const auto f = std::make_shared<RTField>(run_march(c).field);
  const PatchField pf(f);
  const RTLevel& lv = f->levels[10];
  const int q = lv.count() / 2;
  const auto v = pf.at({f->r_at(lv.lo + q), lv.t});
  CHECK(v.R == doctest::Approx(lv.R[q]).epsilon(1e-12));
  CHECK(v.S == doctest::Approx(lv.S[q]).epsilon(1e-12));
  CHECK(pf.t_of(f->r_at(lv.lo + q), lv.theta[q]) == doctest::Approx(lv.t).epsilon(1e-8));
  CHECK_THROWS_AS(pf.at({f->r0 - 1.0, 0.2}), DomainError);
}

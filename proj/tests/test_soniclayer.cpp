#include "doctest.h"

#include <cmath>
#include <map>

#include "sonic/soniclayer.hpp"
#include "sonic/wave.hpp"

using namespace sonic;

namespace {

MarchOptions options_of(const SolverConfig& c) {
  MarchOptions o;
  o.t_min = c.t_min();
  o.ratio = c.dt_ratio;
  o.courant = c.courant;
  return o;
}

RTField wave_march(int k) {
  SolverConfig c = reference_config().refined(k);
  c.s0 = 0.0;
  return rt_march(handoff(solve(c), c.t0, c.nr, c.r_trim), options_of(c));
}

// Max level-curve slope error against the wave, over the middle 60% of each
// eps window (the inflow edge cell is only first order).
double wave_slope_error(int k) {
  const SolverConfig c = reference_config().refined(k);
  const RTField f = wave_march(k);
  const auto s = sonic_trace(f, eps_schedule(c.t0, c.t_min(), c.eps_ratio, c.eps_min_factor));
  std::map<double, std::pair<double, double>> range;
  for (const auto& x : s) {
    auto [it, fresh] = range.try_emplace(x.eps, x.r, x.r);
    it->second.first = std::min(it->second.first, x.r);
    it->second.second = std::max(it->second.second, x.r);
  }
  double e = 0.0;
  for (const auto& x : s) {
    const auto [a, b] = range[x.eps];
    if (x.r < a + 0.2 * (b - a) || x.r > a + 0.8 * (b - a)) continue;
    const double u = 1.0 - x.eps / x.r;
    const double exact = (x.eps / (x.r * x.r)) / std::sqrt(1.0 - u * u);
    e = std::max(e, std::abs(x.dtheta_eps - exact));
    CHECK(x.theta_eps == doctest::Approx(std::asin(u)).epsilon(1e-3));
  }
  return e;
}

}  // namespace

TEST_CASE("MonotoneCubic") {
  const MonotoneCubic lin({0.0, 0.3, 1.0, 1.1, 2.0}, {1.0, 1.6, 3.0, 3.2, 5.0});
  for (double x : {0.0, 0.1, 0.65, 1.05, 1.7, 2.0}) {
    CHECK(lin(x) == doctest::Approx(1.0 + 2.0 * x).epsilon(1e-13));
  }
  // step data: no overshoot
  const MonotoneCubic step({0, 1, 2, 3, 4, 5}, {0, 0, 0, 1, 1, 1});
  double prev = -1.0;
  for (int i = 0; i <= 500; ++i) {
    const double v = step(i * 0.01);
    CHECK(v >= -1e-15);
    CHECK(v <= 1.0 + 1e-15);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  // smooth data converge faster than second order on uneven knots
  auto err = [](int n) {
    std::vector<double> x, y;
    for (int i = 0; i <= n; ++i) {
      const double s = double(i) / n;
      x.push_back(s + 0.3 * s * (1 - s) * std::sin(7.0 * s));
      y.push_back(std::exp(x.back()));
    }
    const MonotoneCubic f(x, y);
    double e = 0.0;
    for (int i = 0; i <= 1000; ++i) e = std::max(e, std::abs(f(i / 1000.0) - std::exp(i / 1000.0)));
    return e;
  };
  CHECK(std::log2(err(20) / err(40)) > 2.5);
}

TEST_CASE("handoff of constant data is exact") {
  std::vector<LevelCrossing> cr;
  for (int i = 0; i < 12; ++i) {
    const double r = 1.2 + 0.05 * i + 0.01 * (i % 3);
    cr.push_back({r, 1.0 - 0.1 * r, -0.7, -0.4, i});
  }
  const RTField f = handoff(cr, 0.3, 33, 0.1);
  CHECK(f.nr == 33);
  CHECK(f.top().t == 0.3);
  for (int q = 0; q < f.top().count(); ++q) {
    CHECK(f.top().R[q] == doctest::Approx(-0.7).epsilon(1e-14));
    CHECK(f.top().S[q] == doctest::Approx(-0.4).epsilon(1e-14));
    CHECK(f.top().theta[q] == doctest::Approx(1.0 - 0.1 * f.r_at(q)).epsilon(1e-13));
  }
  cr.resize(3);
  CHECK_THROWS_AS(handoff(cr, 0.3, 33, 0.1), HandoffError);
}

TEST_CASE("constant R = S is a fixed point of the march") {
  RTField f;
  f.r0 = 1.2;
  f.dr = 0.005;
  f.nr = 81;
  RTLevel top;
  top.t = 0.3;
  top.hi = f.nr - 1;
  top.R.assign(f.nr, -0.8);
  top.S.assign(f.nr, -0.8);
  top.theta.assign(f.nr, 1.0);
  f.levels.push_back(top);
  MarchOptions o;
  o.t_min = 3e-3;
  MarchStats st;
  const RTField g = rt_march(f, o, &st);
  CHECK(g.bottom().t == doctest::Approx(3e-3));
  CHECK(st.cone_consistent);
  for (const auto& lv : g.levels) {
    for (int q = 0; q < lv.count(); ++q) {
      CHECK(lv.R[q] == doctest::Approx(-0.8).epsilon(1e-13));
      CHECK(lv.S[q] == doctest::Approx(-0.8).epsilon(1e-13));
    }
  }
}

TEST_CASE("wave march") {
  const RTField f = wave_march(1);
  for (const auto& lv : f.levels) {
    for (int q = 0; q < lv.count(); ++q) {
      const double r = f.r_at(lv.lo + q);
      CHECK(lv.S[q] == 0.0);
      CHECK(std::abs(lv.R[q] - wave_R_rt(r, lv.t)) < 3e-3);
      // p = -r sin(theta) on the wave
      CHECK(std::abs(std::sin(lv.theta[q]) - (r - lv.t * lv.t) / r) < 1e-4);
    }
  }
}

TEST_CASE("level-curve slope on the wave") {
  CHECK(level_curve_slope(1.7, 0.1, wave_R_rt(1.7, 0.1), 0.0) ==
        doctest::Approx((0.01 / (1.7 * 1.7)) / std::sqrt(1.0 - std::pow(1.0 - 0.01 / 1.7, 2)))
            .epsilon(1e-12));
  CHECK_THROWS_AS(level_curve_slope(1.7, 0.0, -1.0, -1.0), DomainError);
  const double e1 = wave_slope_error(1), e2 = wave_slope_error(2);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 > 3.0);
}

TEST_CASE("eps schedule") {
  const auto e = eps_schedule(0.3, 3e-4, 2.0, 16.0);
  REQUIRE(e.size() == 16);
  CHECK(e.front() == doctest::Approx(0.09));
  for (std::size_t k = 1; k < e.size(); ++k) CHECK(e[k] == doctest::Approx(e[k - 1] / 2));
  CHECK(e.back() >= 16.0 * 9e-8);
  CHECK_THROWS_AS(eps_schedule(0.3, 3e-4, 1.0, 16.0), DiagnosticsError);
}

TEST_CASE("extrapolation and rate on the reference patch") {
  const SolverConfig c = reference_config();
  const RTField f = rt_march(handoff(solve(c), c.t0, c.nr, c.r_trim), options_of(c));
  const SonicValues a = extrapolate_to_sonic(f, 32 * c.t_min(), 2.0);
  REQUIRE(!a.r.empty());
  for (std::size_t k = 0; k < a.r.size(); ++k) {
    CHECK(std::abs(a.R[k] - a.S[k]) < 1e-3);
    CHECK(a.R[k] < 0.0);
  }
  const RateFit fit = fit_rate(f, 10 * c.t_min(), c.t0 / 4);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.05));
}

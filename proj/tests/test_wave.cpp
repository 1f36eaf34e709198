#include "doctest.h"

#include <cmath>

#include "sonic/wave.hpp"

using namespace sonic;

namespace {
const WaveParams kRef{-2.0, -1.0, 0.5};
}

TEST_CASE("wave state") {
  const WaveState s = wave_state({0.5, 1.5}, kRef);
  CHECK(s.p == doctest::Approx(-1.5));
  CHECK(s.m == 0.0);
  CHECK(s.n == doctest::Approx(std::log(2.0 / 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(wave_state({0.0, 0.5}, kRef), DomainError);
  CHECK_THROWS_AS(wave_state({0.0, 2.5}, kRef), DomainError);
}

TEST_CASE("params validation") {
  CHECK_THROWS_AS((WaveParams{-1.0, -2.0, 0.5}.validate()), DomainError);
  CHECK_THROWS_AS((WaveParams{-2.0, 0.5, 0.5}.validate()), DomainError);
  CHECK(kRef.within_closeness());
  CHECK_FALSE((WaveParams{-4.0, -1.0, 0.5}.within_closeness()));
}

TEST_CASE("boundary data on AB") {
  const StateW top = wave_RS(M_PI / 2, kRef);
  CHECK(top.p == doctest::Approx(kRef.p1));
  CHECK(top.R == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(top.S == 0.0);
  // theta_B = pi/4 for the reference states
  CHECK(theta_b(kRef) == doctest::Approx(M_PI / 4).epsilon(1e-15));
  const StateW mid = wave_RS(theta_b(kRef), kRef);
  CHECK(mid.p == doctest::Approx(-1.0));
  CHECK(mid.R == doctest::Approx(-2.0));
  CHECK(mid.S == 0.0);
}

TEST_CASE("corner points") {
  const CartPoint a = point_A(kRef), b = point_B(kRef);
  CHECK(a.xi == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(a.eta == doctest::Approx(2.0));
  CHECK(b.xi == doctest::Approx(1.0));
  CHECK(b.eta == doctest::Approx(1.0));
  const double s = std::sin(theta_b(kRef));
  CHECK(s * s == doctest::Approx(kRef.p4 / kRef.p1));
}

TEST_CASE("wave in (r, t)") {
  // r = 2, p = -1: t = 1, R = -2 sqrt(3)
  CHECK(wave_R_rt(2.0, 1.0) == doctest::Approx(-2.0 * std::sqrt(3.0)));
  CHECK(wave_R_rt(2.0, 0.0) == 0.0);
  const double th = 1.0, r = 1.8 / std::sin(th);
  const StateW w = wave_polar_state({r, th}, kRef);
  CHECK(w.S == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(w.R == doctest::Approx(wave_R_rt(r, std::sqrt(r + w.p))).epsilon(1e-12));
}

TEST_CASE("AB is a circle ending at B") {
  const TraceResult tr = trace_AB(kRef, 1e-3);
  const CartPoint b = point_B(kRef);
  const CartPoint end = tr.points.back().c;
  CHECK(std::hypot(end.xi - b.xi, end.eta - b.eta) < 1e-6);
  double dev = 0.0;
  for (const auto& p : tr.points) dev = std::max(dev, std::abs(p.c.xi * p.c.xi + p.c.eta * p.c.eta - 2.0 * p.c.eta));
  CHECK(dev < 1e-8);
}

TEST_CASE("minus characteristics of the wave are horizontal") {
  TraceOptions o;
  o.step = 1e-3;
  o.heading = {1.0, 0.0};
  o.event = [](const TracePoint& p) { return 1.2 - p.c.xi; };
  const TraceResult tr = characteristic_trace({0.2, 1.4}, Family::minus, wave_field(kRef), o);
  REQUIRE(tr.points.size() > 10);
  for (const auto& p : tr.points) CHECK(p.c.eta == doctest::Approx(1.4).epsilon(1e-10));
}

TEST_CASE("tracer refuses sonic starts") {
  TraceOptions o;
  // xi^2 + eta^2 = p^2 with p = -eta: the sonic circle meets the strip at xi = 0
  CHECK_THROWS_AS(characteristic_trace({0.0, 1.5}, Family::plus, wave_field(kRef), o), DomainError);
}

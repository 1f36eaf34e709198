#include "sonic/wave.hpp"

#include <cmath>
#include <numbers>

namespace sonic {

void WaveParams::validate() const {
  if (!(p1 < p4 && p4 < 0.0)) {
    throw DomainError("wave parameters need p1 < p4 < 0");
  }
  if (!(kappa > 0.0)) {
    throw DomainError("kappa must be positive");
  }
}

bool WaveParams::within_closeness() const {
  return std::abs(p4 - p1) <= kappa * std::abs(p1);
}

WaveState wave_state(CartPoint point, const WaveParams& params) {
  params.validate();
  if (point.eta < -params.p4 || point.eta > -params.p1) {
    throw DomainError("point outside the wave strip -p4 <= eta <= -p1");
  }
  const double p = -point.eta;
  return {p, 0.0, std::log(params.p4 / p)};
}

double theta_b(const WaveParams& params) {
  params.validate();
  return std::asin(std::sqrt(params.p4 / params.p1));
}

StateW wave_RS(double theta, const WaveParams& params) {
  const double tb = theta_b(params);
  constexpr double half_pi = std::numbers::pi / 2.0;
  if (theta < tb || theta > half_pi) {
    throw DomainError("angle outside [theta_B, pi/2] on AB");
  }
  const double s = std::sin(theta);
  return {params.p1 * s * s, params.p1 * std::sin(2.0 * theta), 0.0};
}

CartPoint point_A(const WaveParams& params) {
  params.validate();
  return {0.0, -params.p1};
}

CartPoint point_B(const WaveParams& params) {
  params.validate();
  return {std::sqrt(params.p4 * (params.p1 - params.p4)), -params.p4};
}

StateW wave_polar_state(PolarPoint q, const WaveParams& params) {
  const CartPoint c = to_cart(q);
  const WaveState ws = wave_state(c, params);
  // p = -r sin(theta): d+ p = -2 r cos(theta), d- p = 0.
  return {ws.p, -2.0 * q.r * std::cos(q.theta), 0.0};
}

double wave_R_rt(double r, double t) {
  if (!(r > 0.0) || !(t >= 0.0) || !(t * t <= r)) {
    throw DomainError("wave_R_rt needs 0 <= t^2 <= r");
  }
  return -2.0 * t * std::sqrt(2.0 * r - t * t);
}

CartPoint characteristic_tangent(CartPoint c, double p, Family family,
                                 CartPoint reference) {
  const double xi = c.xi;
  const double eta = c.eta;
  const double p2 = p * p;
  const double disc = p2 * (xi * xi + eta * eta - p2);
  const double scale = std::max(1.0, p2 * p2);
  if (disc < -1e-13 * scale) {
    throw DomainError("characteristic requested in the elliptic region");
  }
  const double root = std::sqrt(std::max(disc, 0.0));
  const double sgn = family == Family::plus ? 1.0 : -1.0;
  // Two algebraically equivalent direction vectors; each one vanishes on a
  // different degenerate locus, so use the better conditioned one.
  const double ax = xi * xi - p2;
  const double ay = xi * eta + sgn * root;
  const double bx = xi * eta - sgn * root;
  const double by = eta * eta - p2;
  const double na = std::hypot(ax, ay);
  const double nb = std::hypot(bx, by);
  CartPoint d = na >= nb ? CartPoint{ax / na, ay / na} : CartPoint{bx / nb, by / nb};
  if (!(std::max(na, nb) > 0.0)) {
    throw DomainError("characteristic direction is undefined here");
  }
  if (d.xi * reference.xi + d.eta * reference.eta < 0.0) {
    d = {-d.xi, -d.eta};
  }
  return d;
}

namespace {

TracePoint make_point(CartPoint c, const FieldFn& field) {
  const PolarPoint q = to_polar(c);
  return {c, q.r, q.theta, field(c)};
}

CartPoint rk4_step(CartPoint x, double h, Family family, const FieldFn& field,
                   CartPoint reference) {
  auto f = [&](CartPoint y) {
    return characteristic_tangent(y, field(y).p, family, reference);
  };
  const CartPoint k1 = f(x);
  const CartPoint k2 = f({x.xi + 0.5 * h * k1.xi, x.eta + 0.5 * h * k1.eta});
  const CartPoint k3 = f({x.xi + 0.5 * h * k2.xi, x.eta + 0.5 * h * k2.eta});
  const CartPoint k4 = f({x.xi + h * k3.xi, x.eta + h * k3.eta});
  return {x.xi + h / 6.0 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi),
          x.eta + h / 6.0 * (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta)};
}

}  // namespace

TraceResult characteristic_trace(CartPoint start, Family family,
                                 const FieldFn& field, const TraceOptions& opts) {
  if (!(opts.step > 0.0)) {
    throw DomainError("trace step must be positive");
  }
  TracePoint cur = make_point(start, field);
  const double sonic_gap = cur.r * cur.r - cur.w.p * cur.w.p;
  if (sonic_gap < -1e-13) {
    throw DomainError("trace started in the elliptic region");
  }
  if (std::abs(sonic_gap) <= 1e-13 * std::max(1.0, cur.r * cur.r) &&
      !opts.allow_sonic_start) {
    throw DomainError("trace started on the sonic circle: families coincide");
  }

  // Combined stop function: the first of the user event and sonic proximity.
  auto stop_value = [&](const TracePoint& tp) {
    double v = std::numeric_limits<double>::infinity();
    if (opts.event) v = std::min(v, opts.event(tp));
    if (opts.eps_stop > 0.0) v = std::min(v, tp.r + tp.w.p - opts.eps_stop);
    return v;
  };
  auto reason_at = [&](const TracePoint& tp) {
    if (opts.eps_stop > 0.0 && tp.r + tp.w.p - opts.eps_stop <= 0.0 &&
        !(opts.event && opts.event(tp) <= 0.0)) {
      return StopReason::sonic;
    }
    return StopReason::event;
  };

  TraceResult out;
  out.points.push_back(cur);
  if (stop_value(cur) <= 0.0) {
    out.reason = reason_at(cur);
    return out;
  }

  CartPoint reference =
      characteristic_tangent(cur.c, cur.w.p, family, opts.heading);
  for (std::size_t n = 0; n < opts.max_steps; ++n) {
    double h = opts.step;
    if (cur.r + cur.w.p < opts.refine_below) h *= 0.5;
    const CartPoint next_c = rk4_step(cur.c, h, family, field, reference);
    TracePoint next = make_point(next_c, field);
    if (stop_value(next) <= 0.0) {
      // Bisect the step length so the last point lands on the event zero.
      double lo = 0.0;
      double hi = h;
      TracePoint best = next;
      for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        TracePoint trial = make_point(rk4_step(cur.c, mid, family, field, reference), field);
        if (stop_value(trial) <= 0.0) {
          hi = mid;
          best = trial;
        } else {
          lo = mid;
        }
      }
      out.points.push_back(best);
      out.reason = reason_at(best);
      return out;
    }
    reference = {next.c.xi - cur.c.xi, next.c.eta - cur.c.eta};
    cur = next;
    out.points.push_back(cur);
  }
  throw StepBudgetExhausted("characteristic trace exceeded its step budget");
}

FieldFn wave_field(const WaveParams& params) {
  params.validate();
  return [params](CartPoint c) -> StateW {
    if (c.eta > -params.p1) return {params.p1, 0.0, 0.0};
    if (c.eta < -params.p4) return {params.p4, 0.0, 0.0};
    const PolarPoint q = to_polar(c);
    return {-c.eta, -2.0 * q.r * std::cos(q.theta), 0.0};
  };
}

TraceResult trace_AB(const WaveParams& params, double step) {
  TraceOptions opts;
  opts.step = step;
  opts.heading = {1.0, 0.0};
  opts.allow_sonic_start = true;
  const double eta_edge = -params.p4;
  opts.event = [eta_edge](const TracePoint& tp) { return tp.c.eta - eta_edge; };
  return characteristic_trace(point_A(params), Family::plus, wave_field(params), opts);
}

}  // namespace sonic

#include "sonic/core.hpp"

#include <algorithm>
#include <cmath>

namespace sonic {

namespace {

void require_rt(double r, double t) {
  if (!(r > 0.0) || !(t >= 0.0) || !(t * t < r)) {
    throw DomainError("(r, t) outside 0 <= t^2 < r: r=" + std::to_string(r) +
                      " t=" + std::to_string(t));
  }
}

double guard_scale(double R, double S) {
  return std::max({1.0, std::abs(R), std::abs(S)});
}

}  // namespace

PolarPoint to_polar(CartPoint c) {
  return {std::hypot(c.xi, c.eta), std::atan2(c.eta, c.xi)};
}

CartPoint to_cart(PolarPoint q) {
  return {q.r * std::cos(q.theta), q.r * std::sin(q.theta)};
}

double degeneracy_coordinate(double r, double p) {
  const double s = r + p;
  if (s < 0.0) {
    throw DomainError("r + p < 0 (subsonic point)");
  }
  return std::sqrt(s);
}

DerivedQuantities derived_uv(double R, double S) {
  if (R == 0.0 || S == 0.0) {
    throw SingularityError(R == 0.0 ? "R" : "S", "U, V need nonzero R and S");
  }
  return {1.0 / R + 1.0 / S, 1.0 / S - 1.0 / R, 0.0, 0.0};
}

double lambda_inv_polar(double r, double p) {
  if (!(r > 0.0) || !(p < 0.0)) {
    throw DomainError("lambda_inv_polar needs r > 0 and p < 0");
  }
  const double disc = r * r - p * p;
  if (disc < 0.0) {
    throw DomainError("elliptic point: r^2 < p^2");
  }
  return r / std::abs(p) * std::sqrt(disc);
}

double lambda_inv_over_t(double r, double t) {
  require_rt(r, t);
  const double t2 = t * t;
  return r * std::sqrt(2.0 * r - t2) / (r - t2);
}

double lambda_inv_rt(double r, double t) { return t * lambda_inv_over_t(r, t); }

double q_polar(double r, double p) {
  if (!(r > 0.0) || !(p < 0.0)) {
    throw DomainError("q_polar needs r > 0 and p < 0");
  }
  const double disc = r * r - p * p;
  if (disc < 0.0) {
    throw DomainError("elliptic point: r^2 < p^2");
  }
  if (disc == 0.0) {
    throw SingularityError("r^2 - p^2", "Q is singular on the sonic circle");
  }
  return r * r / (2.0 * p * disc);
}

double t2q(double r, double t) {
  require_rt(r, t);
  const double t2 = t * t;
  return -r * r / (2.0 * (r - t2) * (2.0 * r - t2));
}

double q_rt(double r, double t) {
  require_rt(r, t);
  if (t == 0.0) {
    throw SingularityError("t^2", "Q is singular at t = 0; use t2q");
  }
  return t2q(r, t) / (t * t);
}

void guard_denominators(double lam_inv, double R, double S) {
  const double tol = 1e-10 * guard_scale(R, S);
  if (std::abs(R + lam_inv) < tol) {
    throw SingularityError("R + lambda_inv", "vanishing denominator R + lambda_inv");
  }
  if (std::abs(S - lam_inv) < tol) {
    throw SingularityError("S - lambda_inv", "vanishing denominator S - lambda_inv");
  }
}

CharSpeeds lambda_pm(double r, double t, double R, double S) {
  const double li = lambda_inv_rt(r, t);
  guard_denominators(li, R, S);
  const double two_t_li = 2.0 * t * li;
  return {two_t_li / (R + li), -two_t_li / (S - li)};
}

TransportSources rt_sources(double r, double t, double R, double S) {
  // 2 t Q (S - R) R / (S - l), written through t^2 Q, which stays finite as
  // t -> 0; (S - R) / t is bounded on solutions.
  const double li = lambda_inv_rt(r, t);
  guard_denominators(li, R, S);
  const double tq = t2q(r, t);
  if (t == 0.0) {
    throw SingularityError("t", "transport sources need (S - R) / t; t = 0 given");
  }
  const double k = 2.0 * tq / t;
  return {k * (S - R) * R / (S - li), k * (R - S) * S / (R + li)};
}

Coefficients coeff_E_h_f_g(double r, double t, double R, double S) {
  const double li = lambda_inv_rt(r, t);
  guard_denominators(li, R, S);
  const double t2 = t * t;
  const double a = r - t2;         // r - t^2
  const double b = 2.0 * r - t2;   // 2r - t^2
  const double sb = std::sqrt(b);
  const double Rp = R + li;        // R + lambda_inv
  const double Sm = S - li;        // S - lambda_inv

  Coefficients c;
  c.E = 2.0 * r * sb / a * (1.0 / Rp + 1.0 / Sm);

  c.h = t * (3.0 * r - t2) / (a * b) +
        (r * r * r * (3.0 * R - 3.0 * S + 4.0 * li) +
         2.0 * t * li * (t2 * t2 * t + r * r * t - 3.0 * r * t2 * t)) /
            (Rp * Sm * a * a * sb);

  const double common = r * r / (a * b) * c.E;
  c.f1 = (2.0 * R - S) / Sm * common;
  c.f2 = -R / Sm * (1.0 + (R - S) / Sm) * common;
  c.g1 = -S / Rp * (1.0 + (S - R) / Rp) * common;
  c.g2 = (2.0 * S - R) / Rp * common;

  const double poly = r * r * r - 3.0 * r * r * t2 + r * t2 * t2;
  const double tail = t * (3.0 * r - 2.0 * t2) / sb;
  const double pref = r / (a * a * b * sb) * c.E;
  c.f3 = pref * R * (R - S) / Sm * (poly / (Sm * a) - tail);
  c.g3 = pref * S * (S - R) / Rp * (-poly / (Rp * a) - tail);
  return c;
}

VCoefficients coeff_l1_l2(double r, double t, double R, double S, double Rr,
                          double Sr, double delta) {
  if (!(delta > 1.0 && delta < 2.0)) {
    throw DomainError("delta must lie in (1, 2)");
  }
  const double li = lambda_inv_rt(r, t);
  guard_denominators(li, R, S);
  const DerivedQuantities uv = derived_uv(R, S);
  const double t2 = t * t;
  const double a = r - t2;
  const double b = 2.0 * r - t2;
  const double dm = 1.0 - li / S;  // 1 - S^-1 lambda_inv
  const double dp = 1.0 + li / R;  // 1 + R^-1 lambda_inv

  VCoefficients out;
  out.l1 = r * r * (2.0 - li * uv.V) / (a * b * dm * dp);
  const double td = std::pow(t, delta);
  out.l2 = 2.0 * r * std::sqrt(b) / (a * R * S) *
           (td * Rr / (dm * R) + td * Sr / (dp * S));
  return out;
}

double l1_minus_one_over_t(double r, double t, double R, double S) {
  const double li = lambda_inv_rt(r, t);
  guard_denominators(li, R, S);
  const DerivedQuantities uv = derived_uv(R, S);
  const double V = uv.V;
  const double t2 = t * t;
  const double a = r - t2;
  const double b = 2.0 * r - t2;
  const double dm = 1.0 - li / S;
  const double dp = 1.0 + li / R;
  // Each numerator term carries a factor t (li = t * li_over_t), so divide
  // it out analytically.
  const double lt = lambda_inv_over_t(r, t);
  const double num_over_t = 3.0 * r * t - t2 * t + r * r * lt * V -
                            3.0 * r * t2 * lt * V + lt * t2 * t2 * V +
                            (2.0 * r * r - 3.0 * r * t2 + t2 * t2) * lt * li / (R * S);
  return num_over_t / (dm * dp * a * b);
}

}  // namespace sonic

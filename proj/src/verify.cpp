#include "sonic/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sonic {

std::string to_string(Mutation m) {
  switch (m) {
    case Mutation::none: return "none";
    case Mutation::h: return "h";
    case Mutation::f1: return "f1";
    case Mutation::f2: return "f2";
    case Mutation::f3: return "f3";
    case Mutation::g1: return "g1";
    case Mutation::g2: return "g2";
    case Mutation::g3: return "g3";
    case Mutation::l1: return "l1";
    case Mutation::l2: return "l2";
    case Mutation::f2_sign: return "f2_sign";
  }
  return "?";
}

namespace {

constexpr double kMut = 1.01;

double scale(Mutation m, Mutation which) { return m == which ? kMut : 1.0; }

Coefficients mutated(Coefficients c, Mutation m) {
  c.h *= scale(m, Mutation::h);
  c.f1 *= scale(m, Mutation::f1);
  c.f2 *= scale(m, Mutation::f2);
  c.f3 *= scale(m, Mutation::f3);
  c.g1 *= scale(m, Mutation::g1);
  c.g2 *= scale(m, Mutation::g2);
  c.g3 *= scale(m, Mutation::g3);
  if (m == Mutation::f2_sign) c.f2 = -c.f2;
  return c;
}

void refuse_near_sonic(double r, double t) {
  if (!(t >= 1e-4 * std::sqrt(r))) {
    throw DomainError("point too close to the sonic curve for finite differences");
  }
}

// Characteristic through (r, t) in the (r, t) plane, one RK4 step to t + dt.
// plus selects dr/dt = Lambda_+, otherwise Lambda_-.
double rt_retrace(const RSField& f, double r, double t, double dt, bool plus) {
  auto speed = [&](double rr, double tt) {
    const auto v = f.rs({rr, tt});
    const CharSpeeds s = lambda_pm(rr, tt, v[0], v[1]);
    return plus ? s.plus : s.minus;
  };
  const double k1 = speed(r, t);
  const double k2 = speed(r + 0.5 * dt * k1, t + 0.5 * dt);
  const double k3 = speed(r + 0.5 * dt * k2, t + 0.5 * dt);
  const double k4 = speed(r + dt * k3, t + dt);
  return r + dt * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

// Central difference of phi along a characteristic family.
template <class Phi>
double rt_directional(const RSField& f, RTPoint x, double h, bool plus, const Phi& phi) {
  const double ra = rt_retrace(f, x.r, x.t, h, plus);
  const double rb = rt_retrace(f, x.r, x.t, -h, plus);
  return (phi(RTPoint{ra, x.t + h}) - phi(RTPoint{rb, x.t - h})) / (2.0 * h);
}

template <class Phi>
double r_central(RTPoint x, double h, const Phi& phi) {
  return (phi(RTPoint{x.r + h, x.t}) - phi(RTPoint{x.r - h, x.t})) / (2.0 * h);
}

// Polar characteristic dr/dtheta = +-lambda_inv(r, p(r, theta)).
double polar_retrace(const PolarField& p, double r, double th, double dth, bool plus) {
  auto speed = [&](double rr, double tt) {
    const double li = lambda_inv_polar(rr, p({rr, tt}));
    return plus ? li : -li;
  };
  const double k1 = speed(r, th);
  const double k2 = speed(r + 0.5 * dth * k1, th + 0.5 * dth);
  const double k3 = speed(r + 0.5 * dth * k2, th + 0.5 * dth);
  const double k4 = speed(r + dth * k3, th + dth);
  return r + dth * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

template <class Phi>
double polar_directional(const PolarField& p, PolarPoint q, double h, bool plus,
                         const Phi& phi) {
  const double ra = polar_retrace(p, q.r, q.theta, h, plus);
  const double rb = polar_retrace(p, q.r, q.theta, -h, plus);
  return (phi(PolarPoint{ra, q.theta + h}) - phi(PolarPoint{rb, q.theta - h})) / (2.0 * h);
}

}  // namespace

// -- single-step residuals ------------------------------------------------------

double residual_cartesian(const CartField& p, CartPoint x, double h) {
  const double xi = x.xi, eta = x.eta;
  auto at = [&](double a, double b) { return p({xi + a * h, eta + b * h}); };
  const double c = at(0, 0);
  const double px = (at(1, 0) - at(-1, 0)) / (2.0 * h);
  const double py = (at(0, 1) - at(0, -1)) / (2.0 * h);
  const double pxx = (at(1, 0) - 2.0 * c + at(-1, 0)) / (h * h);
  const double pyy = (at(0, 1) - 2.0 * c + at(0, -1)) / (h * h);
  const double pxy = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4.0 * h * h);
  const double w = xi * px + eta * py;
  return (c * c - xi * xi) * pxx - 2.0 * xi * eta * pxy + (c * c - eta * eta) * pyy +
         (2.0 / c) * w * w - 2.0 * w;
}

double residual_polar(const PolarField& p, PolarPoint q, double h) {
  const double r = q.r, th = q.theta;
  const double c = p(q);
  const double pr_p = p({r + h, th}), pr_m = p({r - h, th});
  const double pt_p = p({r, th + h}), pt_m = p({r, th - h});
  const double pr = (pr_p - pr_m) / (2.0 * h);
  const double prr = (pr_p - 2.0 * c + pr_m) / (h * h);
  const double ptt = (pt_p - 2.0 * c + pt_m) / (h * h);
  const double c2 = c * c;
  return (c2 - r * r) * prr + (c2 / (r * r)) * ptt + (c2 / r) * pr + (2.0 * r * r / c) * pr * pr -
         2.0 * r * pr;
}

std::array<double, 2> decomposition_residuals(const PolarField& p, PolarPoint q, double h) {
  const double p0 = p(q);
  refuse_near_sonic(q.r, degeneracy_coordinate(q.r, p0));
  auto dplus = [&](PolarPoint x) {
    return polar_directional(p, x, h, true, [&](PolarPoint y) { return p(y); });
  };
  auto dminus = [&](PolarPoint x) {
    return polar_directional(p, x, h, false, [&](PolarPoint y) { return p(y); });
  };
  const double R = dplus(q);
  const double S = dminus(q);
  const double Q = q_polar(q.r, p0);
  const double pm = polar_directional(p, q, h, true, dminus);   // d+ d- p
  const double mp = polar_directional(p, q, h, false, dplus);   // d- d+ p
  return {pm - Q * (R - S) * S, mp - Q * (S - R) * R};
}

std::array<double, 3> commutator_residuals(const RSField& f, RTPoint x, double h, Mutation m) {
  refuse_near_sonic(x.r, x.t);
  const auto v = f.rs(x);
  const double R = v[0], S = v[1];
  const CharSpeeds sp = lambda_pm(x.r, x.t, R, S);
  const double gap = sp.plus - sp.minus;
  const Coefficients c = mutated(coeff_E_h_f_g(x.r, x.t, R, S), m);

  auto Lp = [&](RTPoint y) {
    const auto w = f.rs(y);
    return lambda_pm(y.r, y.t, w[0], w[1]).plus;
  };
  auto Lm = [&](RTPoint y) {
    const auto w = f.rs(y);
    return lambda_pm(y.r, y.t, w[0], w[1]).minus;
  };
  auto Rf = [&](RTPoint y) { return f.rs(y)[0]; };
  auto Sf = [&](RTPoint y) { return f.rs(y)[1]; };
  auto dminus_R = [&](RTPoint y) { return rt_directional(f, y, h, false, Rf); };
  auto dplus_S = [&](RTPoint y) { return rt_directional(f, y, h, true, Sf); };

  double rho_R = 0.0, rho_S = 0.0, rho_R_r = 0.0, rho_S_r = 0.0;
  if (f.defect) {
    const auto d = f.defect(x);
    rho_R = d[0];
    rho_S = d[1];
    rho_R_r = r_central(x, h, [&](RTPoint y) { return f.defect(y)[0]; });
    rho_S_r = r_central(x, h, [&](RTPoint y) { return f.defect(y)[1]; });
  }

  // Ratio. Lambda_+ depends on R alone and Lambda_- on S alone, so the
  // defect enters through dLambda_+/dR and dLambda_-/dS.
  const double li = lambda_inv_rt(x.r, x.t);
  const double dLp_dR = -2.0 * x.t * li / ((R + li) * (R + li));
  const double dLm_dS = 2.0 * x.t * li / ((S - li) * (S - li));
  const double ratio = (rt_directional(f, x, h, false, Lp) - rt_directional(f, x, h, true, Lm)) / gap;
  const double res_ratio =
      ratio - (2.0 / x.t + c.h) - (dLp_dR * rho_R - dLm_dS * rho_S) / gap;

  const double Rr = r_central(x, h, Rf);
  const double Sr = r_central(x, h, Sf);
  const double t = x.t;

  const double lhs_f = rt_directional(f, x, h, true, dminus_R) -
                       rt_directional(f, x, h, false, dminus_R);
  const double res_f = lhs_f - (t * c.f1 * Rr + t * c.f2 * Sr + t * t * c.f3) - gap * rho_R_r;

  const double lhs_g = rt_directional(f, x, h, true, dplus_S) -
                       rt_directional(f, x, h, false, dplus_S);
  const double res_g = lhs_g - (t * c.g1 * Rr + t * c.g2 * Sr + t * t * c.g3) - gap * rho_S_r;

  return {res_ratio, res_f, res_g};
}

double v_evolution_residual(const RSField& f, RTPoint x, double h, double delta, Mutation m) {
  refuse_near_sonic(x.r, x.t);
  auto Vf = [&](RTPoint y) {
    const auto w = f.rs(y);
    return derived_uv(w[0], w[1]).V;
  };
  const auto v = f.rs(x);
  const double R = v[0], S = v[1];
  const double Rr = r_central(x, h, [&](RTPoint y) { return f.rs(y)[0]; });
  const double Sr = r_central(x, h, [&](RTPoint y) { return f.rs(y)[1]; });
  VCoefficients lc = coeff_l1_l2(x.r, x.t, R, S, Rr, Sr, delta);
  lc.l1 *= scale(m, Mutation::l1);
  lc.l2 *= scale(m, Mutation::l2);
  const double Vt = (Vf({x.r, x.t + h}) - Vf({x.r, x.t - h})) / (2.0 * h);
  double forcing = 0.0;
  if (f.defect) {
    const auto d = f.defect(x);
    forcing = d[0] / (R * R) - d[1] / (S * S);
  }
  return Vt - lc.l1 * Vf(x) / x.t - lc.l2 * std::pow(x.t, 2.0 - delta) - forcing;
}

// -- step-halving studies ---------------------------------------------------------

bool ResidualReport::converges(double fraction) const {
  if (exact) return true;
  if (orders.empty()) return false;
  return min_order >= fraction * nominal_order;
}

ResidualReport order_report(const std::string& identity, const std::string& location,
                            std::vector<double> steps, std::vector<double> residuals,
                            double nominal_order) {
  constexpr double kRoundoff = 1e-10;
  ResidualReport rep;
  rep.identity = identity;
  rep.location = location;
  rep.nominal_order = nominal_order;
  for (double& r : residuals) r = std::abs(r);
  rep.steps = std::move(steps);
  rep.residuals = std::move(residuals);
  const std::size_t n = rep.residuals.size();
  if (n == 0) return rep;
  rep.residual = rep.residuals.back();
  rep.exact = *std::max_element(rep.residuals.begin(), rep.residuals.end()) <= kRoundoff;
  if (n >= 3 && !rep.exact) {
    rep.min_order = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      // A level already at roundoff says nothing about the order.
      if (rep.residuals[k + 1] <= kRoundoff) break;
      const double o = std::log(rep.residuals[k] / rep.residuals[k + 1]) /
                       std::log(rep.steps[k] / rep.steps[k + 1]);
      rep.orders.push_back(o);
      rep.min_order = std::min(rep.min_order, o);
    }
    if (rep.orders.empty()) rep.min_order = 0.0;
  }
  return rep;
}

ResidualReport halving_study(const std::string& identity, const std::string& location,
                             const std::function<double(double)>& residual_at, double h0,
                             int n, double nominal_order) {
  std::vector<double> steps, res;
  double h = h0;
  for (int k = 0; k < n; ++k, h *= 0.5) {
    steps.push_back(h);
    res.push_back(residual_at(h));
  }
  return order_report(identity, location, std::move(steps), std::move(res), nominal_order);
}

double richardson(const std::vector<double>& values, const std::vector<double>& orders) {
  if (values.size() < orders.size() + 1) {
    throw std::invalid_argument("richardson needs one more value than eliminated orders");
  }
  std::vector<double> v = values;
  for (double p : orders) {
    const double f = std::pow(2.0, p);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) v[k] = (f * v[k + 1] - v[k]) / (f - 1.0);
    v.pop_back();
  }
  return v.back();
}

std::vector<ResidualReport> rt_identity_study(const RSField& f, RTPoint x, double h0, int n,
                                              double delta) {
  const std::string loc = "r=" + std::to_string(x.r) + " t=" + std::to_string(x.t);
  const char* names[3] = {"commutator_ratio", "r_identity", "s_identity"};
  std::vector<ResidualReport> out;
  for (int j = 0; j < 3; ++j) {
    out.push_back(halving_study(
        names[j], loc, [&](double h) { return commutator_residuals(f, x, h)[j]; }, h0, n, 2.0));
  }
  out.push_back(halving_study(
      "v_evolution", loc, [&](double h) { return v_evolution_residual(f, x, h, delta); }, h0, n,
      2.0));
  return out;
}

std::vector<CanaryResult> mutation_canaries(const RSField& f, RTPoint x, double h0, int n,
                                            double delta) {
  auto eval = [&](Mutation m, int which, double h) {
    if (which == 3) return std::abs(v_evolution_residual(f, x, h, delta, m));
    return std::abs(commutator_residuals(f, x, h, m)[which]);
  };
  const std::pair<Mutation, int> cases[] = {
      {Mutation::h, 0},  {Mutation::f1, 1}, {Mutation::f2, 1}, {Mutation::f3, 1},
      {Mutation::f2_sign, 1}, {Mutation::g1, 2}, {Mutation::g2, 2}, {Mutation::g3, 2},
      {Mutation::l1, 3}, {Mutation::l2, 3},
  };
  const char* names[4] = {"commutator_ratio", "r_identity", "s_identity", "v_evolution"};
  const double h_fine = h0 * std::pow(0.5, n - 1);
  std::vector<CanaryResult> out;
  for (const auto& [m, which] : cases) {
    CanaryResult c;
    c.mutation = m;
    c.identity = names[which];
    c.clean = eval(Mutation::none, which, h_fine);
    c.mutated = eval(m, which, h_fine);
    c.plateau_ratio = c.mutated / eval(m, which, 2.0 * h_fine);
    c.plateaus = c.mutated > 10.0 * c.clean && c.plateau_ratio > 0.8;
    out.push_back(c);
  }
  return out;
}

// -- reference fields -------------------------------------------------------------

CartField wave_cartesian(const WaveParams& params) {
  return [params](CartPoint c) { return wave_state(c, params).p; };
}

PolarField wave_polar(const WaveParams& params) {
  return [params](PolarPoint q) { return wave_state(to_cart(q), params).p; };
}

RSField wave_rt() {
  RSField f;
  f.rs = [](RTPoint x) { return std::array<double, 2>{wave_R_rt(x.r, x.t), 0.0}; };
  return f;
}

ManufacturedCart manufactured_cartesian() {
  constexpr double a = 0.05;
  ManufacturedCart m;
  m.p = [](CartPoint c) { return -c.eta + a * std::sin(c.xi) * c.eta * c.eta; };
  m.exact_residual = [](CartPoint c) {
    const double xi = c.xi, eta = c.eta;
    const double s = std::sin(xi), co = std::cos(xi);
    const double p = -eta + a * s * eta * eta;
    const double px = a * co * eta * eta;
    const double py = -1.0 + 2.0 * a * s * eta;
    const double pxx = -a * s * eta * eta;
    const double pxy = 2.0 * a * co * eta;
    const double pyy = 2.0 * a * s;
    const double w = xi * px + eta * py;
    return (p * p - xi * xi) * pxx - 2.0 * xi * eta * pxy + (p * p - eta * eta) * pyy +
           (2.0 / p) * w * w - 2.0 * w;
  };
  return m;
}

namespace {

struct PolyRS {
  double R, S, Rr, Sr, Rt, St;
};

PolyRS manufactured_values(double r, double t) {
  const double d = r - 1.5;
  PolyRS v;
  v.R = -1.2 + 0.3 * t + 0.2 * d * t + 0.1 * t * t;
  v.Rr = 0.2 * t;
  v.Rt = 0.3 + 0.2 * d + 0.2 * t;
  v.S = -0.9 - 0.4 * t + 0.15 * d * d * t;
  v.Sr = 0.3 * d * t;
  v.St = -0.4 + 0.15 * d * d;
  return v;
}

}  // namespace

RSField manufactured_rt() {
  RSField f;
  f.rs = [](RTPoint x) {
    const PolyRS v = manufactured_values(x.r, x.t);
    return std::array<double, 2>{v.R, v.S};
  };
  f.defect = [](RTPoint x) {
    const PolyRS v = manufactured_values(x.r, x.t);
    const CharSpeeds sp = lambda_pm(x.r, x.t, v.R, v.S);
    const TransportSources src = rt_sources(x.r, x.t, v.R, v.S);
    return std::array<double, 2>{v.Rt + sp.minus * v.Rr - src.minus_source,
                                 v.St + sp.plus * v.Sr - src.plus_source};
  };
  return f;
}

// -- computed solution ------------------------------------------------------------

namespace {

double lagrange4(const double* x, const double* y, double at) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j != i) w *= (at - x[j]) / (x[i] - x[j]);
    }
    s += w * y[i];
  }
  return s;
}

bool covers(const RTLevel& lv, int k0) { return lv.lo <= k0 && k0 + 3 <= lv.hi; }

}  // namespace

PatchField::PatchField(std::shared_ptr<const RTField> field) : field_(std::move(field)) {
  if (!field_ || field_->levels.size() < 4) {
    throw std::invalid_argument("patch interpolant needs at least four levels");
  }
}

PatchField::Values PatchField::at(RTPoint x) const {
  const RTField& f = *field_;
  const auto& L = f.levels;
  const int n = int(L.size());
  if (!(x.t <= L.front().t && x.t >= L.back().t)) {
    throw DomainError("t outside the marched range");
  }
  int i = 0;
  while (i + 1 < n && L[i + 1].t > x.t) ++i;
  const int j0 = std::clamp(i - 1, 0, n - 4);
  const double u = (x.r - f.r0) / f.dr;
  const int k0 = int(std::floor(u)) - 1;
  double ts[4], Rt[4], St[4], Tt[4];
  double rs[4];
  for (int c = 0; c < 4; ++c) rs[c] = f.r_at(k0 + c);
  for (int l = 0; l < 4; ++l) {
    const RTLevel& lv = L[j0 + l];
    if (!covers(lv, k0)) throw DomainError("r outside the marched window");
    ts[l] = lv.t;
    Rt[l] = lagrange4(rs, &lv.R[k0 - lv.lo], x.r);
    St[l] = lagrange4(rs, &lv.S[k0 - lv.lo], x.r);
    Tt[l] = lagrange4(rs, &lv.theta[k0 - lv.lo], x.r);
  }
  return {lagrange4(ts, Rt, x.t), lagrange4(ts, St, x.t), lagrange4(ts, Tt, x.t)};
}

RSField PatchField::rs_field() const {
  auto self = *this;
  RSField f;
  f.rs = [self](RTPoint x) {
    const Values v = self.at(x);
    return std::array<double, 2>{v.R, v.S};
  };
  return f;
}

double PatchField::t_of(double r, double theta) const {
  const auto& L = field_->levels;
  const int k0 = int(std::floor((r - field_->r0) / field_->dr)) - 1;
  // Deepest level such that it and the three above cover the stencil.
  int deepest = -1;
  for (int j = 0; j < int(L.size()) && covers(L[j], k0); ++j) deepest = j;
  if (deepest < 3) throw DomainError("r outside the marched window");
  double lo = L[deepest].t, hi = L.front().t;
  // theta decreases with t
  const double th_lo = at({r, lo}).theta, th_hi = at({r, hi}).theta;
  if (!(theta <= th_lo && theta >= th_hi)) throw DomainError("angle outside the marched range");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (at({r, mid}).theta > theta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PolarField PatchField::polar_field() const {
  auto self = *this;
  return [self](PolarPoint q) {
    const double t = self.t_of(q.r, q.theta);
    return t * t - q.r;
  };
}

CartField PatchField::cart_field() const {
  const PolarField pf = polar_field();
  return [pf](CartPoint c) { return pf(to_polar(c)); };
}

}  // namespace sonic

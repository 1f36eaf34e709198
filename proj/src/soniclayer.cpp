#include "sonic/soniclayer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace sonic {

namespace {


// Second-order difference of u at local index m (size n), using the requested
// side when it has two points, otherwise centered, otherwise the other side.
// side: -1 backward, +1 forward, 0 centered.
double diff2(const std::vector<double>& u, int m, int side, double dr) {
  const int n = int(u.size());
  const bool back_ok = m >= 2;
  const bool fwd_ok = m + 2 < n;
  const bool ctr_ok = m >= 1 && m + 1 < n;
  auto backward = [&] { return (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * dr); };
  auto forward = [&] { return (-3.0 * u[m] + 4.0 * u[m + 1] - u[m + 2]) / (2.0 * dr); };
  auto centered = [&] { return (u[m + 1] - u[m - 1]) / (2.0 * dr); };
  if (side < 0 && back_ok) return backward();
  if (side > 0 && fwd_ok) return forward();
  if (ctr_ok) return centered();
  if (back_ok) return backward();
  if (fwd_ok) return forward();
  if (n >= 2) return m == 0 ? (u[1] - u[0]) / dr : (u[m] - u[m - 1]) / dr;
  return 0.0;
}

// Upwind difference for the march. side: -1 data from smaller r, +1 from
// larger r. Where the window ends on the upwind side the order drops, and the
// edge cell itself sees no inflow gradient; downwind stencils are never used.
double upwind(const std::vector<double>& u, int m, int side, double dr) {
  const int n = int(u.size());
  if (side < 0) {
    if (m >= 2) return (3.0 * u[m] - 4.0 * u[m - 1] + u[m - 2]) / (2.0 * dr);
    if (m == 1) return (u[1] - u[0]) / dr;
    return 0.0;
  }
  if (m + 2 < n) return (-3.0 * u[m] + 4.0 * u[m + 1] - u[m + 2]) / (2.0 * dr);
  if (m + 1 < n) return (u[m + 1] - u[m]) / dr;
  return 0.0;
}

struct Rates {
  std::vector<double> R, S, theta;
  double max_speed = 0.0;   // max |Lambda|
  double right_move = 0.0;  // max over families of the downward-march velocity
  double left_move = 0.0;   // max of its negative
};

// Time derivatives of the marched unknowns on one level (d/dt, t increasing).
Rates level_rates(const RTField& f, int lo, double t, const std::vector<double>& R,
                  const std::vector<double>& S) {
  const int n = int(R.size());
  Rates out;
  out.R.resize(n);
  out.S.resize(n);
  out.theta.resize(n);
  for (int m = 0; m < n; ++m) {
    const double r = f.r_at(lo + m);
    const CharSpeeds sp = lambda_pm(r, t, R[m], S[m]);
    const TransportSources src = rt_sources(r, t, R[m], S[m]);
    // Marching toward smaller t, u moves with velocity -Lambda in r; take the
    // difference from the side the data comes from.
    const double Rr = upwind(R, m, sp.minus < 0.0 ? -1 : 1, f.dr);
    const double Sr = upwind(S, m, sp.plus < 0.0 ? -1 : 1, f.dr);
    out.R[m] = src.minus_source - sp.minus * Rr;
    out.S[m] = src.plus_source - sp.plus * Sr;
    out.theta[m] = 4.0 * t / (R[m] + S[m]);
    out.max_speed = std::max({out.max_speed, std::abs(sp.plus), std::abs(sp.minus)});
    out.right_move = std::max({out.right_move, -sp.plus, -sp.minus});
    out.left_move = std::max({out.left_move, sp.plus, sp.minus});
  }
  return out;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Indices (into field.levels) of the four stored levels used to interpolate
// at t, ordered by decreasing t.
std::array<int, 4> level_window(const RTField& field, double t) {
  const int L = int(field.levels.size());
  if (L < 4) throw DiagnosticsError("need at least four t-levels to interpolate");
  const double t_hi = field.levels.front().t;
  const double t_lo = field.levels.back().t;
  const double slack = 1e-12 * t_hi;
  if (t > t_hi + slack || t < t_lo - slack) {
    throw DiagnosticsError("t outside the marched range");
  }
  int n = 0;
  while (n + 1 < L && field.levels[n + 1].t >= t) ++n;
  int first = std::clamp(n - 1, 0, L - 4);
  return {first, first + 1, first + 2, first + 3};
}

double lagrange4(const double* x, const double* y, double at) {
  double sum = 0.0;
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b) {
      if (b != a) w *= (at - x[b]) / (x[a] - x[b]);
    }
    sum += w * y[a];
  }
  return sum;
}

double value_at(const RTLevel& lv, const std::vector<double>& v, int k) {
  if (k < lv.lo || k > lv.hi) {
    throw DiagnosticsError("column outside a level's r-window");
  }
  return v[k - lv.lo];
}

}  // namespace

LevelDerivatives r_derivatives(const RTField& field, const RTLevel& level) {
  LevelDerivatives d;
  const int n = level.count();
  d.Rr.resize(n);
  d.Sr.resize(n);
  for (int m = 0; m < n; ++m) {
    d.Rr[m] = diff2(level.R, m, 0, field.dr);
    d.Sr[m] = diff2(level.S, m, 0, field.dr);
  }
  return d;
}

// -- monotone cubic -------------------------------------------------------------

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw HandoffError("monotone cubic needs >= 2 matching points");
  for (std::size_t k = 1; k < n; ++k) {
    if (!(x_[k] > x_[k - 1])) throw HandoffError("interpolation abscissae must increase strictly");
  }
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x_[k + 1] - x_[k];
    del[k] = (y_[k + 1] - y_[k]) / h[k];
  }
  d_.assign(n, del[0]);
  if (n == 2) return;

  // C2 spline slopes with three-point parabolic end slopes; the interior
  // system is strictly diagonally dominant.
  auto parabolic = [](double h0, double h1, double d0, double d1) {
    return ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
  };
  d_[0] = parabolic(h[0], h[1], del[0], del[1]);
  d_[n - 1] = parabolic(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  if (n > 3) {
    const std::size_t m = n - 2;
    std::vector<double> a(m), b(m), c(m), rhs(m);
    for (std::size_t q = 0; q < m; ++q) {
      const std::size_t i = q + 1;
      a[q] = h[i];
      b[q] = 2.0 * (h[i - 1] + h[i]);
      c[q] = h[i - 1];
      rhs[q] = 3.0 * (h[i] * del[i - 1] + h[i - 1] * del[i]);
    }
    rhs[0] -= a[0] * d_[0];
    rhs[m - 1] -= c[m - 1] * d_[n - 1];
    for (std::size_t q = 1; q < m; ++q) {
      const double w = a[q] / b[q - 1];
      b[q] -= w * c[q - 1];
      rhs[q] -= w * rhs[q - 1];
    }
    d_[m] = rhs[m - 1] / b[m - 1];
    for (std::size_t q = m - 1; q-- > 0;) d_[q + 1] = (rhs[q] - c[q] * d_[q + 2]) / b[q];
  } else {
    d_[1] = (h[1] * del[0] + h[0] * del[1]) / (h[0] + h[1]);
  }

  // Hyman filter: slopes outside [0, 3 min|secant|] (in the secant's sign)
  // are clipped, zero at local extrema. Smooth monotone data passes through.
  auto clip = [](double d, double s) {
    if (s == 0.0) return 0.0;
    const double sg = s > 0.0 ? 1.0 : -1.0;
    return sg * std::clamp(sg * d, 0.0, 3.0 * std::abs(s));
  };
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (del[k - 1] * del[k] <= 0.0) {
      d_[k] = 0.0;
    } else {
      const double s = std::abs(del[k - 1]) < std::abs(del[k]) ? del[k - 1] : del[k];
      d_[k] = clip(d_[k], s);
    }
  }
  d_[0] = clip(d_[0], del[0]);
  d_[n - 1] = clip(d_[n - 1], del[n - 2]);
}

double MonotoneCubic::operator()(double x) const {
  if (x < x_.front() || x > x_.back()) throw HandoffError("interpolant evaluated outside its range");
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t k = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - x_.begin(), 1) - 1, x_.size() - 2);
  const double h = x_[k + 1] - x_[k];
  const double s = (x - x_[k]) / h;
  const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
  const double h10 = s * (1.0 - s) * (1.0 - s);
  const double h01 = s * s * (3.0 - 2.0 * s);
  const double h11 = s * s * (s - 1.0);
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

// -- handoff -----------------------------------------------------------------

RTField handoff(const std::vector<LevelCrossing>& crossings, double t0, int nr, double trim) {
  if (nr < 4) throw HandoffError("handoff grid needs >= 4 points");
  std::vector<double> r, R, S, th;
  for (const auto& c : crossings) {
    if (!r.empty() && !(c.r > r.back() + 1e-13 * std::abs(c.r))) continue;
    r.push_back(c.r);
    R.push_back(c.R);
    S.push_back(c.S);
    th.push_back(c.theta);
  }
  if (r.size() < 4) {
    throw HandoffError("level r + p = t0^2 is crossed by fewer than four strands");
  }
  const MonotoneCubic fR(r, R), fS(r, S), fth(r, th);
  const double span = r.back() - r.front();
  const double a = r.front() + trim * span;
  const double b = r.back() - trim * span;
  RTField f;
  f.r0 = a;
  f.nr = nr;
  f.dr = (b - a) / (nr - 1);
  RTLevel top;
  top.t = t0;
  top.lo = 0;
  top.hi = nr - 1;
  for (int k = 0; k < nr; ++k) {
    const double rk = k == nr - 1 ? b : f.r_at(k);
    if (!(t0 * t0 < rk)) throw HandoffError("handoff level violates t^2 < r");
    top.R.push_back(fR(rk));
    top.S.push_back(fS(rk));
    top.theta.push_back(fth(rk));
  }
  f.levels.push_back(std::move(top));
  return f;
}

RTField handoff(const CharacteristicMesh& mesh, double t0, int nr, double trim) {
  return handoff(plus_strand_crossings(mesh, t0), t0, nr, trim);
}

// -- march -------------------------------------------------------------------

RTField rt_march(RTField field, const MarchOptions& opts, MarchStats* stats) {
  if (field.levels.empty()) throw MarchError("march needs an initial level");
  if (!(opts.t_min > 0.0) || !(opts.ratio > 0.0 && opts.ratio < 1.0) ||
      !(opts.courant > 0.0 && opts.courant <= 0.9)) {
    throw MarchError("invalid march options");
  }
  field.levels.resize(1);
  MarchStats st;
  double drift_left = 0.0;
  double drift_right = 0.0;
  int removed_left = 0;
  int removed_right = 0;

  while (field.levels.back().t > opts.t_min * (1.0 + 1e-12)) {
    const RTLevel& cur = field.levels.back();
    const double t = cur.t;
    const Rates k1 = level_rates(field, cur.lo, t, cur.R, cur.S);

    double dt = (1.0 - opts.ratio) * t;
    const double dt_cfl = k1.max_speed > 0.0 ? opts.courant * field.dr / k1.max_speed
                                             : std::numeric_limits<double>::infinity();
    if (dt > dt_cfl) {
      if (!opts.adapt) {
        throw MarchError("step cap violated: dt max|Lambda| = " +
                         std::to_string(dt * k1.max_speed) + " > " +
                         std::to_string(opts.courant * field.dr));
      }
      dt = dt_cfl;
    }
    if (t - dt < opts.t_min) dt = t - opts.t_min;

    const int n = cur.count();
    std::vector<double> Rh(n), Sh(n), thh(n);
    for (int m = 0; m < n; ++m) {
      Rh[m] = cur.R[m] - 0.5 * dt * k1.R[m];
      Sh[m] = cur.S[m] - 0.5 * dt * k1.S[m];
    }
    const Rates k2 = level_rates(field, cur.lo, t - 0.5 * dt, Rh, Sh);

    RTLevel next;
    next.t = t - dt;
    next.R.resize(n);
    next.S.resize(n);
    next.theta.resize(n);
    for (int m = 0; m < n; ++m) {
      next.R[m] = cur.R[m] - dt * k2.R[m];
      next.S[m] = cur.S[m] - dt * k2.S[m];
      next.theta[m] = cur.theta[m] - dt * k2.theta[m];
    }
    if (!all_finite(next.R) || !all_finite(next.S) || !all_finite(next.theta)) {
      throw MarchError("non-finite values at t = " + std::to_string(next.t));
    }

    // Characteristic cone: data leaving through an end is no longer
    // determined by the initial level.
    const double speed = std::max(k1.max_speed, k2.max_speed);
    drift_left += std::max(k1.right_move, k2.right_move) * dt / field.dr;
    drift_right += std::max(k1.left_move, k2.left_move) * dt / field.dr;
    const int drop_left = int(std::floor(drift_left)) - removed_left;
    const int drop_right = int(std::floor(drift_right)) - removed_right;
    removed_left += drop_left;
    removed_right += drop_right;
    const int allowed = int(std::ceil(speed * dt / field.dr - 1e-12));
    st.max_removed_per_step = std::max({st.max_removed_per_step, drop_left, drop_right});
    st.max_allowed_per_step = std::max(st.max_allowed_per_step, allowed);
    if (drop_left > allowed || drop_right > allowed) st.cone_consistent = false;

    next.lo = cur.lo + drop_left;
    next.hi = cur.hi - drop_right;
    if (next.hi - next.lo + 1 < 4) {
      throw MarchError("r-window collapsed before reaching t_min");
    }
    auto cut = [&](std::vector<double>& v) {
      v = std::vector<double>(v.begin() + drop_left, v.end() - drop_right);
    };
    cut(next.R);
    cut(next.S);
    cut(next.theta);
    field.levels.push_back(std::move(next));
    ++st.steps;
  }
  if (stats) *stats = st;
  return field;
}

// -- sonic curve -------------------------------------------------------------

double level_curve_slope(double r, double t, double R, double S) {
  if (!(t > 0.0)) throw DomainError("level-curve slope needs t > 0");
  const double li = lambda_inv_rt(r, t);
  const double p_r = (R - S) / (2.0 * li);
  const double p_theta = 0.5 * (R + S);
  if (p_theta == 0.0) throw SingularityError("R + S", "level-curve slope with R + S = 0");
  return -(1.0 + p_r) / p_theta;
}

std::vector<double> eps_schedule(double t0, double t_min, double ratio,
                                 double eps_min_factor) {
  if (!(ratio > 1.0)) throw DiagnosticsError("eps ratio must exceed 1");
  std::vector<double> out;
  const double eps_min = eps_min_factor * t_min * t_min;
  for (double e = t0 * t0; e >= eps_min * (1.0 - 1e-12); e /= ratio) out.push_back(e);
  return out;
}

ColumnValue column_at(const RTField& field, int k, double t) {
  const auto w = level_window(field, t);
  double ts[4], Rs[4], Ss[4], ths[4];
  for (int a = 0; a < 4; ++a) {
    const RTLevel& lv = field.levels[w[a]];
    ts[a] = lv.t;
    Rs[a] = value_at(lv, lv.R, k);
    Ss[a] = value_at(lv, lv.S, k);
    ths[a] = value_at(lv, lv.theta, k);
  }
  return {lagrange4(ts, Rs, t), lagrange4(ts, Ss, t), lagrange4(ts, ths, t)};
}

std::vector<SonicSample> sonic_trace(const RTField& field,
                                     const std::vector<double>& eps_schedule) {
  std::vector<SonicSample> out;
  for (double eps : eps_schedule) {
    if (!(eps > 0.0)) throw DiagnosticsError("eps must be positive");
    const double t = std::sqrt(eps);
    const auto w = level_window(field, t);
    int lo = field.levels[w[0]].lo;
    int hi = field.levels[w[0]].hi;
    for (int a = 1; a < 4; ++a) {
      lo = std::max(lo, field.levels[w[a]].lo);
      hi = std::min(hi, field.levels[w[a]].hi);
    }
    const std::size_t first = out.size();
    for (int k = lo; k <= hi; ++k) {
      const ColumnValue v = column_at(field, k, t);
      SonicSample s;
      s.r = field.r_at(k);
      s.eps = eps;
      s.theta_eps = v.theta;
      s.dtheta_eps = level_curve_slope(s.r, t, v.R, v.S);
      out.push_back(s);
    }
    std::vector<double> th;
    for (std::size_t q = first; q < out.size(); ++q) th.push_back(out[q].theta_eps);
    for (std::size_t q = first; q < out.size(); ++q) {
      out[q].dtheta_eps_fd = diff2(th, int(q - first), 0, field.dr);
    }
  }
  return out;
}

std::vector<double> slope_cauchy_gaps(const std::vector<SonicSample>& samples) {
  // Group by eps, preserving order.
  std::vector<std::vector<const SonicSample*>> groups;
  for (const auto& s : samples) {
    if (groups.empty() || groups.back().front()->eps != s.eps) groups.emplace_back();
    groups.back().push_back(&s);
  }
  std::vector<double> gaps;
  for (std::size_t g = 0; g + 1 < groups.size(); ++g) {
    double sup = 0.0;
    std::size_t b = 0;
    for (const SonicSample* a : groups[g]) {
      while (b < groups[g + 1].size() && groups[g + 1][b]->r < a->r - 1e-12 * a->r) ++b;
      if (b < groups[g + 1].size() && std::abs(groups[g + 1][b]->r - a->r) <= 1e-12 * a->r) {
        sup = std::max(sup, std::abs(groups[g + 1][b]->dtheta_eps - a->dtheta_eps));
      }
    }
    gaps.push_back(sup);
  }
  return gaps;
}

// -- extrapolation -------------------------------------------------------------

SonicValues extrapolate_to_sonic(const RTField& field, double t_top, double q) {
  if (!(q > 1.0)) throw DiagnosticsError("extrapolation ratio must exceed 1");
  const double ts[3] = {t_top, t_top / q, t_top / (q * q)};
  // Quadratic through the three samples, evaluated at t = 0.
  double w[3];
  for (int a = 0; a < 3; ++a) {
    w[a] = 1.0;
    for (int b = 0; b < 3; ++b) {
      if (b != a) w[a] *= (0.0 - ts[b]) / (ts[a] - ts[b]);
    }
  }
  SonicValues out;
  const RTLevel& bottom = field.bottom();
  for (int k = bottom.lo; k <= bottom.hi; ++k) {
    double R = 0.0, S = 0.0, th = 0.0;
    for (int a = 0; a < 3; ++a) {
      const ColumnValue v = column_at(field, k, ts[a]);
      R += w[a] * v.R;
      S += w[a] * v.S;
      th += w[a] * v.theta;
    }
    out.r.push_back(field.r_at(k));
    out.R.push_back(R);
    out.S.push_back(S);
    out.theta.push_back(th);
  }
  return out;
}

// -- diagnostics ---------------------------------------------------------------

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (f.intercept + f.slope * x[k]);
    ss += e * e;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

RateFit fit_rate(const RTField& field, double t_lo, double t_hi) {
  RateFit fit;
  std::vector<const RTLevel*> used;
  for (const auto& lv : field.levels) {
    if (lv.t >= t_lo * (1.0 - 1e-12) && lv.t <= t_hi * (1.0 + 1e-12)) used.push_back(&lv);
  }
  fit.samples = used.size();
  if (used.size() < 8) throw DiagnosticsError("rate fit needs at least 8 t-levels in its window");
  std::vector<double> x, y;
  for (const RTLevel* lv : used) {
    double sup = 0.0;
    for (int m = 0; m < lv->count(); ++m) sup = std::max(sup, std::abs(lv->R[m] - lv->S[m]));
    if (!(sup > 0.0)) {
      fit.degenerate = true;
      return fit;
    }
    x.push_back(std::log(lv->t));
    y.push_back(std::log(sup));
  }
  const LineFit lf = least_squares(x, y);
  fit.exponent = lf.slope;
  fit.constant = std::exp(lf.intercept);
  fit.residual = lf.rms;

  // Per-column exponents over the columns present on every used level.
  int lo = used.front()->lo, hi = used.front()->hi;
  for (const RTLevel* lv : used) {
    lo = std::max(lo, lv->lo);
    hi = std::min(hi, lv->hi);
  }
  fit.column_exponent_min = std::numeric_limits<double>::infinity();
  fit.column_exponent_max = -std::numeric_limits<double>::infinity();
  for (int k = lo; k <= hi; ++k) {
    std::vector<double> yk;
    for (const RTLevel* lv : used) {
      const double d = std::abs(lv->R[k - lv->lo] - lv->S[k - lv->lo]);
      if (!(d > 0.0)) break;
      yk.push_back(std::log(d));
    }
    if (yk.size() != x.size()) {
      fit.degenerate = true;
      continue;
    }
    const double e = least_squares(x, yk).slope;
    fit.column_exponent_min = std::min(fit.column_exponent_min, e);
    fit.column_exponent_max = std::max(fit.column_exponent_max, e);
  }
  return fit;
}

Diagnostics diagnostics(const RTField& field, const std::vector<double>& deltas) {
  if (field.levels.size() < 2) throw DiagnosticsError("diagnostics need a marched field");
  const double t0 = field.top().t;
  const double t_min = field.bottom().t;
  if (t0 / t_min < 100.0) {
    throw DiagnosticsError("insufficient t-range: t0 / t_min must be at least 100");
  }
  for (double d : deltas) {
    if (!(d > 1.0 && d < 2.0)) throw DiagnosticsError("delta must lie in (1, 2)");
  }
  Diagnostics out;
  const std::size_t nd = deltas.size();
  out.bounds.resize(nd);
  for (std::size_t q = 0; q < nd; ++q) {
    out.bounds[q].delta = deltas[q];
    out.bounds[q].constants.delta = deltas[q];
    out.bounds[q].constants.K3 = std::numeric_limits<double>::infinity();
  }
  double K1 = 0.0, K2 = 0.0, K3 = std::numeric_limits<double>::infinity(), K4 = 0.0;
  std::vector<double> K5(nd, 0.0);
  double top_v_over_t = 0.0;
  double top_gh = 0.0;  // max |G|, |H| on the top level

  for (std::size_t li = 0; li < field.levels.size(); ++li) {
    const RTLevel& lv = field.levels[li];
    const double t = lv.t;
    const LevelDerivatives d = r_derivatives(field, lv);
    LevelMonitor mon;
    mon.t = t;
    mon.td_Rr.assign(nd, 0.0);
    mon.td_Sr.assign(nd, 0.0);
    for (int m = 0; m < lv.count(); ++m) {
      const double r = field.r_at(lv.lo + m);
      const double R = lv.R[m], S = lv.S[m];
      const DerivedQuantities uv = derived_uv(R, S);
      mon.v_over_t = std::max(mon.v_over_t, std::abs(uv.V) / t);
      mon.sup_diff = std::max(mon.sup_diff, std::abs(R - S));
      for (std::size_t q = 0; q < nd; ++q) {
        const double td = std::pow(t, deltas[q]);
        mon.td_Rr[q] = std::max(mon.td_Rr[q], td * std::abs(d.Rr[m]));
        mon.td_Sr[q] = std::max(mon.td_Sr[q], td * std::abs(d.Sr[m]));
        const VCoefficients l = coeff_l1_l2(r, t, R, S, d.Rr[m], d.Sr[m], deltas[q]);
        K5[q] = std::max(K5[q], std::abs(l.l2));
      }
      const Coefficients c = coeff_E_h_f_g(r, t, R, S);
      K1 = std::max({K1, std::abs(c.h), std::abs(c.f3), std::abs(c.g3)});
      K2 = std::max({K2, std::abs(c.f1), std::abs(c.f2), std::abs(c.g1), std::abs(c.g2)});
      K3 = std::min(K3, std::abs(c.E));
      K4 = std::max(K4, std::abs(l1_minus_one_over_t(r, t, R, S)));
      const TransportSources src = rt_sources(r, t, R, S);
      out.L = std::max({out.L, std::abs(src.minus_source), std::abs(src.plus_source)});
      if (li == 0) {
        const CharSpeeds sp = lambda_pm(r, t, R, S);
        const double gap = sp.plus - sp.minus;
        top_gh = std::max({top_gh, std::abs(gap * d.Rr[m]), std::abs(gap * d.Sr[m])});
      }
    }
    if (li == 0) top_v_over_t = mon.v_over_t;
    out.v_over_t = std::max(out.v_over_t, mon.v_over_t);
    for (std::size_t q = 0; q < nd; ++q) {
      out.bounds[q].td_Rr = std::max(out.bounds[q].td_Rr, mon.td_Rr[q]);
      out.bounds[q].td_Sr = std::max(out.bounds[q].td_Sr, mon.td_Sr[q]);
    }
    out.levels.push_back(std::move(mon));
  }

  for (std::size_t q = 0; q < nd; ++q) {
    const double delta = deltas[q];
    MonitorConstants& mc = out.bounds[q].constants;
    mc.K1 = K1;
    mc.K2 = K2;
    mc.K3 = K3;
    mc.K4 = K4;
    mc.K5 = K5[q];
    mc.M0 = top_gh / (K2 * std::pow(t0, 2.0 - delta) * std::exp(K1 * t0)) + 1.0;
    const double e4 = std::exp(K4 * t0);
    mc.Mhat = e4 * (top_v_over_t + e4 * K5[q] * std::pow(t0, 2.0 - delta) / (2.0 - delta));
    out.bounds[q].k3_dominates = K3 > 2.0 / delta * K2 * std::exp(2.0 * K1 * t0);
    out.bounds[q].k1_below_k2 = K1 < K2;
  }

  for (const auto& mon : out.levels) out.w_samples.push_back(2.0 * out.L * mon.t + mon.sup_diff);
  out.rate = fit_rate(field, 10.0 * t_min, t0 / 4.0);
  return out;
}

}  // namespace sonic

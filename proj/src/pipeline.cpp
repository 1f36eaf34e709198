#include "sonic/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace sonic {

TraceReport run_trace(const SolverConfig& config) {
  TraceReport out;
  out.ab = trace_AB(config.wave, 1e-3);
  const CartPoint b = point_B(config.wave);
  const CartPoint end = out.ab.points.back().c;
  out.endpoint_error = std::hypot(end.xi - b.xi, end.eta - b.eta);
  // AB lies on xi^2 + eta^2 + p1 eta = 0.
  const double radius = -0.5 * config.wave.p1;
  for (const auto& tp : out.ab.points) {
    const double d = std::abs(std::hypot(tp.c.xi, tp.c.eta - radius) - radius);
    out.circle_deviation = std::max(out.circle_deviation, d);
  }
  return out;
}

MarchRun run_march(const SolverConfig& config) {
  MarchRun run;
  run.mesh = solve(config);
  RTField top = handoff(run.mesh, config.t0, config.nr, config.r_trim);
  MarchOptions opts;
  opts.t_min = config.t_min();
  opts.ratio = config.dt_ratio;
  opts.courant = config.courant;
  run.field = rt_march(std::move(top), opts, &run.stats);
  return run;
}

SignReport sign_report(const MarchRun& run) {
  SignReport s;
  s.max_R = -std::numeric_limits<double>::infinity();
  s.max_S = -std::numeric_limits<double>::infinity();
  for (const CharNode& n : run.mesh.nodes()) {
    s.max_R = std::max(s.max_R, n.w.R);
    s.max_S = std::max(s.max_S, n.w.S);
    const double a = std::max(std::abs(n.w.R), std::abs(n.w.S));
    s.sup_abs = std::max(s.sup_abs, a);
    if (n.minus_parent_i < 0 || n.plus_parent_i < 0) s.boundary_sup = std::max(s.boundary_sup, a);
  }
  for (const RTLevel& lv : run.field.levels) {
    for (int q = 0; q < lv.count(); ++q) {
      s.max_R = std::max(s.max_R, lv.R[q]);
      s.max_S = std::max(s.max_S, lv.S[q]);
      s.sup_abs = std::max({s.sup_abs, std::abs(lv.R[q]), std::abs(lv.S[q])});
    }
  }
  s.nonpositive = s.max_R <= 0.0 && s.max_S <= 0.0;
  s.bounded = s.sup_abs <= 2.0 * s.boundary_sup;
  return s;
}

SonicReport sonic_report(const SolverConfig& config, const RTField& field) {
  SonicReport rep;
  rep.eps = eps_schedule(config.t0, config.t_min(), config.eps_ratio, config.eps_min_factor);
  rep.samples = sonic_trace(field, rep.eps);
  rep.gaps = slope_cauchy_gaps(rep.samples);
  for (const auto& s : rep.samples) {
    rep.sup_slope = std::max(rep.sup_slope, std::abs(s.dtheta_eps));
    rep.max_slope_fd_gap = std::max(rep.max_slope_fd_gap, std::abs(s.dtheta_eps - s.dtheta_eps_fd));
  }
  const double t_top = 32.0 * config.t_min();
  rep.route_a = extrapolate_to_sonic(field, t_top, 2.0);
  rep.route_b = extrapolate_to_sonic(field, t_top, 3.0);
  for (std::size_t k = 0; k < rep.route_a.r.size(); ++k) {
    rep.route_gap = std::max({rep.route_gap, std::abs(rep.route_a.R[k] - rep.route_b.R[k]),
                              std::abs(rep.route_a.S[k] - rep.route_b.S[k])});
    rep.matching = std::max({rep.matching, std::abs(rep.route_a.R[k] - rep.route_a.S[k]),
                             std::abs(rep.route_b.R[k] - rep.route_b.S[k])});
  }
  return rep;
}

DiagnoseReport run_diagnose(const SolverConfig& config, const MarchRun& run) {
  DiagnoseReport rep;
  rep.diag = diagnostics(run.field, config.deltas);
  rep.sonic = sonic_report(config, run.field);
  rep.sign = sign_report(run);
  return rep;
}

std::vector<std::string> strict_violations(const SolverConfig& config,
                                           const DiagnoseReport& report) {
  std::vector<std::string> v;
  if (!config.wave.within_closeness()) {
    v.push_back("|p4 - p1| exceeds kappa |p1|; the regularity result assumes p4 close to p1");
  }
  const double e = report.diag.rate.exponent;
  if (report.diag.rate.degenerate || !(e >= 0.9 && e <= 1.1)) {
    v.push_back("rate exponent " + format_double(e) + " outside [0.9, 1.1]");
  }
  if (!report.sign.nonpositive) v.push_back("R or S positive somewhere");
  if (!report.sign.bounded) v.push_back("max(|R|, |S|) exceeds twice the boundary supremum");
  const double tol = 5e-3 * std::abs(config.wave.p1);
  if (!(report.sonic.matching <= tol)) {
    v.push_back("R and S differ by " + format_double(report.sonic.matching) +
                " at the sonic line (tolerance " + format_double(tol) + ")");
  }
  return v;
}

// -- verify --------------------------------------------------------------------

bool VerifyReport::passed() const {
  for (const auto& r : exact) {
    if (!r.converges()) return false;
  }
  for (const auto& r : patch) {
    if (!r.converges()) return false;
  }
  for (const auto& c : canaries) {
    if (!c.plateaus) return false;
  }
  return wave_polar_richardson <= 1e-10;
}

double wave_polar_richardson(const WaveParams& params, double h, int* points) {
  const PolarField p = wave_polar(params);
  const double w = params.p4 - params.p1;
  const double eta_lo = -params.p4 + 0.1 * w, eta_hi = -params.p1 - 0.1 * w;
  double worst = 0.0;
  int count = 0;
  for (int i = 0; i < 10; ++i) {
    const double th = 0.85 + 0.06 * i;
    for (int j = 0; j < 10; ++j) {
      const double eta = eta_lo + (eta_hi - eta_lo) * j / 9.0;
      const PolarPoint q{eta / std::sin(th), th};
      const double v = richardson(
          {residual_polar(p, q, h), residual_polar(p, q, h / 2), residual_polar(p, q, h / 4)},
          {2.0, 4.0});
      worst = std::max(worst, std::abs(v));
      ++count;
    }
  }
  if (points) *points = count;
  return worst;
}

namespace {

std::string at(double a, double b) {
  return "(" + format_double(a) + ", " + format_double(b) + ")";
}

void exact_studies(const SolverConfig& config, VerifyReport& rep) {
  const WaveParams& wp = config.wave;
  const double eta_mid = -0.5 * (wp.p1 + wp.p4);
  const PolarPoint pq{eta_mid / std::sin(1.1), 1.1};
  const CartPoint cq = to_cart(pq);
  auto& ex = rep.exact;

  const CartField wc = wave_cartesian(wp);
  ex.push_back(halving_study("cartesian", "wave " + at(cq.xi, cq.eta),
                             [&](double h) { return residual_cartesian(wc, cq, h); }, 0.02, 4, 2.0));
  const ManufacturedCart mc = manufactured_cartesian();
  for (const CartPoint c : {CartPoint{0.7, 1.5}, CartPoint{-0.4, 1.3}}) {
    ex.push_back(halving_study(
        "cartesian", "manufactured " + at(c.xi, c.eta),
        [&](double h) { return residual_cartesian(mc.p, c, h) - mc.exact_residual(c); }, 0.04, 4,
        2.0));
  }

  const PolarField pw = wave_polar(wp);
  ex.push_back(halving_study("polar", "wave " + at(pq.r, pq.theta),
                             [&](double h) { return residual_polar(pw, pq, h); }, 0.02, 4, 2.0));
  ex.push_back(halving_study("decomposition_plus", "wave " + at(pq.r, pq.theta),
                             [&](double h) { return decomposition_residuals(pw, pq, h)[0]; }, 0.02,
                             4, 2.0));
  ex.push_back(halving_study("decomposition_minus", "wave " + at(pq.r, pq.theta),
                             [&](double h) { return decomposition_residuals(pw, pq, h)[1]; }, 0.02,
                             4, 2.0));

  const RTPoint mp{1.6, 0.2};
  for (auto& r : rt_identity_study(manufactured_rt(), mp, 0.02, 4, 1.5)) {
    r.location = "manufactured " + at(mp.r, mp.t);
    ex.push_back(std::move(r));
  }
  // V is undefined on the wave (S = 0), so only the commutator identities.
  const RSField wr = wave_rt();
  const RTPoint wq{1.5, 0.2};
  const char* names[3] = {"commutator_ratio", "r_identity", "s_identity"};
  for (int j = 0; j < 3; ++j) {
    ex.push_back(halving_study(names[j], "wave " + at(wq.r, wq.t),
                               [&](double h) { return commutator_residuals(wr, wq, h)[j]; }, 0.02,
                               4, 2.0));
  }
  rep.canaries = mutation_canaries(manufactured_rt(), mp, 0.02, 6, 1.5);
}

void patch_studies(const SolverConfig& config, const std::vector<int>& multipliers,
                   VerifyReport& rep) {
  const double t_probe = 0.5 * config.t0;
  const double delta = 1.5;
  std::vector<std::shared_ptr<const RTField>> fields;
  double a = -std::numeric_limits<double>::infinity();
  double b = std::numeric_limits<double>::infinity();
  for (int k : multipliers) {
    auto f = std::make_shared<RTField>(run_march(config.refined(k)).field);
    // r-range of the deepest level still above the probe
    const RTLevel* lv = &f->top();
    for (const auto& l : f->levels) {
      if (l.t >= t_probe) lv = &l;
    }
    a = std::max(a, f->r_at(lv->lo));
    b = std::min(b, f->r_at(lv->hi));
    fields.push_back(std::move(f));
  }
  constexpr int kPoints = 21;
  std::vector<double> rs;
  for (int i = 0; i < kPoints; ++i) rs.push_back(a + (b - a) * (0.2 + 0.6 * i / (kPoints - 1)));

  const char* names[8] = {"cartesian",        "polar",      "decomposition_plus",
                          "decomposition_minus", "commutator_ratio", "r_identity",
                          "s_identity",       "v_evolution"};
  std::vector<std::vector<double>> sup(8);
  std::vector<double> steps;
  for (std::size_t m = 0; m < fields.size(); ++m) {
    const double k = multipliers[m];
    const double h_rt = config.t0 / 15.0 / k;
    const double h_pol = config.t0 / 75.0 / k;
    steps.push_back(h_pol);
    const PatchField patch(fields[m]);
    const RSField rsf = patch.rs_field();
    const PolarField pf = patch.polar_field();
    const CartField cf = patch.cart_field();
    std::vector<double> s(8, 0.0);
    for (double r : rs) {
      const RTPoint x{r, t_probe};
      const double th = patch.at(x).theta;
      const CartPoint c = to_cart({r, th});
      const auto dec = decomposition_residuals(pf, {r, th}, h_pol);
      const auto com = commutator_residuals(rsf, x, h_rt);
      const double vals[8] = {residual_cartesian(cf, c, h_pol),
                              residual_polar(pf, {r, th}, h_pol),
                              dec[0],
                              dec[1],
                              com[0],
                              com[1],
                              com[2],
                              v_evolution_residual(rsf, x, h_rt, delta)};
      for (int j = 0; j < 8; ++j) s[j] = std::max(s[j], std::abs(vals[j]));
    }
    for (int j = 0; j < 8; ++j) sup[j].push_back(s[j]);
  }
  const std::string loc = "patch sup over r in " + at(rs.front(), rs.back()) +
                          ", t = " + format_double(t_probe);
  for (int j = 0; j < 8; ++j) {
    rep.patch.push_back(order_report(names[j], loc, steps, sup[j], 1.0));
  }
}

}  // namespace

VerifyReport run_verify(const SolverConfig& config, const std::vector<int>& multipliers) {
  VerifyReport rep;
  rep.wave_polar_richardson = wave_polar_richardson(config.wave, 0.02, &rep.wave_points);
  exact_studies(config, rep);
  patch_studies(config, multipliers, rep);
  return rep;
}

}  // namespace sonic

#include "sonic/goursat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sonic/wave.hpp"

namespace sonic {

double CharNode::t() const { return degeneracy_coordinate(r, w.p); }

CartPoint CharNode::cart() const { return to_cart({r, theta}); }

double GammaMinusProfile::S(double theta) const {
  return -s0 * (theta - theta_b) / (theta_c - theta_b);
}

void GammaMinusProfile::validate() const {
  if (!(s0 >= 0.0)) throw DomainError("profile amplitude s0 must be >= 0");
  if (!(theta_c > theta_b)) throw DomainError("profile needs theta_c > theta_B");
}

namespace {

using Vec3 = std::array<double, 3>;  // (r, p, R) along Gamma_-

Vec3 bc_rhs(double theta, const Vec3& y, const GammaMinusProfile& profile) {
  const double r = y[0];
  const double p = y[1];
  const double R = y[2];
  const double S = profile.S(theta);
  if (!(r + p > 0.0)) {
    throw SolverFailure("Gamma_- reached the sonic circle", -1, 0);
  }
  const double li = lambda_inv_polar(r, p);
  const double q = q_polar(r, p);
  return {-li, S, q * (S - R) * R};
}

Vec3 bc_rk4(double theta, const Vec3& y, double h, const GammaMinusProfile& profile) {
  auto axpy = [](const Vec3& a, double s, const Vec3& b) {
    return Vec3{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
  };
  const Vec3 k1 = bc_rhs(theta, y, profile);
  const Vec3 k2 = bc_rhs(theta + 0.5 * h, axpy(y, 0.5 * h, k1), profile);
  const Vec3 k3 = bc_rhs(theta + 0.5 * h, axpy(y, 0.5 * h, k2), profile);
  const Vec3 k4 = bc_rhs(theta + h, axpy(y, h, k3), profile);
  Vec3 out;
  for (int c = 0; c < 3; ++c) {
    out[c] = y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
  }
  return out;
}

bool alive(const CharNode& n, double level2) {
  return n.sonic_gap() >= level2 * (1.0 - 1e-12);
}

}  // namespace

double gamma_minus_end(const StateW& b_state, double theta_b, double r_b,
                       const GammaMinusProfile& profile, double eps) {
  profile.validate();
  Vec3 y{r_b, b_state.p, b_state.R};
  if (!(y[0] + y[1] > eps)) {
    throw SolverFailure("B already lies below the requested level", 0, 0);
  }
  const double h = 1e-4;
  double theta = theta_b;
  for (int n = 0; n < 10000000; ++n) {
    Vec3 next;
    bool below = false;
    try {
      next = bc_rk4(theta, y, h, profile);
      below = next[0] + next[1] <= eps;
    } catch (const SolverFailure&) {
      below = true;
    }
    if (below) {
      double lo = 0.0;
      double hi = h;
      for (int it = 0; it < 100 && hi - lo > 1e-16; ++it) {
        const double mid = 0.5 * (lo + hi);
        bool under = false;
        try {
          const Vec3 trial = bc_rk4(theta, y, mid, profile);
          under = trial[0] + trial[1] <= eps;
        } catch (const SolverFailure&) {
          under = true;
        }
        (under ? hi : lo) = mid;
      }
      return theta + 0.5 * (lo + hi);
    }
    y = next;
    theta += h;
  }
  throw SolverFailure("Gamma_- never reaches the requested level", -1, 0);
}

std::vector<CharNode> gamma_minus_generate(const CharNode& b_node,
                                           const GammaMinusProfile& profile,
                                           double theta_end, int n_steps,
                                           double eps_stop, int substeps,
                                           int extra_steps) {
  profile.validate();
  if (n_steps < 1 || substeps < 1) {
    throw DomainError("gamma_minus_generate needs n_steps >= 1 and substeps >= 1");
  }
  const double theta_b = b_node.theta;
  const double dtheta = (theta_end - theta_b) / n_steps;
  std::vector<CharNode> out;
  out.push_back(b_node);
  out.back().i = 0;
  out.back().j = 0;

  Vec3 y{b_node.r, b_node.w.p, b_node.w.R};
  const double level2 = eps_stop;
  for (int k = 1; k <= n_steps + extra_steps; ++k) {
    if (!alive(out.back(), level2)) break;
    const double theta0 = theta_b + (k - 1) * dtheta;
    const double h = dtheta / substeps;
    for (int s = 0; s < substeps; ++s) {
      try {
        y = bc_rk4(theta0 + s * h, y, h, profile);
      } catch (const DomainError& e) {
        throw SolverFailure(std::string("Gamma_- degenerated: ") + e.what(), k, 0);
      }
    }
    CharNode node;
    node.theta = theta_b + k * dtheta;
    node.r = y[0];
    node.w = {y[1], y[2], profile.S(node.theta)};
    node.i = k;
    node.j = 0;
    node.minus_parent_i = k - 1;
    node.minus_parent_j = 0;
    out.push_back(node);
  }
  return out;
}

CharNode interior_node(const CharNode& a, const CharNode& b, const NodeSolverOptions& opts) {
  CharNode out;
  out.i = b.i;
  out.j = a.j;
  out.minus_parent_i = a.i;
  out.minus_parent_j = a.j;
  out.plus_parent_i = b.i;
  out.plus_parent_j = b.j;

  if (a.theta == b.theta && a.r == b.r) {
    out.theta = a.theta;
    out.r = a.r;
    out.w = {a.w.p, a.w.R, b.w.S};
    return out;
  }

  double la = 0.0;
  double lb = 0.0;
  double qa = 0.0;
  double qb = 0.0;
  try {
    la = lambda_inv_polar(a.r, a.w.p);
    lb = lambda_inv_polar(b.r, b.w.p);
    qa = q_polar(a.r, a.w.p);
    qb = q_polar(b.r, b.w.p);
  } catch (const std::exception& e) {
    throw SolverFailure(std::string("parent is not strictly supersonic: ") + e.what(),
                        out.i, out.j);
  }
  const double Fa = qa * (a.w.S - a.w.R) * a.w.R;  // d-R at a
  const double Gb = qb * (b.w.R - b.w.S) * b.w.S;  // d+S at b

  // Unknowns (theta, r, p, R, S).
  std::array<double, 5> x{};
  auto intersect = [&](double lam_minus, double lam_plus, double& theta, double& r) {
    // r = r_a - lam_minus (theta - theta_a) = r_b + lam_plus (theta - theta_b)
    const double den = lam_minus + lam_plus;
    if (!(den > 0.0)) {
      throw SolverFailure("characteristics do not intersect (sonic)", out.i, out.j);
    }
    theta = (a.r - b.r + lam_minus * a.theta + lam_plus * b.theta) / den;
    r = a.r - lam_minus * (theta - a.theta);
  };

  intersect(la, lb, x[0], x[1]);
  x[3] = a.w.R + Fa * (x[0] - a.theta);
  x[4] = b.w.S + Gb * (x[0] - b.theta);
  x[2] = 0.5 * (a.w.p + a.w.S * (x[0] - a.theta) + b.w.p + b.w.R * (x[0] - b.theta));

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    const double r = x[1];
    const double p = x[2];
    const double R = x[3];
    const double S = x[4];
    double l = 0.0;
    double q = 0.0;
    try {
      l = lambda_inv_polar(r, p);
      q = q_polar(r, p);
    } catch (const std::exception& e) {
      throw SolverFailure(std::string("corrector left the hyperbolic region: ") + e.what(),
                          out.i, out.j);
    }
    std::array<double, 5> y{};
    intersect(0.5 * (la + l), 0.5 * (lb + l), y[0], y[1]);
    y[3] = a.w.R + 0.5 * (Fa + q * (S - R) * R) * (y[0] - a.theta);
    y[4] = b.w.S + 0.5 * (Gb + q * (R - S) * S) * (y[0] - b.theta);
    y[2] = 0.5 * (a.w.p + 0.5 * (a.w.S + S) * (y[0] - a.theta) + b.w.p +
                  0.5 * (b.w.R + R) * (y[0] - b.theta));
    double upd = 0.0;
    for (int c = 0; c < 5; ++c) {
      const double d = opts.relaxation * (y[c] - x[c]);
      x[c] += d;
      upd = std::max(upd, std::abs(d));
    }
    if (!std::isfinite(upd)) {
      throw SolverFailure("corrector produced non-finite values", out.i, out.j);
    }
    if (upd < opts.tol) break;
  }
  if (it == opts.max_iter) {
    throw SolverFailure("corrector did not converge", out.i, out.j);
  }

  out.theta = x[0];
  out.r = x[1];
  out.w = {x[2], x[3], x[4]};
  const double slack = 1e-14 * std::max(1.0, std::abs(out.theta));
  if (out.theta < a.theta - slack || out.theta < b.theta - slack) {
    throw SolverFailure("mesh fold-over: node precedes a parent in theta", out.i, out.j);
  }
  if (!(out.sonic_gap() > 0.0)) {
    throw SolverFailure("node is not supersonic", out.i, out.j);
  }
  return out;
}

bool CharacteristicMesh::has(int i, int j) const {
  if (i < 0 || j < 0 || i >= ni_ || j >= nj_) return false;
  return nodes_[std::size_t(i) * nj_ + j].has_value();
}

const CharNode& CharacteristicMesh::at(int i, int j) const {
  if (!has(i, j)) {
    throw std::out_of_range("no mesh node at (" + std::to_string(i) + ", " +
                            std::to_string(j) + ")");
  }
  return *nodes_[std::size_t(i) * nj_ + j];
}

void CharacteristicMesh::set(const CharNode& node) {
  if (node.i < 0 || node.j < 0 || node.i >= ni_ || node.j >= nj_) {
    throw std::out_of_range("mesh node index out of range");
  }
  nodes_[std::size_t(node.i) * nj_ + node.j] = node;
}

std::size_t CharacteristicMesh::size() const {
  return std::size_t(std::count_if(nodes_.begin(), nodes_.end(),
                                   [](const auto& n) { return n.has_value(); }));
}

std::vector<CharNode> CharacteristicMesh::nodes() const {
  std::vector<CharNode> out;
  for (const auto& n : nodes_) {
    if (n) out.push_back(*n);
  }
  return out;
}

double cell_signed_area(const CharacteristicMesh& mesh, int i, int j) {
  const std::array<CartPoint, 4> v{mesh.at(i - 1, j - 1).cart(), mesh.at(i - 1, j).cart(),
                                   mesh.at(i, j).cart(), mesh.at(i, j - 1).cart()};
  double twice = 0.0;
  for (int k = 0; k < 4; ++k) {
    const CartPoint& p = v[k];
    const CartPoint& q = v[(k + 1) % 4];
    twice += p.xi * q.eta - q.xi * p.eta;
  }
  return 0.5 * twice;
}

CharacteristicMesh solve(const SolverConfig& config) {
  config.validate();
  const WaveParams& wp = config.wave;
  const double tb = theta_b(wp);
  const double level2 = config.t0 * config.t0;

  // AB: r + p = -p1 s (1 - s) with s = sin(theta); the handoff level is hit at
  // the root nearer to A.
  const double disc = 1.0 - 4.0 * level2 / (-wp.p1);
  if (!(disc > 0.0)) {
    throw SolverFailure("handoff level t0 lies above AB", 0, 0);
  }
  const double s_end = 0.5 * (1.0 + std::sqrt(disc));
  if (s_end <= std::sin(tb)) {
    throw SolverFailure("handoff level t0 lies above B", 0, 0);
  }
  const double theta_ab_end = std::asin(s_end);
  const double dtheta_ab = (theta_ab_end - tb) / config.n_plus;
  if (theta_ab_end + dtheta_ab > std::numbers::pi / 2.0) {
    throw SolverFailure("AB resolution too coarse to step past the handoff level", 0,
                        config.n_plus + 1);
  }

  std::vector<CharNode> ab;
  for (int j = 0; j <= config.n_plus + 1; ++j) {
    CharNode n;
    n.theta = j == config.n_plus ? theta_ab_end : tb + j * dtheta_ab;
    n.r = -wp.p1 * std::sin(n.theta);
    n.w = wave_RS(n.theta, wp);
    n.i = 0;
    n.j = j;
    if (j > 0) {
      n.plus_parent_i = 0;
      n.plus_parent_j = j - 1;
    }
    ab.push_back(n);
    if (!alive(n, level2)) break;
  }

  GammaMinusProfile profile{config.s0, tb, config.theta_c};
  const CharNode& b_node = ab.front();
  const double theta_bc_end = gamma_minus_end(b_node.w, tb, b_node.r, profile, level2);
  const std::vector<CharNode> bc = gamma_minus_generate(
      b_node, profile, theta_bc_end, config.n_minus, level2, config.bc_substeps, 1);

  CharacteristicMesh mesh(int(bc.size()), int(ab.size()));
  mesh.set_handoff_level(config.t0);
  for (const CharNode& n : ab) mesh.set(n);
  for (const CharNode& n : bc) mesh.set(n);

  const NodeSolverOptions opts{config.relaxation, config.node_tol, config.node_max_iter};
  double area_sign = 0.0;
  for (int level = 2; level <= mesh.ni() + mesh.nj(); ++level) {
    for (int i = std::max(1, level - mesh.nj() + 1); i <= std::min(level - 1, mesh.ni() - 1);
         ++i) {
      const int j = level - i;
      if (!mesh.has(i - 1, j) || !mesh.has(i, j - 1)) continue;
      const CharNode& a = mesh.at(i - 1, j);
      const CharNode& b = mesh.at(i, j - 1);
      if (!alive(a, level2) && !alive(b, level2)) continue;
      CharNode n = interior_node(a, b, opts);
      n.i = i;
      n.j = j;
      mesh.set(n);
      const double area = cell_signed_area(mesh, i, j);
      if (area_sign == 0.0) area_sign = area > 0.0 ? 1.0 : -1.0;
      if (!(area * area_sign > 0.0)) {
        throw SolverFailure("mesh fold-over: cell orientation flipped", i, j);
      }
    }
  }
  if (area_sign < 0.0) {
    throw SolverFailure("mesh orientation is reversed", 1, 1);
  }
  return mesh;
}

std::vector<LevelCrossing> plus_strand_crossings(const CharacteristicMesh& mesh,
                                                 double level) {
  const double level2 = level * level;
  std::vector<LevelCrossing> out;
  for (int i = 0; i < mesh.ni(); ++i) {
    if (!mesh.has(i, 0)) continue;
    int n = 0;
    while (n < mesh.nj() && mesh.has(i, n)) ++n;
    for (int j = 1; j < n; ++j) {
      if (!(mesh.at(i, j).sonic_gap() < level2)) continue;
      if (!(mesh.at(i, j - 1).sonic_gap() >= level2)) break;
      // Cubic in the gap variable through four nodes around the crossing;
      // linear weights leave an error that jitters from strand to strand.
      if (n >= 4) {
        const int j0 = std::clamp(j - 2, 0, n - 4);
        double g[4];
        const CharNode* nd[4];
        for (int q = 0; q < 4; ++q) {
          nd[q] = &mesh.at(i, j0 + q);
          g[q] = nd[q]->sonic_gap();
        }
        bool monotone = true;
        for (int q = 0; q < 3; ++q) monotone = monotone && g[q + 1] < g[q];
        if (monotone) {
          double w[4];
          for (int a = 0; a < 4; ++a) {
            w[a] = 1.0;
            for (int b = 0; b < 4; ++b) {
              if (b != a) w[a] *= (level2 - g[b]) / (g[a] - g[b]);
            }
          }
          LevelCrossing c{0.0, 0.0, 0.0, 0.0, i};
          for (int a = 0; a < 4; ++a) {
            c.r += w[a] * nd[a]->r;
            c.theta += w[a] * nd[a]->theta;
            c.R += w[a] * nd[a]->w.R;
            c.S += w[a] * nd[a]->w.S;
          }
          out.push_back(c);
          break;
        }
      }
      const CharNode& prev = mesh.at(i, j - 1);
      const CharNode& cur = mesh.at(i, j);
      const double fa = prev.sonic_gap() - level2;
      const double fb = cur.sonic_gap() - level2;
      const double w = fa / (fa - fb);
      out.push_back({prev.r + w * (cur.r - prev.r), prev.theta + w * (cur.theta - prev.theta),
                     prev.w.R + w * (cur.w.R - prev.w.R), prev.w.S + w * (cur.w.S - prev.w.S),
                     i});
      break;
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LevelCrossing& x, const LevelCrossing& y) { return x.r < y.r; });
  return out;
}

}  // namespace sonic

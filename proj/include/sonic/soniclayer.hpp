#pragma once

// Continuation below the handoff level r + p = t0^2 in the (r, t) plane, and
// the regularity diagnostics measured on the result.

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sonic/config.hpp"
#include "sonic/core.hpp"
#include "sonic/goursat.hpp"

namespace sonic {

/// One t-level of the near-sonic field on the uniform r-grid
/// r_k = r0 + k dr, k in [lo, hi]. p = t^2 - r is implied.
struct RTLevel {
  double t = 0.0;
  int lo = 0;
  int hi = 0;
  std::vector<double> R, S, theta;  // indexed by k - lo

  int count() const { return hi - lo + 1; }
};

struct RTField {
  double r0 = 0.0;
  double dr = 0.0;
  int nr = 0;
  std::vector<RTLevel> levels;  // ordered by decreasing t; levels[0] is t0

  double r_at(int k) const { return r0 + k * dr; }
  const RTLevel& top() const { return levels.front(); }
  const RTLevel& bottom() const { return levels.back(); }
};

/// R_r, S_r by centered differences inside a level, one-sided at its ends.
struct LevelDerivatives {
  std::vector<double> Rr, Sr;
};
LevelDerivatives r_derivatives(const RTField& field, const RTLevel& level);

class HandoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MarchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DiagnosticsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Monotone cubic Hermite interpolant through strictly increasing x: C2
/// spline slopes, clipped by the Hyman filter where monotonicity needs it.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double lo() const { return x_.front(); }
  double hi() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

/// Field at t = t0 from the crossings of the + strands with r + p = t0^2,
/// on nr uniform points over the covered r-range with a fraction `trim`
/// removed at each end.
RTField handoff(const CharacteristicMesh& mesh, double t0, int nr, double trim);

/// Same, from explicit crossings (sorted by r).
RTField handoff(const std::vector<LevelCrossing>& crossings, double t0, int nr,
                double trim);

struct MarchOptions {
  double t_min = 3e-4;
  double ratio = 0.9;      // geometric schedule t_{n+1} = ratio t_n
  // Step cap dt max|Lambda| <= courant dr. Midpoint RK2 with the three-point
  // upwind stencil is stable only up to 0.5; values above 0.9 are rejected.
  double courant = 0.45;
  bool adapt = true;       // cut the step to satisfy the cap instead of failing
};

struct MarchStats {
  std::size_t steps = 0;
  int max_removed_per_step = 0;   // cells dropped at either end in one step
  int max_allowed_per_step = 0;   // ceil(max|Lambda| dt / dr) at that step
  bool cone_consistent = true;    // removed <= allowed on every step
};

/// Midpoint (RK2) march of R, S and theta downward in t from the top level of
/// `field` to t_min. Every level is kept. The r-window shrinks at each end by
/// the accumulated characteristic drift.
RTField rt_march(RTField field, const MarchOptions& opts, MarchStats* stats = nullptr);

// -- sonic curve -------------------------------------------------------------

struct SonicSample {
  double r = 0.0;
  double eps = 0.0;
  double theta_eps = 0.0;
  double dtheta_eps = 0.0;     // -(1 + p_r) / p_theta
  double dtheta_eps_fd = 0.0;  // finite difference of theta_eps in r
};

/// Slope of the level curve r + p = t^2 through a point with data (R, S).
double level_curve_slope(double r, double t, double R, double S);

/// Level-curve samples for every eps in the schedule, on the r-grid of the
/// field. eps must satisfy t_min^2 <= eps <= t0^2; levels between stored
/// t-levels are reached by cubic interpolation in t.
std::vector<SonicSample> sonic_trace(const RTField& field,
                                     const std::vector<double>& eps_schedule);

/// eps_k = t0^2 / ratio^k down to eps_min_factor t_min^2.
std::vector<double> eps_schedule(double t0, double t_min, double ratio,
                                 double eps_min_factor);

/// Sup over r of |theta'_{eps_{k+1}} - theta'_{eps_k}| for consecutive
/// entries of the schedule, on the r-range common to both.
std::vector<double> slope_cauchy_gaps(const std::vector<SonicSample>& samples);

// -- extrapolation to t = 0 ------------------------------------------------

/// Values of R, S (and theta) at t interpolated from the stored levels by
/// cubic Lagrange interpolation in t; column k of the grid.
struct ColumnValue {
  double R = 0.0, S = 0.0, theta = 0.0;
};
ColumnValue column_at(const RTField& field, int k, double t);

/// Richardson extrapolation to t = 0 from samples at t_top, t_top/q,
/// t_top/q^2, removing the O(t) and O(t^2) terms.
struct SonicValues {
  std::vector<double> r;
  std::vector<double> R, S, theta;
};
SonicValues extrapolate_to_sonic(const RTField& field, double t_top, double q);

// -- diagnostics -------------------------------------------------------------

struct RateFit {
  double exponent = 0.0;
  double constant = 0.0;    // |R - S| ~ constant t^exponent
  double residual = 0.0;    // rms of log residuals
  std::size_t samples = 0;
  bool degenerate = false;  // |R - S| vanished somewhere in the window
  double column_exponent_min = 0.0;
  double column_exponent_max = 0.0;
};

/// Least-squares fit of log sup_r |R - S| against log t over [t_lo, t_hi].
RateFit fit_rate(const RTField& field, double t_lo, double t_hi);

struct LevelMonitor {
  double t = 0.0;
  double v_over_t = 0.0;                 // max |V| / t
  double sup_diff = 0.0;                 // max |R - S|
  std::vector<double> td_Rr, td_Sr;      // max t^delta |R_r|, per delta
};

struct DeltaBounds {
  double delta = 0.0;
  double td_Rr = 0.0;
  double td_Sr = 0.0;
  MonitorConstants constants;
  bool k3_dominates = false;  // K3 > 2 K2 e^(2 K1 t0) / delta
  bool k1_below_k2 = false;
};

struct Diagnostics {
  std::vector<LevelMonitor> levels;
  std::vector<DeltaBounds> bounds;  // one per delta
  double v_over_t = 0.0;
  RateFit rate;
  std::vector<double> w_samples;    // 2 L t + max |R - S|, per level
  double L = 0.0;                   // max of |d-R|, |d+S|
};

Diagnostics diagnostics(const RTField& field, const std::vector<double>& deltas);

}  // namespace sonic

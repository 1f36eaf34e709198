#pragma once

// Finite-difference certification of the identities satisfied by solutions:
// the second-order equation in Cartesian and polar form, its characteristic
// decomposition, the commutator ratio, the second-derivative identities for
// R and S, and the evolution equation of V. Directional derivatives follow
// characteristics re-traced locally with RK4, never grid lines.

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sonic/core.hpp"
#include "sonic/soniclayer.hpp"
#include "sonic/wave.hpp"

namespace sonic {

using CartField = std::function<double(CartPoint)>;
using PolarField = std::function<double(PolarPoint)>;

/// (R, S) as functions of (r, t). `defect`, when set, returns
/// (R_t + Lambda_- R_r - F, S_t + Lambda_+ S_r - G): the amount by which the
/// field fails the transport system. Exact and computed solutions leave it
/// empty.
struct RSField {
  std::function<std::array<double, 2>(RTPoint)> rs;
  std::function<std::array<double, 2>(RTPoint)> defect;
};

/// Deliberate 1% perturbation (or sign flip) of one closed-form coefficient,
/// used to show that the checks can fail.
enum class Mutation { none, h, f1, f2, f3, g1, g2, g3, l1, l2, f2_sign };

std::string to_string(Mutation m);

// -- single-step residuals ------------------------------------------------------

/// Left side of the Cartesian second-order equation by central differences.
double residual_cartesian(const CartField& p, CartPoint x, double h);

/// Left side of its polar form by central differences.
double residual_polar(const PolarField& p, PolarPoint q, double h);

/// d+ d- p - Q (d+ p - d- p) d- p and d- d+ p - Q (d- p - d+ p) d+ p.
/// Refuses points with t = sqrt(r + p) below 1e-4 sqrt(r).
std::array<double, 2> decomposition_residuals(const PolarField& p, PolarPoint q, double h);

/// Ratio identity, the R identity and the S identity, in that order.
std::array<double, 3> commutator_residuals(const RSField& f, RTPoint x, double h,
                                           Mutation m = Mutation::none);

/// V_t - l1 V / t - l2 t^(2 - delta).
double v_evolution_residual(const RSField& f, RTPoint x, double h, double delta,
                            Mutation m = Mutation::none);

// -- step-halving studies ---------------------------------------------------------

struct ResidualReport {
  std::string identity;
  std::string location;
  std::vector<double> steps;      // h (or mesh multiplier inverse) per level
  std::vector<double> residuals;  // |residual| per level
  std::vector<double> orders;     // observed orders; empty with fewer than 3 levels,
                                  // stops at the first level at roundoff
  double nominal_order = 2.0;
  double residual = 0.0;          // finest level
  double min_order = 0.0;
  // Every level at roundoff: the identity holds exactly on this field (for
  // example S = 0 on the wave) and no order is measurable.
  bool exact = false;

  /// Every observed order is at least `fraction` of the nominal one.
  bool converges(double fraction = 0.9) const;
};

/// Report from residuals already evaluated at the given steps (each half the
/// previous one).
ResidualReport order_report(const std::string& identity, const std::string& location,
                            std::vector<double> steps, std::vector<double> residuals,
                            double nominal_order);

/// Evaluates `residual_at(h)` for h = h0, h0/2, ... (n levels).
ResidualReport halving_study(const std::string& identity, const std::string& location,
                             const std::function<double(double)>& residual_at, double h0,
                             int n, double nominal_order);

/// Richardson extrapolation of values at h, h/2, h/4, ... whose error expands
/// in h^p1, h^p2, ... (orders[k] for the k-th elimination).
double richardson(const std::vector<double>& values, const std::vector<double>& orders);

/// Mutation canary: residuals of a mutated check stay above 10 times the
/// finest unmutated residual and stop decreasing.
struct CanaryResult {
  Mutation mutation = Mutation::none;
  std::string identity;
  double clean = 0.0;
  double mutated = 0.0;
  double plateau_ratio = 0.0;  // mutated(h_finest) / mutated(h_previous)
  bool plateaus = false;
};

/// Every mutation against the check that contains the mutated coefficient,
/// halving h from h0 over n levels at point x.
std::vector<CanaryResult> mutation_canaries(const RSField& f, RTPoint x, double h0, int n,
                                            double delta);

/// Halving studies of the three commutator identities and the V equation.
std::vector<ResidualReport> rt_identity_study(const RSField& f, RTPoint x, double h0, int n,
                                              double delta);

// -- reference fields -------------------------------------------------------------

CartField wave_cartesian(const WaveParams& params);
PolarField wave_polar(const WaveParams& params);
RSField wave_rt();

/// Smooth p(xi, eta) near the wave with the exact value of the Cartesian left
/// side, so residual - exact converges at the FD order.
struct ManufacturedCart {
  CartField p;
  CartField exact_residual;
};
ManufacturedCart manufactured_cartesian();

/// Polynomial (R, S) in (r, t) with R != S, and its analytic defect.
RSField manufactured_rt();

// -- computed solution ------------------------------------------------------------

/// Smooth interpolant of a marched field: tensor cubic Lagrange in (r, t).
/// Evaluation outside the covered window throws DomainError.
class PatchField {
 public:
  explicit PatchField(std::shared_ptr<const RTField> field);

  struct Values {
    double R = 0.0, S = 0.0, theta = 0.0;
  };
  Values at(RTPoint x) const;

  RSField rs_field() const;
  /// p(r, theta) = t^2 - r where theta(r, t) equals the requested angle.
  PolarField polar_field() const;
  CartField cart_field() const;

  double t_of(double r, double theta) const;
  const RTField& field() const { return *field_; }

 private:
  std::shared_ptr<const RTField> field_;
};

}  // namespace sonic

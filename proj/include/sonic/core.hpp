#pragma once

// Domain types and closed-form coefficient functions for the self-similar
// nonlinear wave system of Chaplygin gas.
//
// Two coordinate systems are used throughout:
//   polar  (r, theta)  with p = p(r, theta)
//   (r, t) with t = sqrt(r + p), which maps the sonic curve r + p = 0 to t = 0.
// Near t = 0 only the (r, t) forms are regular; the polar forms must not be
// evaluated there.

#include <stdexcept>
#include <string>

namespace sonic {

struct CartPoint {
  double xi = 0.0;
  double eta = 0.0;
};

struct PolarPoint {
  double r = 0.0;
  double theta = 0.0;
};

struct RTPoint {
  double r = 0.0;
  double t = 0.0;
};

/// Unknowns of the characteristic system: p and its two characteristic
/// derivatives R = d+ p, S = d- p.
struct StateW {
  double p = 0.0;
  double R = 0.0;
  double S = 0.0;
};

struct DerivedQuantities {
  double U = 0.0;  // 1/R + 1/S
  double V = 0.0;  // 1/S - 1/R
  double G = 0.0;  // d+R - d-R
  double H = 0.0;  // d+S - d-S
};

/// Sup/inf norms of the coefficient functions over a sampled subdomain, plus
/// the a-posteriori bounds built from them.
struct MonitorConstants {
  double K1 = 0.0;  // max |h|, |f3|, |g3|
  double K2 = 0.0;  // max |f1|, |f2|, |g1|, |g2|
  double K3 = 0.0;  // min |E|
  double K4 = 0.0;  // max |(l1 - 1) / t|
  double K5 = 0.0;  // max |l2|
  double M0 = 0.0;
  double Mhat = 0.0;
  double delta = 1.5;
};

/// Point outside the region where a formula is defined (e.g. elliptic).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A formula hit a vanishing denominator. `denominator()` names it.
class SingularityError : public std::runtime_error {
 public:
  SingularityError(std::string denominator, const std::string& what)
      : std::runtime_error(what), denominator_(std::move(denominator)) {}
  const std::string& denominator() const noexcept { return denominator_; }

 private:
  std::string denominator_;
};

PolarPoint to_polar(CartPoint c);
CartPoint to_cart(PolarPoint q);

/// t = sqrt(r + p); throws DomainError when r + p < 0.
double degeneracy_coordinate(double r, double p);

DerivedQuantities derived_uv(double R, double S);

// -- characteristic speed dr/dtheta ----------------------------------------

/// (r/|p|) sqrt(r^2 - p^2). Zero on the sonic circle r = |p|.
double lambda_inv_polar(double r, double p);

/// r t sqrt(2r - t^2) / (r - t^2). Requires 0 <= t^2 < r.
double lambda_inv_rt(double r, double t);

/// lambda_inv_rt / t, regular at t = 0 where it equals sqrt(2r).
double lambda_inv_over_t(double r, double t);

// -- Q and its regularised form -------------------------------------------

/// r^2 / (2 p (r^2 - p^2)). Singular on the sonic circle.
double q_polar(double r, double p);

/// -r^2 / (2 t^2 (r - t^2)(2r - t^2)). Singular at t = 0.
double q_rt(double r, double t);

/// t^2 Q, regular at t = 0 where it equals -1/4.
double t2q(double r, double t);

// -- (r, t) system coefficients -------------------------------------------

struct CharSpeeds {
  double plus = 0.0;   // Lambda_+ = 2 t l / (R + l)
  double minus = 0.0;  // Lambda_- = -2 t l / (S - l)
};

/// Denominator guard shared by every formula with R + l or S - l below.
/// Throws SingularityError when |den| < 1e-10 max(1, |R|, |S|).
void guard_denominators(double lam_inv, double R, double S);

CharSpeeds lambda_pm(double r, double t, double R, double S);

/// Right-hand sides of the (r, t) transport system along each family:
///   R_t + Lambda_- R_r = minus_source,  S_t + Lambda_+ S_r = plus_source.
struct TransportSources {
  double minus_source = 0.0;
  double plus_source = 0.0;
};
TransportSources rt_sources(double r, double t, double R, double S);

struct Coefficients {
  double E = 0.0;
  double h = 0.0;
  double f1 = 0.0, f2 = 0.0, f3 = 0.0;
  double g1 = 0.0, g2 = 0.0, g3 = 0.0;
};

/// Closed forms of E, h and the f_i, g_i entering the second-derivative
/// identities of the (r, t) system.
Coefficients coeff_E_h_f_g(double r, double t, double R, double S);

struct VCoefficients {
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Coefficients of V_t = l1 V / t + l2 t^(2 - delta). Rr, Sr are the
/// r-derivatives of R, S; delta must lie in (1, 2).
VCoefficients coeff_l1_l2(double r, double t, double R, double S, double Rr,
                          double Sr, double delta);

/// (l1 - 1) / t in the expanded form that stays finite as t -> 0.
double l1_minus_one_over_t(double r, double t, double R, double S);

}  // namespace sonic

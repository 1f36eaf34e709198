#pragma once

// Goursat problem for (R, S, p) on the curvilinear triangle ABC, solved on a
// characteristic mesh by a predictor-corrector (Massau) scheme.
//
// Mesh indexing: node (i, j) is the intersection of the + characteristic
// issuing from the i-th node of Gamma_- = BC and the - characteristic issuing
// from the j-th node of Gamma_+ = AB. Node (i-1, j) is its - parent and
// (i, j-1) its + parent; (0, 0) is B.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sonic/config.hpp"
#include "sonic/core.hpp"

namespace sonic {

struct CharNode {
  double theta = 0.0;
  double r = 0.0;
  StateW w;
  int i = 0;
  int j = 0;
  // Index pairs of the parents, or -1 on boundary nodes.
  int minus_parent_i = -1, minus_parent_j = -1;
  int plus_parent_i = -1, plus_parent_j = -1;

  double sonic_gap() const { return r + w.p; }  // r + p = t^2
  double t() const;
  CartPoint cart() const;
};

struct GammaMinusProfile {
  double s0 = 1.0;
  double theta_b = 0.0;
  double theta_c = 1.15;

  /// Prescribed S on BC; vanishes at B and is negative beyond it.
  double S(double theta) const;
  void validate() const;
};

struct NodeSolverOptions {
  double relaxation = 0.5;
  double tol = 1e-12;
  int max_iter = 100;
};

/// Failure of the mesh construction. Carries mesh coordinates when known.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int i = -1, int j = -1)
      : std::runtime_error(what), i_(i), j_(j) {}
  int i() const noexcept { return i_; }
  int j() const noexcept { return j_; }

 private:
  int i_;
  int j_;
};

/// Angle on Gamma_- where r + p first reaches eps (fine RK4 + bisection).
double gamma_minus_end(const StateW& b_state, double theta_b, double r_b,
                       const GammaMinusProfile& profile, double eps);

/// Integrates dr/dtheta = -lambda_inv, dp/dtheta = S(theta),
/// dR/dtheta = Q (S - R) R from B over uniform intervals of width
/// (theta_end - theta_b) / n_steps. Stops after the first node with
/// r + p < eps_stop, or after n_steps + extra_steps intervals.
std::vector<CharNode> gamma_minus_generate(const CharNode& b_node,
                                           const GammaMinusProfile& profile,
                                           double theta_end, int n_steps,
                                           double eps_stop, int substeps = 8,
                                           int extra_steps = 1);

/// New node from its - parent `a` and + parent `b`.
CharNode interior_node(const CharNode& a, const CharNode& b,
                       const NodeSolverOptions& opts = {});

class CharacteristicMesh {
 public:
  CharacteristicMesh(int ni, int nj) : ni_(ni), nj_(nj), nodes_(std::size_t(ni) * nj) {}

  int ni() const { return ni_; }
  int nj() const { return nj_; }
  bool has(int i, int j) const;
  const CharNode& at(int i, int j) const;
  void set(const CharNode& node);
  std::size_t size() const;

  /// All present nodes in (i, j) lexicographic order.
  std::vector<CharNode> nodes() const;

  double handoff_level() const { return handoff_level_; }
  void set_handoff_level(double t0) { handoff_level_ = t0; }

 private:
  int ni_;
  int nj_;
  std::vector<std::optional<CharNode>> nodes_;
  double handoff_level_ = 0.0;
};

/// Fills the patch level by level; each strand ends at its first node with
/// r + p < t0^2.
CharacteristicMesh solve(const SolverConfig& config);

/// Crossing of a strand with the level r + p = level^2: cubic interpolation
/// in r + p over the last four nodes of the strand (linear on short strands).
struct LevelCrossing {
  double r = 0.0;
  double theta = 0.0;
  double R = 0.0;
  double S = 0.0;
  int strand = 0;
};

/// Crossings of every + strand (fixed i) with r + p = level^2, sorted by r.
std::vector<LevelCrossing> plus_strand_crossings(const CharacteristicMesh& mesh,
                                                 double level);

/// Signed area of the quadrilateral (i-1,j-1), (i,j-1), (i,j), (i-1,j) in the
/// (xi, eta) plane.
double cell_signed_area(const CharacteristicMesh& mesh, int i, int j);

}  // namespace sonic

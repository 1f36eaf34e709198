#pragma once

// Run configuration and its key = value text format.
//
//   # comment
//   p1 = -2
//   deltas = 1.1, 1.5, 1.9
//
// Unknown keys, malformed numbers and duplicate keys are rejected with the
// offending line number.

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "sonic/wave.hpp"

namespace sonic {

struct SolverConfig {
  WaveParams wave{};

  // Gamma_- profile S(theta) = -s0 (theta - theta_B) / (theta_c - theta_B).
  double s0 = 1.0;
  double theta_c = 1.15;

  // Characteristic mesh: intervals along AB (n_plus) and BC (n_minus) between
  // B and the handoff level.
  int n_plus = 32;
  int n_minus = 32;
  int bc_substeps = 8;

  // Massau corrector.
  double relaxation = 0.5;
  double node_tol = 1e-12;
  int node_max_iter = 100;

  // Near-sonic layer.
  double t0 = 0.3;
  double t_min_factor = 1e-3;
  int nr = 161;
  double r_trim = 0.15;
  double dt_ratio = 0.9;
  double courant = 0.45;

  std::vector<double> deltas{1.1, 1.5, 1.9};
  double eps_ratio = 2.0;
  double eps_min_factor = 16.0;  // smallest eps = factor * t_min^2

  std::string output_dir = "out";

  double t_min() const { return t_min_factor * t0; }

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;

  /// Global refinement for convergence studies: mesh intervals and r-grid
  /// cells scale by k, the t-step ratio by its k-th root.
  SolverConfig refined(int k) const;

  /// Canonical text form (sorted keys, round-trip numbers); the config hash
  /// is computed from this.
  std::string canonical() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SolverConfig parse_config(const std::string& text);
SolverConfig load_config(const std::string& path);

/// Reference configuration: p1 = -2, p4 = -1 with the defaults above.
SolverConfig reference_config();

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace sonic

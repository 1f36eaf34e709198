#pragma once

// Stage runners shared by the command-line tool and the acceptance suite:
// trace -> solve -> march -> diagnose -> verify.

#include <string>
#include <vector>

#include "sonic/config.hpp"
#include "sonic/goursat.hpp"
#include "sonic/soniclayer.hpp"
#include "sonic/verify.hpp"
#include "sonic/wave.hpp"

namespace sonic {

struct TraceReport {
  TraceResult ab;
  double endpoint_error = 0.0;     // distance of the last point from B
  double circle_deviation = 0.0;   // max | |c - center| - radius | along the trace
};
TraceReport run_trace(const SolverConfig& config);

struct MarchRun {
  CharacteristicMesh mesh{0, 0};
  RTField field;
  MarchStats stats;
};
MarchRun run_march(const SolverConfig& config);

/// R <= 0, S <= 0 and max(|R|, |S|) against the boundary supremum.
struct SignReport {
  double max_R = 0.0;            // largest R seen (mesh and field)
  double max_S = 0.0;
  double sup_abs = 0.0;          // max |R|, |S| over every node
  double boundary_sup = 0.0;     // over mesh boundary nodes
  bool nonpositive = false;
  bool bounded = false;
};
SignReport sign_report(const MarchRun& run);

struct SonicReport {
  std::vector<double> eps;
  std::vector<SonicSample> samples;
  std::vector<double> gaps;         // Cauchy gaps of theta' between eps halvings
  double sup_slope = 0.0;           // sup |theta'_eps| over every eps
  double max_slope_fd_gap = 0.0;    // max |formula - finite difference|
  SonicValues route_a, route_b;     // extrapolation ratios 2 and 3
  double route_gap = 0.0;           // max |A - B| over R and S
  double matching = 0.0;            // max |R - S| at t = 0 over both routes
};
SonicReport sonic_report(const SolverConfig& config, const RTField& field);

struct DiagnoseReport {
  Diagnostics diag;
  SonicReport sonic;
  SignReport sign;
};
DiagnoseReport run_diagnose(const SolverConfig& config, const MarchRun& run);

/// Threshold checks applied by `diagnose --strict`, plus the closeness
/// hypothesis on p4; empty when all hold.
std::vector<std::string> strict_violations(const SolverConfig& config,
                                           const DiagnoseReport& report);

struct VerifyReport {
  std::vector<ResidualReport> exact;     // FD halving on closed-form fields
  std::vector<ResidualReport> patch;     // joint mesh/FD refinement, sup over points
  std::vector<CanaryResult> canaries;
  double wave_polar_richardson = 0.0;    // max over the sampled points
  int wave_points = 0;

  bool passed() const;
};

/// `multipliers` refine the given config jointly with the FD step for the
/// computed-patch studies.
VerifyReport run_verify(const SolverConfig& config,
                        const std::vector<int>& multipliers = {1, 2, 4, 8});

/// Polar residual of the planar wave after three-level Richardson
/// extrapolation (h, h/2, h/4), max over a 10 x 10 sample of the strip.
double wave_polar_richardson(const WaveParams& params, double h, int* points = nullptr);

}  // namespace sonic

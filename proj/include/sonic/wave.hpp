#pragma once

// The planar rarefaction wave p = -eta joining the constant states p1 and p4,
// the corner points A and B of the patch, and tracing of characteristics of
// the self-similar equation through a given pressure field.

#include <functional>
#include <limits>
#include <vector>

#include "sonic/core.hpp"

namespace sonic {

struct WaveParams {
  double p1 = -2.0;
  double p4 = -1.0;
  /// Proxy for "p4 close enough to p1": |p4 - p1| <= kappa |p1|.
  double kappa = 0.5;

  /// Throws DomainError unless p1 < p4 < 0 and kappa > 0.
  void validate() const;
  bool within_closeness() const;
};

struct WaveState {
  double p = 0.0;
  double m = 0.0;
  double n = 0.0;
};

/// Closed-form state inside the wave strip -p4 <= eta <= -p1.
WaveState wave_state(CartPoint point, const WaveParams& params);

/// Angle of B, where sin^2(theta_B) = p4 / p1.
double theta_b(const WaveParams& params);

/// State on the boundary characteristic AB (r = -p1 sin theta):
/// p = p1 sin^2 theta, R = p1 sin 2 theta, S = 0.
StateW wave_RS(double theta, const WaveParams& params);

CartPoint point_A(const WaveParams& params);
CartPoint point_B(const WaveParams& params);

/// (p, R, S) of the wave at a polar point inside the strip.
StateW wave_polar_state(PolarPoint q, const WaveParams& params);

/// Wave (R, S) as functions of (r, t): R = -2 t sqrt(2r - t^2), S = 0.
double wave_R_rt(double r, double t);

// -- characteristic tracing -------------------------------------------------

enum class Family { plus, minus };

struct TracePoint {
  CartPoint c;
  double r = 0.0;
  double theta = 0.0;
  StateW w;  // R, S are NaN when the field does not provide them
};

using Polyline = std::vector<TracePoint>;

/// Pressure field seen by the tracer: returns (p, R, S) at a point.
using FieldFn = std::function<StateW(CartPoint)>;

/// Stop event: the trace ends where this function first becomes <= 0; the
/// final point is placed on the zero by root finding on the last step.
using EventFn = std::function<double(const TracePoint&)>;

struct TraceOptions {
  double step = 1e-3;            // arc-length step
  double refine_below = 1e-2;    // halve the step while r + p is below this
  double eps_stop = 0.0;         // sonic proximity stop r + p <= eps_stop
  std::size_t max_steps = 2000000;
  CartPoint heading{1.0, 0.0};   // initial orientation of the trace
  bool allow_sonic_start = false;
  EventFn event;                 // optional extra stop event
};

enum class StopReason { event, sonic };

struct TraceResult {
  Polyline points;
  StopReason reason = StopReason::event;
};

class StepBudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unit tangent of the given family of the self-similar characteristics at c,
/// oriented to have a nonnegative component along `reference`.
CartPoint characteristic_tangent(CartPoint c, double p, Family family,
                                 CartPoint reference);

/// Fixed-step RK4 integration of the self-similar characteristic ODE.
/// Throws DomainError when started at a sonic point (unless
/// `allow_sonic_start`) or in the elliptic region, and StepBudgetExhausted
/// when `max_steps` is reached before any stop condition.
TraceResult characteristic_trace(CartPoint start, Family family,
                                 const FieldFn& field, const TraceOptions& opts);

/// Field of the R14 wave with the adjacent constant states outside the strip.
FieldFn wave_field(const WaveParams& params);

/// Trace of AB from A to the lower strip edge eta = -p4.
TraceResult trace_AB(const WaveParams& params, double step = 1e-3);

}  // namespace sonic

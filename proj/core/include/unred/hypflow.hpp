#pragma once

// Hyperbolic curvature flow in un-reduced form:
//
//   ∂t h = D_θ(v h) − κ(½h² − 1),   ∂t v = F^v,   c_t = h n + v t.
//
// Integrated as a first-order system in (c, h, v) with classical RK4.

#include <cstddef>
#include <vector>

#include "unred/curve.hpp"
#include "unred/force.hpp"

namespace unred {

struct FlowState {
  DiscreteCurve curve;
  std::vector<double> h;  // normal speed
  std::vector<double> v;  // tangential speed
  double time = 0.0;

  /// Checks that h and v match the curve's sample count.
  void validate() const;
};

struct FlowRhs {
  std::vector<Vec2> dc;
  std::vector<double> dh;
  std::vector<double> dv;
};

FlowRhs flow_rhs(const FlowState& state, const ForceProfile& force, DerivBackend backend = DerivBackend::spectral);

enum class StopReason { completed, curvature_blowup, regularity_loss };

std::string to_string(StopReason reason);

struct FlowOptions {
  DerivBackend backend = DerivBackend::spectral;
  double kappa_max = 1e3;
  std::size_t resample_every = 0;  // arc-length resampling period in steps, 0 = never
  std::size_t save_stride = 1;     // keep every k-th state (the final state is always kept)
};

struct Trajectory {
  std::vector<FlowState> frames;
  StopReason stop = StopReason::completed;
  double last_valid_time = 0.0;
  std::size_t steps = 0;
};

/// States at t = 0, dt, …, T. Stops early, keeping everything up to the
/// last valid state, when |κ| exceeds kappa_max or a stage loses regularity.
Trajectory integrate(const FlowState& initial, const ForceProfile& force, double final_time, double dt,
                     const FlowOptions& options = {});

struct CircleState {
  double radius = 0.0;
  double h = 0.0;
};

/// Reference solution for circular data: Ṙ = −h, ḣ = (1 − ½h²)/R, by an
/// adaptive Dormand–Prince integrator at tolerance 1e-13. Throws
/// SingularityStop if R reaches 0 before the final time.
CircleState circle_reduction_oracle(double r0, double h0, double final_time);

}  // namespace unred

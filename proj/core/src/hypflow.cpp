#include "unred/hypflow.hpp"

#include <algorithm>
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "unred/errors.hpp"
#include "unred/spectral.hpp"

namespace unred {

void FlowState::validate() const {
  if (h.size() != curve.size() || v.size() != curve.size()) {
    throw LengthMismatch("FlowState: h and v must have one entry per curve sample");
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::completed:
      return "completed";
    case StopReason::curvature_blowup:
      return "curvature_blowup";
    case StopReason::regularity_loss:
      return "regularity_loss";
  }
  return "unknown";
}

FlowRhs flow_rhs(const FlowState& state, const ForceProfile& force, DerivBackend backend) {
  state.validate();
  const std::size_t n = state.curve.size();
  const auto fr = frenet(state.curve, backend);
  std::vector<double> vh(n);
  for (std::size_t j = 0; j < n; ++j) vh[j] = state.v[j] * state.h[j];
  const auto d_vh = arclength_derivative(fr, vh);

  FlowRhs r;
  r.dc = recompose_velocity(fr, state.v, state.h);
  r.dh.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    r.dh[j] = d_vh[j] - fr.curvature[j] * (0.5 * state.h[j] * state.h[j] - 1.0);
  }
  r.dv = force.evaluate(n);
  return r;
}

namespace {

FlowState advance(const FlowState& s, const FlowRhs& k, double dt) {
  const std::size_t n = s.curve.size();
  std::vector<Vec2> pts(s.curve.samples().begin(), s.curve.samples().end());
  FlowState out{DiscreteCurve(s.curve), s.h, s.v, s.time + dt};
  for (std::size_t j = 0; j < n; ++j) {
    pts[j] += dt * k.dc[j];
    out.h[j] += dt * k.dh[j];
    out.v[j] += dt * k.dv[j];
  }
  out.curve = DiscreteCurve(std::move(pts));
  return out;
}

FlowState rk4_step(const FlowState& s, const ForceProfile& force, double dt, DerivBackend backend) {
  const auto k1 = flow_rhs(s, force, backend);
  const auto k2 = flow_rhs(advance(s, k1, 0.5 * dt), force, backend);
  const auto k3 = flow_rhs(advance(s, k2, 0.5 * dt), force, backend);
  const auto k4 = flow_rhs(advance(s, k3, dt), force, backend);

  const std::size_t n = s.curve.size();
  std::vector<Vec2> pts(s.curve.samples().begin(), s.curve.samples().end());
  FlowState out{s.curve, s.h, s.v, s.time + dt};
  const double w = dt / 6.0;
  for (std::size_t j = 0; j < n; ++j) {
    pts[j] += w * (k1.dc[j] + 2.0 * k2.dc[j] + 2.0 * k3.dc[j] + k4.dc[j]);
    out.h[j] += w * (k1.dh[j] + 2.0 * k2.dh[j] + 2.0 * k3.dh[j] + k4.dh[j]);
    out.v[j] += w * (k1.dv[j] + 2.0 * k2.dv[j] + 2.0 * k3.dv[j] + k4.dv[j]);
  }
  out.curve = DiscreteCurve(std::move(pts));
  return out;
}

FlowState resample(const FlowState& s) {
  const auto thetas = arclength_parameters(s.curve, s.curve.size());
  const spectral::TrigInterpolant h(s.h);
  const spectral::TrigInterpolant v(s.v);
  FlowState out{DiscreteCurve(evaluate_curve(s.curve, thetas)), s.h, s.v, s.time};
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    out.h[j] = h(thetas[j]);
    out.v[j] = v(thetas[j]);
  }
  return out;
}

double max_curvature(const FlowState& s, DerivBackend backend) {
  const auto fr = frenet(s.curve, backend);
  double m = 0.0;
  for (double k : fr.curvature) m = std::max(m, std::abs(k));
  return m;
}

}  // namespace

Trajectory integrate(const FlowState& initial, const ForceProfile& force, double final_time, double dt,
                     const FlowOptions& options) {
  initial.validate();
  if (!(dt > 0.0) || !(final_time > 0.0)) throw std::invalid_argument("integrate: dt and T must be positive");
  const std::size_t stride = std::max<std::size_t>(1, options.save_stride);
  const auto steps = static_cast<std::size_t>(std::ceil(final_time / dt - 1e-9));

  Trajectory traj;
  traj.frames.push_back(initial);
  traj.last_valid_time = initial.time;
  FlowState state = initial;
  for (std::size_t s = 1; s <= steps; ++s) {
    const double h = s == steps ? initial.time + final_time - state.time : dt;
    try {
      FlowState next = rk4_step(state, force, h, options.backend);
      if (options.resample_every > 0 && s % options.resample_every == 0) next = resample(next);
      if (max_curvature(next, options.backend) > options.kappa_max) {
        traj.stop = StopReason::curvature_blowup;
        break;
      }
      state = std::move(next);
    } catch (const RegularityError&) {
      traj.stop = StopReason::regularity_loss;
      break;
    }
    traj.steps = s;
    traj.last_valid_time = state.time;
    if (s % stride == 0 || s == steps) traj.frames.push_back(state);
  }
  if (traj.stop != StopReason::completed && traj.frames.back().time != state.time) traj.frames.push_back(state);
  return traj;
}

CircleState circle_reduction_oracle(double r0, double h0, double final_time) {
  if (!(r0 > 0.0)) throw std::invalid_argument("circle_reduction_oracle: R0 must be positive");
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  auto system = [](const State& x, State& dxdt, double) {
    dxdt[0] = -x[1];
    dxdt[1] = (1.0 - 0.5 * x[1] * x[1]) / x[0];
  };
  auto stepper = ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  State x{r0, h0};
  double t = 0.0;
  double step = 1e-4;
  while (t < final_time) {
    step = std::min(step, final_time - t);
    State trial = x;
    double t_trial = t;
    if (stepper.try_step(system, trial, t_trial, step) == ode::success) {
      if (!(trial[0] > 0.0)) throw SingularityStop("circle_reduction_oracle: radius collapsed", t);
      x = trial;
      t = t_trial;
    } else if (step < 1e-14) {
      throw SingularityStop("circle_reduction_oracle: step size underflow", t);
    }
  }
  return {x[0], x[1]};
}

}  // namespace unred

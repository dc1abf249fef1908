#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace liftreach {

/// File and stream failures; the CLI maps these to their own exit code.
struct IOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Traffic state around the victim vehicle:
///   x1  speed of the controlled (victim) vehicle        [m/s]
///   x2  speed of the vehicle directly ahead (adversary) [m/s]
///   x3  bumper-to-bumper gap between them               [m]
using StateVec = Eigen::Vector3d;

struct StateBounds {
  double v_max = 10.0;
  double dd_min = 0.0;
  double dd_max = 20.0;
};

struct InputBounds {
  double a_min = -1.0;
  double a_max = 1.0;
};

inline bool in_bounds(const StateVec& x, const StateBounds& b) {
  return x(0) >= 0.0 && x(0) <= b.v_max && x(1) >= 0.0 && x(1) <= b.v_max &&
         x(2) >= b.dd_min && x(2) <= b.dd_max;
}

inline double clamp_input(double u, const InputBounds& b) {
  return std::clamp(u, b.a_min, b.a_max);
}

/// Sampled closed-loop trace. states has one more entry than inputs;
/// state k is taken at time k*dt and inputs[k] acts over [k*dt, (k+1)*dt).
struct Trajectory {
  double dt = 0.1;
  std::vector<StateVec> states;
  std::vector<double> inputs;

  std::size_t steps() const { return inputs.size(); }
  double time_at(std::size_t k) const { return static_cast<double>(k) * dt; }

  void validate() const {
    if (states.empty()) throw std::invalid_argument("trajectory: no states");
    if (states.size() != inputs.size() + 1)
      throw std::invalid_argument("trajectory: need one more state than inputs");
    if (!(dt > 0.0)) throw std::invalid_argument("trajectory: dt must be positive");
  }
};

/// Opaque plant. step returns the successor state, or nullopt when the plant
/// cannot advance (the ring simulator uses this to signal a collision).
struct BlackBoxSystem {
  std::function<std::optional<StateVec>(const StateVec&, double, double)> step;
};

struct RolloutResult {
  Trajectory trajectory;
  bool completed = true;
  std::string reason = "completed";
};

/// Drive the plant with the given adversary input sequence. On early
/// termination the trajectory is truncated after the last valid state.
inline RolloutResult rollout(const BlackBoxSystem& sys, const StateVec& x0,
                             const std::vector<double>& inputs, double dt) {
  if (!sys.step) throw std::invalid_argument("rollout: system has no step function");
  if (!(dt > 0.0)) throw std::invalid_argument("rollout: dt must be positive");
  RolloutResult out;
  out.trajectory.dt = dt;
  out.trajectory.states.push_back(x0);
  for (double u : inputs) {
    std::optional<StateVec> next = sys.step(out.trajectory.states.back(), u, dt);
    if (!next) {
      out.completed = false;
      out.reason = "terminated by plant";
      return out;
    }
    out.trajectory.inputs.push_back(u);
    out.trajectory.states.push_back(*next);
  }
  return out;
}

}  // namespace liftreach

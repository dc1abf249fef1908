#pragma once

#include "liftreach/csv.hpp"
#include "liftreach/model.hpp"

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <vector>

namespace liftreach {

/// ||psi(x_{k+1}) - A psi(x_k) - B u_k|| for every transition.
inline std::vector<double> one_step_residuals(const LiftedModel& m, const Dataset& data) {
  MonomialBasis basis = m.basis();
  std::vector<double> out;
  out.reserve(data.size());
  for (const Sample& s : data)
    out.push_back((basis.lift(s.xp) - m.A * basis.lift(s.x) - m.B * s.u).norm());
  return out;
}

inline std::vector<double> one_step_residuals(const LiftedModel& m, const Trajectory& traj) {
  traj.validate();
  Dataset data;
  data.reserve(traj.steps());
  for (std::size_t k = 0; k < traj.steps(); ++k)
    data.push_back({traj.states[k], traj.inputs[k], traj.states[k + 1]});
  return one_step_residuals(m, data);
}

/// ||psi(x_k) - (A^k psi(x_0) + sum_i A^{k-1-i} B u_i)|| for k = 0..K.
inline std::vector<double> propagated_error(const LiftedModel& m, const Trajectory& traj) {
  traj.validate();
  MonomialBasis basis = m.basis();
  Eigen::MatrixXd pred = predict_lifted(m, basis.lift(traj.states[0]), traj.inputs);
  std::vector<double> out;
  out.reserve(traj.states.size());
  for (std::size_t k = 0; k < traj.states.size(); ++k)
    out.push_back((basis.lift(traj.states[k]) - pred.col(static_cast<Eigen::Index>(k))).norm());
  return out;
}

/// Worst-case propagated bound sigma = eps * N / (1 - gamma), defined only
/// for gamma-stable models with gamma < 1.
inline std::optional<double> propagation_bound(const LiftedModel& m, double eps) {
  if (m.tag != StabilityTag::kGammaStable || !(m.gamma < 1.0)) return std::nullopt;
  return eps * static_cast<double>(m.N) / (1.0 - m.gamma);
}

struct ErrorReport {
  double eps = 0.0;                  // max one-step lifted residual on the data
  std::vector<double> r_norms;       // ||R_k|| series along the trajectory
  double max_r = 0.0;
  std::optional<double> sigma;       // bound, present for gamma-stable models
  bool within_bound = true;          // max_r <= sigma when sigma is defined
};

inline ErrorReport make_error_report(const LiftedModel& m, const Trajectory& traj) {
  ErrorReport rep;
  for (double r : one_step_residuals(m, traj)) rep.eps = std::max(rep.eps, r);
  rep.r_norms = propagated_error(m, traj);
  for (double r : rep.r_norms) rep.max_r = std::max(rep.max_r, r);
  rep.sigma = propagation_bound(m, rep.eps);
  if (rep.sigma) rep.within_bound = rep.max_r <= *rep.sigma;
  return rep;
}

}  // namespace liftreach

#pragma once

#include "liftreach/basis.hpp"
#include "liftreach/csv.hpp"
#include "liftreach/model.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace liftreach {

struct FitOptions {
  bool use_input = true;      // when false, B is fixed to zero (autonomous fit)
  double svd_cutoff = 1e-10;  // relative to the largest singular value
};

struct FitResult {
  LiftedModel model;
  int rank = 0;
  int regressor_cols = 0;  // N + 1 with input, N without
  bool rank_deficient = false;
  double residual_rms = 0.0;
};

/// Least-squares fit of psi_{k+1} ~ A psi_k + B u_k over the given dataset.
/// Solved through an SVD of the stacked regressor with a relative
/// singular-value cutoff; rank deficiency yields the minimum-norm solution
/// and is flagged, not fatal.
inline FitResult fit_edmdc(const Dataset& data, int degree, double dt,
                           const FitOptions& opt = {}) {
  MonomialBasis basis(degree);
  const int N = basis.size();
  const int P = N + (opt.use_input ? 1 : 0);
  const auto M = static_cast<Eigen::Index>(data.size());
  if (M < P)
    throw std::invalid_argument("fit_edmdc: need at least N + m samples for the regressor");
  if (!(dt > 0.0)) throw std::invalid_argument("fit_edmdc: dt must be positive");

  Eigen::MatrixXd Zt(M, P);  // rows: [psi(x_k)^T, u_k]
  Eigen::MatrixXd Yt(M, N);  // rows: psi(x_{k+1})^T
  for (Eigen::Index i = 0; i < M; ++i) {
    const Sample& s = data[static_cast<std::size_t>(i)];
    Zt.row(i).head(N) = basis.lift(s.x).transpose();
    if (opt.use_input) Zt(i, N) = s.u;
    Yt.row(i) = basis.lift(s.xp).transpose();
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(Zt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(opt.svd_cutoff);
  Eigen::MatrixXd Wt = svd.solve(Yt);  // P x N

  FitResult out;
  out.rank = static_cast<int>(svd.rank());
  out.regressor_cols = P;
  out.rank_deficient = out.rank < P;
  out.residual_rms = std::sqrt((Zt * Wt - Yt).squaredNorm() / static_cast<double>(M * N));

  out.model.d = degree;
  out.model.N = N;
  out.model.dt = dt;
  out.model.gamma = 1.0;
  out.model.tag = StabilityTag::kRawLS;
  out.model.A = Wt.topRows(N).transpose();
  out.model.B = opt.use_input ? Eigen::VectorXd(Wt.row(N).transpose())
                              : Eigen::VectorXd(Eigen::VectorXd::Zero(N));
  return out;
}

}  // namespace liftreach

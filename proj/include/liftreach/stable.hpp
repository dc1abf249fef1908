#pragma once

#include "liftreach/model.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace liftreach {

namespace detail {

inline Eigen::MatrixXd polar_orthogonal(const Eigen::MatrixXd& M) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// Symmetrize and clamp the spectrum to [lo, hi].
inline Eigen::MatrixXd sym_eig_clamp(const Eigen::MatrixXd& M, double lo, double hi) {
  Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ms);
  Eigen::VectorXd lam = es.eigenvalues();
  for (Eigen::Index i = 0; i < lam.size(); ++i) lam(i) = std::clamp(lam(i), lo, hi);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

struct StabilizeOptions {
  int max_iters = 500;
  double tol = 1e-12;        // relative objective improvement considered progress
  double s_floor = 1e-6;     // smallest eigenvalue kept in S (S normalized to unit norm)
  double init_step = 1e-2;
};

struct StabilizeResult {
  Eigen::MatrixXd A;         // the projected matrix
  bool already_stable = false;
  bool used_fallback = false;
  int iterations = 0;
  double distance = 0.0;     // Frobenius distance to the input
  double rho = 0.0;          // spectral radius of the result
};

/// Nearest gamma-stable matrix in the S^{-1} C O S parameterization
/// (S positive definite, C orthogonal, O positive semidefinite with
/// ||O||_2 <= gamma), fitted by projected gradient descent with backtracking.
/// Every iterate is feasible: rho(S^{-1} C O S) = rho(C O) <= ||O||_2 <= gamma.
/// Falls back to uniform eigenvalue scaling when descent does not beat it.
inline StabilizeResult project_stable(const Eigen::MatrixXd& A, double gamma,
                                      const StabilizeOptions& opt = {}) {
  if (A.rows() != A.cols()) throw std::invalid_argument("project_stable: matrix must be square");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("project_stable: gamma must be in (0, 1]");
  const Eigen::Index n = A.rows();

  StabilizeResult out;
  const double rho_in = spectral_radius(A);
  if (rho_in <= gamma) {
    out.A = A;
    out.already_stable = true;
    out.rho = rho_in;
    return out;
  }

  // Initial factors from the polar decomposition A = (U V^T)(V Sigma V^T).
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::MatrixXd C = svd.matrixU() * svd.matrixV().transpose();
  Eigen::MatrixXd O = detail::sym_eig_clamp(
      svd.matrixV() * svd.singularValues().asDiagonal() * svd.matrixV().transpose(), 0.0, gamma);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);

  auto reconstruct = [&](const Eigen::MatrixXd& Cm, const Eigen::MatrixXd& Om,
                         const Eigen::MatrixXd& Sm) {
    return Eigen::MatrixXd(Sm.partialPivLu().solve(Cm * Om * Sm));
  };
  auto objective = [&](const Eigen::MatrixXd& Cm, const Eigen::MatrixXd& Om,
                       const Eigen::MatrixXd& Sm) {
    return (A - reconstruct(Cm, Om, Sm)).squaredNorm();
  };

  double f = objective(C, O, S);
  double step = opt.init_step;
  int stall = 0;
  int it = 0;
  for (; it < opt.max_iters && stall < 3 && step > 1e-15; ++it) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
    Eigen::MatrixXd Sinv = lu.inverse();
    Eigen::MatrixXd R = Sinv * C * O * S;
    Eigen::MatrixXd E = A - R;
    Eigen::MatrixXd SinvT = Sinv.transpose();
    Eigen::MatrixXd M = C * O;

    Eigen::MatrixXd GC = -2.0 * SinvT * E * S.transpose() * O;
    Eigen::MatrixXd GO = -2.0 * C.transpose() * SinvT * E * S.transpose();
    Eigen::MatrixXd GS =
        2.0 * SinvT * E * S.transpose() * M.transpose() * SinvT - 2.0 * M.transpose() * SinvT * E;

    double gnorm = std::sqrt(GC.squaredNorm() + GO.squaredNorm() + GS.squaredNorm());
    if (gnorm < 1e-300) break;

    bool improved = false;
    double alpha = step;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::MatrixXd Ct = detail::polar_orthogonal(C - alpha * GC);
      Eigen::MatrixXd Ot = detail::sym_eig_clamp(O - alpha * GO, 0.0, gamma);
      Eigen::MatrixXd St = detail::sym_eig_clamp(S - alpha * GS, 0.0, 1e300);
      // S is scale-free in the objective; normalize and keep it invertible.
      double smax = St.norm();
      if (smax > 0.0) St /= smax;
      St = detail::sym_eig_clamp(St, opt.s_floor, 1e300);
      double ft = objective(Ct, Ot, St);
      if (ft < f) {
        double rel_gain = (f - ft) / std::max(f, 1e-300);
        C = Ct;
        O = Ot;
        S = St;
        f = ft;
        step = alpha * 1.5;
        improved = true;
        stall = rel_gain < opt.tol ? stall + 1 : 0;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) {
      step = alpha;
      ++stall;
    }
  }

  Eigen::MatrixXd cand = reconstruct(C, O, S);
  double f_cand = (A - cand).squaredNorm();
  Eigen::MatrixXd fallback = A * (gamma / rho_in);
  double f_fb = (A - fallback).squaredNorm();
  if (f_fb < f_cand) {
    cand = fallback;
    f_cand = f_fb;
    out.used_fallback = true;
  }

  double rho = spectral_radius(cand);
  if (rho > gamma && rho > 0.0) {
    cand *= gamma / rho;
    rho = spectral_radius(cand);
    f_cand = (A - cand).squaredNorm();
  }

  out.A = cand;
  out.iterations = it;
  out.distance = std::sqrt(f_cand);
  out.rho = rho;
  return out;
}

/// Apply the projection to a fitted surrogate and retag it.
inline LiftedModel stabilize_model(const LiftedModel& m, double gamma,
                                   const StabilizeOptions& opt = {}) {
  StabilizeResult r = project_stable(m.A, gamma, opt);
  LiftedModel out = m;
  out.A = r.A;
  out.gamma = gamma;
  out.tag = StabilityTag::kGammaStable;
  out.validate();
  return out;
}

}  // namespace liftreach

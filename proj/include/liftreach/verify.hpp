#pragma once

#include "liftreach/edmdc.hpp"
#include "liftreach/errors.hpp"
#include "liftreach/model.hpp"
#include "liftreach/stable.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace liftreach {

/// Benchmark linear plant used for the surrogate-quality study: one real
/// mode just outside the unit circle plus a lightly damped rotation.
inline Eigen::Matrix3d verify_default_matrix() {
  Eigen::Matrix3d A;
  A << 1.0030, 0.0000, 0.0000,
       0.0008, 0.9950, 0.0998,
       0.0059, -0.0998, 0.9950;
  return A;
}

struct VerifyConfig {
  int n_seeds = 10;
  int n_train = 500;        // measured states used for fitting
  int n_test = 500;         // prediction steps evaluated on held-out data
  double noise_std = 0.01;  // measurement noise on every sampled state
  double radius = 4.0;      // norm ceiling of the plant's operating envelope
  double gamma = 0.999;
  double dt = 0.1;
  std::uint64_t base_seed = 1;
  Eigen::Matrix3d A_true = verify_default_matrix();

  void validate() const {
    if (n_seeds < 1 || n_train < 4 || n_test < 2)
      throw std::invalid_argument("verify: experiment sizes too small");
    if (!(noise_std >= 0.0)) throw std::invalid_argument("verify: noise_std must be >= 0");
    if (!(radius > 1.0)) throw std::invalid_argument("verify: radius must exceed the unit start");
    if (!(gamma > 0.0 && gamma < 1.0))
      throw std::invalid_argument("verify: gamma must be in (0, 1)");
  }
};

struct VerifySeedResult {
  double eps_ls = 0.0;           // max one-step lifted residual on test data
  double eps_stable = 0.0;
  double sigma_stable = 0.0;     // eps * N / (1 - gamma)
  double max_r_stable = 0.0;
  bool bound_ok = false;
  double rho_ls = 0.0;
  double rho_stable = 0.0;
  Eigen::Vector3d moduli_stable = Eigen::Vector3d::Zero();
  std::vector<double> r_ls;      // ||R_k|| on the test trajectory
  std::vector<double> r_stable;
};

struct VerifyReport {
  VerifyConfig cfg;
  std::vector<VerifySeedResult> seeds;
  std::vector<double> mean_r_ls;      // averaged over seeds, k = 0..n_test
  std::vector<double> std_r_ls;
  std::vector<double> mean_r_stable;
  std::vector<double> std_r_stable;
  double mean_eps_ls = 0.0;
  double mean_eps_stable = 0.0;
};

/// Repeat: simulate the true plant from a unit start exciting both the
/// expanding mode and the rotation, keeping the state inside its norm
/// envelope, add measurement noise, fit the surrogate by least squares on
/// the first half, project it to the contraction threshold, then measure
/// one-step and propagated errors of both fits on the held-out half. The
/// envelope radius is sized so the training window sees the free transient
/// while the held-out window runs along the saturated boundary.
inline VerifyReport run_verify_experiment(const VerifyConfig& cfg) {
  cfg.validate();
  VerifyReport rep;
  rep.cfg = cfg;
  const int n_total = cfg.n_train + cfg.n_test + 1;

  for (int s = 0; s < cfg.n_seeds; ++s) {
    std::mt19937_64 rng(cfg.base_seed + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);

    const double sign = gauss(rng) < 0.0 ? -1.0 : 1.0;
    const double phi = phase(rng);
    Eigen::Vector3d x(sign * 0.8, 0.6 * std::cos(phi), 0.6 * std::sin(phi));

    std::vector<Eigen::Vector3d> meas;
    meas.reserve(static_cast<std::size_t>(n_total));
    for (int k = 0; k < n_total; ++k) {
      Eigen::Vector3d y = x;
      for (int c = 0; c < 3; ++c) y(c) += cfg.noise_std * gauss(rng);
      meas.push_back(y);
      x = cfg.A_true * x;
      if (x.norm() > cfg.radius) x *= cfg.radius / x.norm();
    }

    Dataset train;
    for (int k = 0; k + 1 < cfg.n_train; ++k)
      train.push_back({meas[static_cast<std::size_t>(k)], 0.0,
                       meas[static_cast<std::size_t>(k) + 1]});
    FitOptions fo;
    fo.use_input = false;
    FitResult fit = fit_edmdc(train, 1, cfg.dt, fo);
    LiftedModel stable = stabilize_model(fit.model, cfg.gamma);

    Trajectory test;
    test.dt = cfg.dt;
    for (int k = cfg.n_train; k < n_total; ++k)
      test.states.push_back(meas[static_cast<std::size_t>(k)]);
    test.inputs.assign(test.states.size() - 1, 0.0);

    VerifySeedResult r;
    for (double v : one_step_residuals(fit.model, test)) r.eps_ls = std::max(r.eps_ls, v);
    for (double v : one_step_residuals(stable, test)) r.eps_stable = std::max(r.eps_stable, v);
    r.r_ls = propagated_error(fit.model, test);
    r.r_stable = propagated_error(stable, test);
    for (double v : r.r_stable) r.max_r_stable = std::max(r.max_r_stable, v);
    r.sigma_stable = *propagation_bound(stable, r.eps_stable);
    r.bound_ok = r.max_r_stable <= r.sigma_stable;
    r.rho_ls = spectral_radius(fit.model.A);
    r.rho_stable = spectral_radius(stable.A);
    r.moduli_stable = eigen_moduli(stable.A).head<3>();
    rep.seeds.push_back(std::move(r));
  }

  const std::size_t n_curve = rep.seeds.front().r_ls.size();
  auto aggregate = [&](auto pick, std::vector<double>& mean, std::vector<double>& stdev) {
    mean.assign(n_curve, 0.0);
    stdev.assign(n_curve, 0.0);
    for (const VerifySeedResult& r : rep.seeds)
      for (std::size_t k = 0; k < n_curve; ++k) mean[k] += pick(r)[k];
    for (double& v : mean) v /= rep.seeds.size();
    for (const VerifySeedResult& r : rep.seeds)
      for (std::size_t k = 0; k < n_curve; ++k) {
        double dv = pick(r)[k] - mean[k];
        stdev[k] += dv * dv;
      }
    for (double& v : stdev) v = std::sqrt(v / rep.seeds.size());
  };
  aggregate([](const VerifySeedResult& r) -> const std::vector<double>& { return r.r_ls; },
            rep.mean_r_ls, rep.std_r_ls);
  aggregate([](const VerifySeedResult& r) -> const std::vector<double>& { return r.r_stable; },
            rep.mean_r_stable, rep.std_r_stable);
  for (const VerifySeedResult& r : rep.seeds) {
    rep.mean_eps_ls += r.eps_ls;
    rep.mean_eps_stable += r.eps_stable;
  }
  rep.mean_eps_ls /= rep.seeds.size();
  rep.mean_eps_stable /= rep.seeds.size();
  return rep;
}

}  // namespace liftreach

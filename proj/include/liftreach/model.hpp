#pragma once

#include "liftreach/basis.hpp"
#include "liftreach/core.hpp"

#include <json.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftreach {

using ordered_json = nlohmann::ordered_json;

inline double spectral_radius(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("spectral_radius: matrix must be square");
  if (A.rows() == 0) return 0.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline Eigen::VectorXd eigen_moduli(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  Eigen::VectorXd m = es.eigenvalues().cwiseAbs();
  std::sort(m.data(), m.data() + m.size(), std::greater<double>());
  return m;
}

enum class StabilityTag { kRawLS, kGammaStable };

inline std::string to_string(StabilityTag t) {
  return t == StabilityTag::kRawLS ? "raw_ls" : "gamma_stable";
}

inline StabilityTag stability_tag_from_string(const std::string& s) {
  if (s == "raw_ls") return StabilityTag::kRawLS;
  if (s == "gamma_stable") return StabilityTag::kGammaStable;
  throw std::invalid_argument("model: unknown stability_tag '" + s + "'");
}

/// Discrete-time surrogate psi_{k+1} = A psi_k + B u_k over the monomial
/// basis of degree d. gamma is the contraction threshold the matrix was
/// projected to; it is 1 for an unprojected least-squares fit.
struct LiftedModel {
  int d = 3;
  int N = 10;
  double dt = 0.1;
  double gamma = 1.0;
  StabilityTag tag = StabilityTag::kRawLS;
  Eigen::MatrixXd A;
  Eigen::VectorXd B;

  MonomialBasis basis() const { return MonomialBasis(d); }

  void validate() const {
    if (N != basis_size(d)) throw std::invalid_argument("model: N does not match degree");
    if (A.rows() != N || A.cols() != N) throw std::invalid_argument("model: A must be N x N");
    if (B.size() != N) throw std::invalid_argument("model: B must have N rows");
    if (!(dt > 0.0)) throw std::invalid_argument("model: dt must be positive");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("model: gamma must be in (0, 1]");
    if (!A.allFinite() || !B.allFinite()) throw std::invalid_argument("model: non-finite entries");
    if (tag == StabilityTag::kGammaStable && spectral_radius(A) > gamma + 1e-6)
      throw std::invalid_argument("model: tagged gamma-stable but spectral radius exceeds gamma");
  }
};

inline ordered_json model_to_json(const LiftedModel& m) {
  m.validate();
  ordered_json j;
  j["d"] = m.d;
  j["N"] = m.N;
  j["dt"] = m.dt;
  j["gamma"] = m.gamma;
  j["stability_tag"] = to_string(m.tag);
  ordered_json order = ordered_json::array();
  MonomialBasis basis(m.d);
  for (const auto& e : basis.exponents()) order.push_back({e[0], e[1], e[2]});
  j["basis_order"] = order;
  ordered_json a = ordered_json::array();
  for (int r = 0; r < m.N; ++r)
    for (int c = 0; c < m.N; ++c) a.push_back(m.A(r, c));
  j["A"] = a;
  ordered_json b = ordered_json::array();
  for (int r = 0; r < m.N; ++r) b.push_back(m.B(r));
  j["B"] = b;
  return j;
}

inline LiftedModel model_from_json(const ordered_json& j) {
  LiftedModel m;
  m.d = j.at("d").get<int>();
  m.N = j.at("N").get<int>();
  m.dt = j.at("dt").get<double>();
  m.gamma = j.at("gamma").get<double>();
  m.tag = stability_tag_from_string(j.at("stability_tag").get<std::string>());
  MonomialBasis basis(m.d);
  const auto& order = j.at("basis_order");
  if (static_cast<int>(order.size()) != m.N)
    throw std::invalid_argument("model: basis_order length mismatch");
  for (int i = 0; i < m.N; ++i) {
    const auto& e = basis.exponents()[static_cast<std::size_t>(i)];
    if (order[static_cast<std::size_t>(i)][0].get<int>() != e[0] ||
        order[static_cast<std::size_t>(i)][1].get<int>() != e[1] ||
        order[static_cast<std::size_t>(i)][2].get<int>() != e[2])
      throw std::invalid_argument("model: basis_order does not match canonical ordering");
  }
  const auto& a = j.at("A");
  if (static_cast<int>(a.size()) != m.N * m.N) throw std::invalid_argument("model: A length mismatch");
  m.A.resize(m.N, m.N);
  for (int r = 0; r < m.N; ++r)
    for (int c = 0; c < m.N; ++c) m.A(r, c) = a[static_cast<std::size_t>(r * m.N + c)].get<double>();
  const auto& b = j.at("B");
  if (static_cast<int>(b.size()) != m.N) throw std::invalid_argument("model: B length mismatch");
  m.B.resize(m.N);
  for (int r = 0; r < m.N; ++r) m.B(r) = b[static_cast<std::size_t>(r)].get<double>();
  m.validate();
  return m;
}

inline void save_model(const LiftedModel& m, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IOError("cannot open for writing: " + path);
  f << model_to_json(m).dump(2) << '\n';
  if (!f) throw IOError("write failed: " + path);
}

inline LiftedModel load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open for reading: " + path);
  ordered_json j = ordered_json::parse(f);
  return model_from_json(j);
}

/// Propagate the lifted state under the surrogate; one column per step,
/// column k is psi_k (K+1 columns in total).
inline Eigen::MatrixXd predict_lifted(const LiftedModel& m, const Eigen::VectorXd& psi0,
                                      const std::vector<double>& inputs) {
  if (psi0.size() != m.N) throw std::invalid_argument("predict: lifted state has wrong size");
  Eigen::MatrixXd out(m.N, static_cast<Eigen::Index>(inputs.size()) + 1);
  out.col(0) = psi0;
  for (std::size_t k = 0; k < inputs.size(); ++k)
    out.col(static_cast<Eigen::Index>(k) + 1) =
        m.A * out.col(static_cast<Eigen::Index>(k)) + m.B * inputs[k];
  return out;
}

/// Surrogate rollout in original coordinates via lift, propagate, recover.
inline Trajectory predict(const LiftedModel& m, const StateVec& x0,
                          const std::vector<double>& inputs) {
  MonomialBasis basis = m.basis();
  Eigen::MatrixXd psi = predict_lifted(m, basis.lift(x0), inputs);
  Trajectory traj;
  traj.dt = m.dt;
  traj.inputs = inputs;
  traj.states.reserve(static_cast<std::size_t>(psi.cols()));
  for (Eigen::Index k = 0; k < psi.cols(); ++k) traj.states.push_back(basis.recover(psi.col(k)));
  return traj;
}

}  // namespace liftreach

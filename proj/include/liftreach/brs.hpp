#pragma once

#include "liftreach/csv.hpp"
#include "liftreach/model.hpp"
#include "liftreach/target.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftreach {

/// Backward reachable set of a lifted half-space under the surrogate,
/// represented exactly: the k-step set is {psi : w_k . psi <= c_k} with
///   w_k = (A^T)^k w_0,   c_k = c_0 - sum_{j<k} min_u (w_j . B) u.
struct BRSChain {
  int K = 0;
  double dt = 0.1;
  bool within_horizon = false;          // membership over all j <= k instead of exactly k
  std::vector<Eigen::VectorXd> w;       // K + 1 normals
  std::vector<double> c;
  std::string source_model;             // digest of the model the chain was built from

  void validate() const {
    if (K < 0) throw std::invalid_argument("brs: negative horizon");
    if (w.size() != static_cast<std::size_t>(K) + 1 || c.size() != w.size())
      throw std::invalid_argument("brs: chain arrays must have K + 1 entries");
  }

  /// Signed membership margin at step k (or the best over j <= k).
  double margin(const Eigen::VectorXd& psi, int k) const {
    if (k < 0 || k > K) throw std::invalid_argument("brs: step out of range");
    auto eval = [&](int j) {
      return w[static_cast<std::size_t>(j)].dot(psi) - c[static_cast<std::size_t>(j)];
    };
    if (!within_horizon) return eval(k);
    double best = eval(0);
    for (int j = 1; j <= k; ++j) best = std::min(best, eval(j));
    return best;
  }

  /// For within-horizon chains, the step count attaining the best margin.
  int best_step(const Eigen::VectorXd& psi, int k) const {
    if (k < 0 || k > K) throw std::invalid_argument("brs: step out of range");
    if (!within_horizon) return k;
    int arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= k; ++j) {
      double m = w[static_cast<std::size_t>(j)].dot(psi) - c[static_cast<std::size_t>(j)];
      if (m < best) {
        best = m;
        arg = j;
      }
    }
    return arg;
  }
};

inline std::string model_digest(const LiftedModel& m) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64_str(model_to_json(m).dump())));
  return std::string(buf);
}

inline double min_over_input(double q, const InputBounds& ib) {
  return std::min(q * ib.a_min, q * ib.a_max);
}

inline BRSChain brs_halfspace(const LiftedModel& m, const HalfspaceTarget& target, int K,
                              const InputBounds& ib, bool within_horizon = false) {
  m.validate();
  if (K < 0) throw std::invalid_argument("brs: horizon must be >= 0");
  if (target.w.size() != m.N) throw std::invalid_argument("brs: target dimension mismatch");
  BRSChain chain;
  chain.K = K;
  chain.dt = m.dt;
  chain.within_horizon = within_horizon;
  chain.source_model = model_digest(m);
  chain.w.reserve(static_cast<std::size_t>(K) + 1);
  chain.c.reserve(static_cast<std::size_t>(K) + 1);
  Eigen::VectorXd wk = target.w;
  double ck = target.c;
  chain.w.push_back(wk);
  chain.c.push_back(ck);
  for (int k = 0; k < K; ++k) {
    ck -= min_over_input(wk.dot(m.B), ib);
    wk = m.A.transpose() * wk;
    chain.w.push_back(wk);
    chain.c.push_back(ck);
  }
  return chain;
}

inline bool in_brs(const BRSChain& chain, const MonomialBasis& basis, const StateVec& x, int k) {
  return chain.margin(basis.lift(x), k) <= 0.0;
}

/// Bang-bang input sequence minimizing the terminal target margin over K
/// steps: u_i = a_min when the sensitivity w_0 . A^{K-1-i} B is positive,
/// a_max when negative, 0 on an exact tie.
inline std::vector<double> optimal_inputs(const LiftedModel& m, const HalfspaceTarget& target,
                                          int K, const InputBounds& ib) {
  m.validate();
  if (K < 0) throw std::invalid_argument("optimal_inputs: horizon must be >= 0");
  if (target.w.size() != m.N) throw std::invalid_argument("optimal_inputs: dimension mismatch");
  std::vector<double> q(static_cast<std::size_t>(K));  // q[j] = w0 . A^j B
  Eigen::VectorXd wk = target.w;
  for (int j = 0; j < K; ++j) {
    q[static_cast<std::size_t>(j)] = wk.dot(m.B);
    wk = m.A.transpose() * wk;
  }
  std::vector<double> u(static_cast<std::size_t>(K), 0.0);
  for (int i = 0; i < K; ++i) {
    double qi = q[static_cast<std::size_t>(K - 1 - i)];
    if (qi > 0.0)
      u[static_cast<std::size_t>(i)] = ib.a_min;
    else if (qi < 0.0)
      u[static_cast<std::size_t>(i)] = ib.a_max;
  }
  return u;
}

struct SynthesisResult {
  std::vector<double> inputs;
  Trajectory predicted;        // surrogate rollout in original coordinates
  double terminal_margin = 0.0;
  int steps = 0;
};

/// Open-loop attack plan: the optimal bang-bang sequence from x0 together
/// with the surrogate's prediction of where it lands.
inline SynthesisResult synthesize_trajectory(const LiftedModel& m, const HalfspaceTarget& target,
                                             const StateVec& x0, int K, const InputBounds& ib) {
  SynthesisResult out;
  out.steps = K;
  out.inputs = optimal_inputs(m, target, K, ib);
  out.predicted = predict(m, x0, out.inputs);
  out.terminal_margin = target.margin(m.basis().lift(out.predicted.states.back()));
  return out;
}

struct BoundaryPoint {
  StateVec x;
  int k = 0;
};

/// Sample the k-step set boundary inside the box by scanning x3 for sign
/// changes of the membership margin on an (x1, x2) lattice.
inline std::vector<BoundaryPoint> brs_boundary_points(const BRSChain& chain,
                                                      const MonomialBasis& basis,
                                                      const StateBounds& sb, int k,
                                                      int res = 41) {
  if (res < 2) throw std::invalid_argument("brs: boundary resolution must be >= 2");
  std::vector<BoundaryPoint> pts;
  auto lin = [](double lo, double hi, int n, int i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  const int fine = 4 * res;
  for (int i = 0; i < res; ++i) {
    double x1 = lin(0.0, sb.v_max, res, i);
    for (int j = 0; j < res; ++j) {
      double x2 = lin(0.0, sb.v_max, res, j);
      double prev_margin = 0.0;
      for (int l = 0; l <= fine; ++l) {
        double x3 = lin(sb.dd_min, sb.dd_max, fine + 1, l);
        double margin = chain.margin(basis.lift(StateVec(x1, x2, x3)), k);
        if (l > 0 && margin * prev_margin <= 0.0 && (margin != 0.0 || prev_margin != 0.0)) {
          double x3_prev = lin(sb.dd_min, sb.dd_max, fine + 1, l - 1);
          double s = prev_margin / (prev_margin - margin);
          pts.push_back({StateVec(x1, x2, x3_prev + s * (x3 - x3_prev)), k});
        }
        prev_margin = margin;
      }
    }
  }
  return pts;
}

inline void write_boundary_csv(const std::vector<BoundaryPoint>& pts, const std::string& path) {
  std::ofstream f = detail::open_out(path);
  f << "x1,x2,x3,k\n";
  for (const BoundaryPoint& p : pts)
    f << fmt_double(p.x(0)) << ',' << fmt_double(p.x(1)) << ',' << fmt_double(p.x(2)) << ','
      << p.k << '\n';
  if (!f) throw IOError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// Chain serialization.

inline ordered_json chain_to_json(const BRSChain& chain) {
  chain.validate();
  ordered_json j;
  j["K"] = chain.K;
  j["dt"] = chain.dt;
  j["within_horizon"] = chain.within_horizon;
  j["source_model"] = chain.source_model;
  ordered_json ws = ordered_json::array();
  ordered_json cs = ordered_json::array();
  for (std::size_t k = 0; k < chain.w.size(); ++k) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index i = 0; i < chain.w[k].size(); ++i) row.push_back(chain.w[k](i));
    ws.push_back(row);
    cs.push_back(chain.c[k]);
  }
  j["w"] = ws;
  j["c"] = cs;
  return j;
}

inline BRSChain chain_from_json(const ordered_json& j) {
  BRSChain chain;
  chain.K = j.at("K").get<int>();
  chain.dt = j.at("dt").get<double>();
  chain.within_horizon = j.at("within_horizon").get<bool>();
  chain.source_model = j.at("source_model").get<std::string>();
  for (const auto& row : j.at("w")) {
    Eigen::VectorXd w(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) w(static_cast<Eigen::Index>(i)) = row[i].get<double>();
    chain.w.push_back(std::move(w));
  }
  for (const auto& v : j.at("c")) chain.c.push_back(v.get<double>());
  chain.validate();
  return chain;
}

inline void save_chain(const BRSChain& chain, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IOError("cannot open for writing: " + path);
  f << chain_to_json(chain).dump(2) << '\n';
  if (!f) throw IOError("write failed: " + path);
}

inline BRSChain load_chain(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open for reading: " + path);
  return chain_from_json(ordered_json::parse(f));
}

}  // namespace liftreach

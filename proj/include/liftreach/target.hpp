#pragma once

#include "liftreach/basis.hpp"
#include "liftreach/core.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace liftreach {

/// Backdoor trigger window: the trigger fires when, extrapolating the
/// current speeds over t_adv seconds and granting the victim an extra
/// a_adv * t_adv^2 of travel, the gap is gone.
struct TriggerSpec {
  double t_adv = 1.0;
  double a_adv = 0.5;

  void validate() const {
    if (!(t_adv > 0.0)) throw std::invalid_argument("trigger: t_adv must be positive");
    if (!(a_adv >= 0.0)) throw std::invalid_argument("trigger: a_adv must be nonnegative");
  }

  double offset() const { return a_adv * t_adv * t_adv; }
};

/// g0(x) = x2 t_adv + x3 - (x1 t_adv + a_adv t_adv^2); the trigger set is
/// {g0 <= 0}.
inline double g0_value(const StateVec& x, const TriggerSpec& spec) {
  return spec.t_adv * (x(1) - x(0)) + x(2) - spec.offset();
}

inline bool in_trigger_set(const StateVec& x, const TriggerSpec& spec) {
  return g0_value(x, spec) <= 0.0;
}

/// Affine half-space in lifted coordinates: {psi : w . psi <= c}.
struct HalfspaceTarget {
  Eigen::VectorXd w;
  double c = 0.0;

  double margin(const Eigen::VectorXd& psi) const {
    if (psi.size() != w.size()) throw std::invalid_argument("target: lifted size mismatch");
    return w.dot(psi) - c;
  }
  bool contains(const Eigen::VectorXd& psi) const { return margin(psi) <= 0.0; }
};

/// Lift {g0 <= 0} exactly: with h(x) = t_adv (x2 - x1) + x3 and
/// c = a_adv t_adv^2, g0 = h - c and, d being odd, g0 <= 0 iff
/// h^d <= c^d. h^d expands over the degree-d monomials, so the lifted set
/// is the half-space {w . psi <= c^d} with multinomial weights w.
inline HalfspaceTarget lifted_target(const TriggerSpec& spec, const MonomialBasis& basis) {
  spec.validate();
  const int d = basis.degree();
  const double h1 = -spec.t_adv;  // weight on x1 inside h
  const double h2 = spec.t_adv;
  const double h3 = 1.0;

  std::vector<double> fact(static_cast<std::size_t>(d) + 1, 1.0);
  for (int k = 1; k <= d; ++k)
    fact[static_cast<std::size_t>(k)] = fact[static_cast<std::size_t>(k) - 1] * k;

  HalfspaceTarget t;
  t.w.resize(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    const auto& e = basis.exponents()[static_cast<std::size_t>(i)];
    double coeff = fact[static_cast<std::size_t>(d)] /
                   (fact[static_cast<std::size_t>(e[0])] * fact[static_cast<std::size_t>(e[1])] *
                    fact[static_cast<std::size_t>(e[2])]);
    t.w(i) = coeff * std::pow(h1, e[0]) * std::pow(h2, e[1]) * std::pow(h3, e[2]);
  }
  t.c = std::pow(spec.offset(), d);
  return t;
}

}  // namespace liftreach

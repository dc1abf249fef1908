#pragma once

#include <cmath>
#include <stdexcept>

namespace liftreach {

/// Intelligent Driver Model parameters (desired speed, time headway,
/// max acceleration, comfortable braking, exponent, jam distance).
struct IDMParams {
  double v0 = 10.0;
  double T = 1.0;
  double a = 1.0;
  double b = 1.5;
  double delta = 4.0;
  double s0 = 2.0;

  void validate() const {
    if (!(v0 > 0.0 && T >= 0.0 && a > 0.0 && b > 0.0 && s0 >= 0.0))
      throw std::invalid_argument("idm: parameters out of range");
  }
};

/// Car-following acceleration for a vehicle at speed v behind a leader at
/// speed v_lead with bumper-to-bumper gap > 0.
inline double idm_accel(double v, double v_lead, double gap, const IDMParams& p) {
  if (!(gap > 0.0)) throw std::invalid_argument("idm: gap must be positive");
  const double s_star = p.s0 + v * p.T + v * (v - v_lead) / (2.0 * std::sqrt(p.a * p.b));
  const double ratio = s_star / gap;
  return p.a * (1.0 - std::pow(v / p.v0, p.delta) - ratio * ratio);
}

/// Speed with zero IDM acceleration at the given gap when following a
/// leader at the same speed; solved by bisection on [0, v0).
inline double idm_equilibrium_speed(double gap, const IDMParams& p) {
  if (!(gap > 0.0)) throw std::invalid_argument("idm: gap must be positive");
  auto f = [&](double v) { return idm_accel(v, v, gap, p); };
  double lo = 0.0, hi = p.v0;
  if (f(lo) <= 0.0) return 0.0;  // jam distance alone forces a stop
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace liftreach

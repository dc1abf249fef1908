#pragma once

#include "liftreach/core.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace liftreach {

inline int basis_size(int degree) {
  if (degree < 1 || degree % 2 == 0)
    throw std::invalid_argument("basis: degree must be odd and >= 1");
  return (degree + 1) * (degree + 2) / 2;
}

/// Monomials x1^a x2^b x3^c of total degree exactly d, ordered by a
/// descending, then b descending. For d = 1 the lift is the identity
/// (x1, x2, x3).
class MonomialBasis {
 public:
  explicit MonomialBasis(int degree) : d_(degree) {
    n_ = basis_size(degree);
    exps_.reserve(static_cast<std::size_t>(n_));
    for (int a = d_; a >= 0; --a)
      for (int b = d_ - a; b >= 0; --b) exps_.push_back({a, b, d_ - a - b});
  }

  int degree() const { return d_; }
  int size() const { return n_; }
  const std::vector<std::array<int, 3>>& exponents() const { return exps_; }

  int index_of(int a, int b, int c) const {
    if (a < 0 || b < 0 || c < 0 || a + b + c != d_)
      throw std::invalid_argument("basis: exponents must be nonnegative and sum to d");
    // a runs d..a+1 before block a; block a has (d - a' + 1) entries.
    int idx = 0;
    for (int aa = d_; aa > a; --aa) idx += d_ - aa + 1;
    return idx + (d_ - a - b);
  }

  Eigen::VectorXd lift(const StateVec& x) const {
    std::vector<double> p1(static_cast<std::size_t>(d_) + 1, 1.0);
    std::vector<double> p2 = p1, p3 = p1;
    for (int k = 1; k <= d_; ++k) {
      p1[static_cast<std::size_t>(k)] = p1[static_cast<std::size_t>(k) - 1] * x(0);
      p2[static_cast<std::size_t>(k)] = p2[static_cast<std::size_t>(k) - 1] * x(1);
      p3[static_cast<std::size_t>(k)] = p3[static_cast<std::size_t>(k) - 1] * x(2);
    }
    Eigen::VectorXd psi(n_);
    for (int i = 0; i < n_; ++i) {
      const auto& e = exps_[static_cast<std::size_t>(i)];
      psi(i) = p1[static_cast<std::size_t>(e[0])] * p2[static_cast<std::size_t>(e[1])] *
               p3[static_cast<std::size_t>(e[2])];
    }
    return psi;
  }

  /// Invert the lift through the pure-power components x_i^d. Valid for the
  /// odd degrees this basis allows; exact on the image of lift.
  StateVec recover(const Eigen::VectorXd& psi) const {
    if (psi.size() != n_) throw std::invalid_argument("basis: lifted vector has wrong size");
    return StateVec(odd_root(psi(index_of(d_, 0, 0))), odd_root(psi(index_of(0, d_, 0))),
                    odd_root(psi(index_of(0, 0, d_))));
  }

  double odd_root(double v) const {
    if (d_ == 1) return v;
    if (d_ == 3) return std::cbrt(v);
    return std::copysign(std::pow(std::abs(v), 1.0 / d_), v);
  }

 private:
  int d_;
  int n_;
  std::vector<std::array<int, 3>> exps_;
};

}  // namespace liftreach

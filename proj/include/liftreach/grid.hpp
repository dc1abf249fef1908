#pragma once

#include "liftreach/core.hpp"
#include "liftreach/model.hpp"
#include "liftreach/target.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace liftreach {

/// Continuous-time linear plant xdot = F x + G u in the three original
/// coordinates; the grid solver works on this form only.
struct LinearSystem3 {
  Eigen::Matrix3d F;
  Eigen::Vector3d G;
};

/// First-order continuous generator of a degree-1 surrogate. Higher degrees
/// have no 3-D generator; use the half-space chain route for those.
inline LinearSystem3 lifted_to_linear(const LiftedModel& m) {
  if (m.N != 3)
    throw std::invalid_argument(
        "grid: only degree-1 surrogates reduce to a 3-D plant; for higher degrees use the "
        "half-space chain (brs_halfspace)");
  LinearSystem3 sys;
  sys.F = (m.A - Eigen::Matrix3d::Identity()) / m.dt;
  sys.G = m.B / m.dt;
  return sys;
}

struct GridAxes {
  std::array<double, 3> lo{0.0, 0.0, 0.0};
  std::array<double, 3> hi{10.0, 10.0, 20.0};
  std::array<int, 3> n{61, 61, 61};

  void validate() const {
    for (int j = 0; j < 3; ++j) {
      if (n[static_cast<std::size_t>(j)] < 2)
        throw std::invalid_argument("grid: need at least 2 nodes per axis");
      if (!(hi[static_cast<std::size_t>(j)] > lo[static_cast<std::size_t>(j)]))
        throw std::invalid_argument("grid: axis upper bound must exceed lower bound");
    }
  }

  double spacing(int j) const {
    return (hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]) /
           (n[static_cast<std::size_t>(j)] - 1);
  }
  double coord(int j, int i) const {
    return lo[static_cast<std::size_t>(j)] + spacing(j) * i;
  }
  std::size_t size() const {
    return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) *
           static_cast<std::size_t>(n[2]);
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n[1]) +
            static_cast<std::size_t>(j)) *
               static_cast<std::size_t>(n[2]) +
           static_cast<std::size_t>(k);
  }
};

struct ValueGrid {
  GridAxes axes;
  double t_abs = 0.0;
  std::vector<double> data;  // row-major, last axis fastest

  double at(int i, int j, int k) const { return data[axes.index(i, j, k)]; }

  /// Trilinear interpolation; x must lie inside the box.
  double value_at(const StateVec& x) const {
    std::array<int, 3> i0;
    std::array<double, 3> f;
    for (int j = 0; j < 3; ++j) {
      double lo = axes.lo[static_cast<std::size_t>(j)];
      double hi = axes.hi[static_cast<std::size_t>(j)];
      if (x(j) < lo - 1e-12 || x(j) > hi + 1e-12)
        throw std::invalid_argument("grid: query outside the grid box");
      double s = (std::clamp(x(j), lo, hi) - lo) / axes.spacing(j);
      int i = std::min(static_cast<int>(s), axes.n[static_cast<std::size_t>(j)] - 2);
      i0[static_cast<std::size_t>(j)] = i;
      f[static_cast<std::size_t>(j)] = s - i;
    }
    double v = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          double wgt = (a ? f[0] : 1.0 - f[0]) * (b ? f[1] : 1.0 - f[1]) * (c ? f[2] : 1.0 - f[2]);
          v += wgt * at(i0[0] + a, i0[1] + b, i0[2] + c);
        }
    return v;
  }
};

/// Lax-Friedrichs solve of dV/ds = H(x, grad V), H(x, p) = p.(Fx) + min_u (p.G) u,
/// from V(x, 0) = w.x - c up to s = t_abs. Central differences with
/// per-axis dissipation bounded by the box speed range; the time step is
/// subdivided to honor the CFL fraction; borders use linear extrapolation
/// ghost values.
inline ValueGrid brs_grid(const LinearSystem3& sys, const Eigen::Vector3d& w, double c,
                          const GridAxes& axes, double t_abs, const InputBounds& ib,
                          double cfl = 0.5) {
  axes.validate();
  if (!(t_abs >= 0.0)) throw std::invalid_argument("grid: t_abs must be >= 0");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("grid: cfl must be in (0, 1]");

  ValueGrid grid;
  grid.axes = axes;
  grid.t_abs = t_abs;
  grid.data.resize(axes.size());

  const int n1 = axes.n[0], n2 = axes.n[1], n3 = axes.n[2];
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k) {
        StateVec x(axes.coord(0, i), axes.coord(1, j), axes.coord(2, k));
        grid.data[axes.index(i, j, k)] = w.dot(x) - c;
      }
  if (t_abs == 0.0) return grid;

  // Interval bound on |f_j| over box x U for the dissipation coefficients.
  std::array<double, 3> alpha{};
  for (int r = 0; r < 3; ++r) {
    double fhi = std::max(sys.G(r) * ib.a_min, sys.G(r) * ib.a_max);
    double flo = std::min(sys.G(r) * ib.a_min, sys.G(r) * ib.a_max);
    for (int cidx = 0; cidx < 3; ++cidx) {
      double a = sys.F(r, cidx) * axes.lo[static_cast<std::size_t>(cidx)];
      double b = sys.F(r, cidx) * axes.hi[static_cast<std::size_t>(cidx)];
      fhi += std::max(a, b);
      flo += std::min(a, b);
    }
    alpha[static_cast<std::size_t>(r)] = std::max(std::abs(fhi), std::abs(flo));
  }
  double rate = alpha[0] / axes.spacing(0) + alpha[1] / axes.spacing(1) + alpha[2] / axes.spacing(2);
  int n_sub = rate > 0.0 ? std::max(1, static_cast<int>(std::ceil(t_abs * rate / cfl))) : 1;
  double ds = t_abs / n_sub;

  std::vector<double> next(axes.size());
  const double dx1 = axes.spacing(0), dx2 = axes.spacing(1), dx3 = axes.spacing(2);

  auto fetch = [&](const std::vector<double>& buf, int i, int j, int k, int axis,
                   int off) -> double {
    int ii = i, jj = j, kk = k;
    (axis == 0 ? ii : axis == 1 ? jj : kk) += off;
    auto ghost = [&](int idx, int n) { return idx < 0 || idx >= n; };
    if (!ghost(ii, n1) && !ghost(jj, n2) && !ghost(kk, n3)) return buf[axes.index(ii, jj, kk)];
    // Linear extrapolation through the border pair along the offending axis.
    int bi = std::clamp(ii, 0, n1 - 1), bj = std::clamp(jj, 0, n2 - 1),
        bk = std::clamp(kk, 0, n3 - 1);
    int si = bi, sj = bj, sk = bk;
    if (axis == 0) si += (ii < 0 ? 1 : -1);
    if (axis == 1) sj += (jj < 0 ? 1 : -1);
    if (axis == 2) sk += (kk < 0 ? 1 : -1);
    return 2.0 * buf[axes.index(bi, bj, bk)] - buf[axes.index(si, sj, sk)];
  };

  for (int s = 0; s < n_sub; ++s) {
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n3; ++k) {
          std::size_t idx = axes.index(i, j, k);
          double v = grid.data[idx];
          double vp1 = fetch(grid.data, i, j, k, 0, +1), vm1 = fetch(grid.data, i, j, k, 0, -1);
          double vp2 = fetch(grid.data, i, j, k, 1, +1), vm2 = fetch(grid.data, i, j, k, 1, -1);
          double vp3 = fetch(grid.data, i, j, k, 2, +1), vm3 = fetch(grid.data, i, j, k, 2, -1);
          Eigen::Vector3d p((vp1 - vm1) / (2.0 * dx1), (vp2 - vm2) / (2.0 * dx2),
                            (vp3 - vm3) / (2.0 * dx3));
          StateVec x(axes.coord(0, i), axes.coord(1, j), axes.coord(2, k));
          double pg = p.dot(sys.G);
          double ham = p.dot(sys.F * x) + std::min(pg * ib.a_min, pg * ib.a_max);
          double diss = alpha[0] * (vp1 - 2.0 * v + vm1) / (2.0 * dx1) +
                        alpha[1] * (vp2 - 2.0 * v + vm2) / (2.0 * dx2) +
                        alpha[2] * (vp3 - 2.0 * v + vm3) / (2.0 * dx3);
          next[idx] = v + ds * (ham + diss);
        }
    grid.data.swap(next);
  }
  return grid;
}

inline bool in_brs_grid(const ValueGrid& grid, const StateVec& x) {
  return grid.value_at(x) <= 0.0;
}

inline ordered_json grid_to_json(const ValueGrid& grid) {
  ordered_json j;
  j["axes"] = {{"lo", grid.axes.lo}, {"hi", grid.axes.hi}, {"n", grid.axes.n}};
  j["t_abs"] = grid.t_abs;
  ordered_json data = ordered_json::array();
  for (double v : grid.data) data.push_back(v);
  j["data"] = data;
  return j;
}

inline ValueGrid grid_from_json(const ordered_json& j) {
  ValueGrid grid;
  for (int r = 0; r < 3; ++r) {
    grid.axes.lo[static_cast<std::size_t>(r)] = j.at("axes").at("lo")[static_cast<std::size_t>(r)].get<double>();
    grid.axes.hi[static_cast<std::size_t>(r)] = j.at("axes").at("hi")[static_cast<std::size_t>(r)].get<double>();
    grid.axes.n[static_cast<std::size_t>(r)] = j.at("axes").at("n")[static_cast<std::size_t>(r)].get<int>();
  }
  grid.axes.validate();
  grid.t_abs = j.at("t_abs").get<double>();
  for (const auto& v : j.at("data")) grid.data.push_back(v.get<double>());
  if (grid.data.size() != grid.axes.size())
    throw std::invalid_argument("grid: data length does not match axes");
  return grid;
}

inline void save_grid(const ValueGrid& grid, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IOError("cannot open for writing: " + path);
  f << grid_to_json(grid).dump() << '\n';
  if (!f) throw IOError("write failed: " + path);
}

inline ValueGrid load_grid(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IOError("cannot open for reading: " + path);
  return grid_from_json(ordered_json::parse(f));
}

}  // namespace liftreach

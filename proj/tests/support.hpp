#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "wpsec/conic/solver.hpp"
#include "wpsec/rng.hpp"

namespace wpsec::testing {

/// A conic program with a planted primal-dual pair (x*, y*, z*) that is
/// strictly complementary, so the optimum is c'x* = b'y*.
struct Planted {
  conic::ConicProblem problem;
  Eigen::VectorXd x, y, z;
  double optimum = 0.0;
};

inline double uniform(Philox4x32& r, double lo, double hi) { return lo + (hi - lo) * r.uniform(); }

inline Eigen::VectorXd random_unit(Philox4x32& r, int n) {
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u[i] = r.normal();
  return u / u.norm();
}

inline Planted finish(Philox4x32& r, std::vector<conic::ConeSpec> cones, Eigen::VectorXd x, Eigen::VectorXd z,
                      int m) {
  const int n = static_cast<int>(x.size());
  Planted p;
  p.problem.cones = std::move(cones);
  p.problem.A.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) p.problem.A(i, j) = r.normal();
  p.y.resize(m);
  for (int i = 0; i < m; ++i) p.y[i] = r.normal();
  p.problem.b = p.problem.A * x;
  p.problem.c = p.problem.A.transpose() * p.y + z;
  p.x = std::move(x);
  p.z = std::move(z);
  p.optimum = p.problem.b.dot(p.y);
  return p;
}

/// Nonnegative and second-order blocks. Each SOC block has x on the
/// boundary ray (s, s u) and z on the opposite ray (t, -t u); nonnegative
/// entries split between x > 0 and z > 0.
inline Planted planted_socp(std::uint64_t seed) {
  Philox4x32 r(seed, 0x50c9);
  std::vector<conic::ConeSpec> cones;
  std::vector<double> xs, zs;
  const int n_lp = 2 + static_cast<int>(r.uniform() * 4);
  cones.push_back(conic::ConeSpec::nonnegative(n_lp));
  for (int i = 0; i < n_lp; ++i) {
    const bool basic = i % 2 == 0;
    xs.push_back(basic ? uniform(r, 0.5, 2.0) : 0.0);
    zs.push_back(basic ? 0.0 : uniform(r, 0.5, 2.0));
  }
  const int n_soc = 1 + static_cast<int>(r.uniform() * 3);
  for (int b = 0; b < n_soc; ++b) {
    const int d = 3 + static_cast<int>(r.uniform() * 4);
    cones.push_back(conic::ConeSpec::second_order(d));
    const Eigen::VectorXd u = random_unit(r, d - 1);
    const double s = uniform(r, 0.5, 2.0);
    const double t = uniform(r, 0.5, 2.0);
    xs.push_back(s);
    zs.push_back(t);
    for (int i = 0; i < d - 1; ++i) {
      xs.push_back(s * u[i]);
      zs.push_back(-t * u[i]);
    }
  }
  const Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<int>(xs.size()));
  const Eigen::VectorXd z = Eigen::Map<Eigen::VectorXd>(zs.data(), static_cast<int>(zs.size()));
  const int m = std::max(1, static_cast<int>(x.size()) / 2);
  return finish(r, std::move(cones), x, z, m);
}

/// One psd block of side n (plus a small nonnegative block): X and Z share
/// eigenvectors with complementary supports.
inline Planted planted_sdp(std::uint64_t seed, int n) {
  Philox4x32 r(seed, 0x5d0);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = r.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  const Eigen::MatrixXd U = qr.householderQ();
  const int k = 1 + static_cast<int>(r.uniform() * (n - 1));
  Eigen::VectorXd lx = Eigen::VectorXd::Zero(n), lz = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) (i < k ? lx[i] : lz[i]) = uniform(r, 0.5, 2.0);
  const Eigen::MatrixXd X = U * lx.asDiagonal() * U.transpose();
  const Eigen::MatrixXd Z = U * lz.asDiagonal() * U.transpose();
  const Eigen::VectorXd sx = conic::svec(X), sz = conic::svec(Z);
  Eigen::VectorXd x(sx.size() + 2), z(sz.size() + 2);
  x << sx, 1.0, 0.0;
  z << sz, 0.0, 1.0;
  const int m = std::max(1, static_cast<int>(sx.size()) / 2);
  return finish(r, {conic::ConeSpec::psd(n), conic::ConeSpec::nonnegative(2)}, x, z, m);
}

}  // namespace wpsec::testing

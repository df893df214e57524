#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace wpsec {

struct GoldenResult {
  double x = 0.0;
  double fx = std::numeric_limits<double>::infinity();
  int evaluations = 0;
};

/// Golden-section minimisation of a unimodal f on [lo, hi] until the bracket
/// is narrower than tol. +inf values are allowed and are treated as lying to
/// the right of the feasible region (the bracket moves left when both probes
/// are infinite). Returns the best evaluated point.
inline GoldenResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                            double hi, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("golden_section_minimize: need lo < hi");
  if (!(tol > 0.0)) throw std::invalid_argument("golden_section_minimize: tol must be > 0");
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  GoldenResult best;
  best.x = std::numeric_limits<double>::quiet_NaN();
  auto eval = [&](double x) {
    const double v = f(x);
    ++best.evaluations;
    if (v < best.fx || std::isnan(best.x)) {
      best.x = x;
      best.fx = v;
    }
    return v;
  };
  double a = lo;
  double b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > tol) {
    const bool both_inf = std::isinf(fc) && std::isinf(fd);
    if (fc <= fd || both_inf) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  return best;
}

/// Maximises f by scanning n_grid evenly spaced points on [lo, hi] and
/// refining the best grid cell with golden-section search to width tol.
inline GoldenResult grid_then_golden_maximize(const std::function<double(double)>& f, double lo,
                                              double hi, int n_grid, double tol) {
  if (n_grid < 3) throw std::invalid_argument("grid_then_golden_maximize: need >= 3 grid points");
  const double h = (hi - lo) / (n_grid - 1);
  int best_i = 0;
  double best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_grid; ++i) {
    const double v = f(lo + i * h);
    if (v > best_v) {
      best_v = v;
      best_i = i;
    }
  }
  const double a = lo + std::max(0, best_i - 1) * h;
  const double b = lo + std::min(n_grid - 1, best_i + 1) * h;
  GoldenResult g = golden_section_minimize([&](double x) { return -f(x); }, a, b, tol);
  GoldenResult out{g.x, -g.fx, g.evaluations + n_grid};
  if (best_v > out.fx) {
    out.x = lo + best_i * h;
    out.fx = best_v;
  }
  return out;
}

}  // namespace wpsec

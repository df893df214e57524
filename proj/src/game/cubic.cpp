#include <algorithm>
#include <cmath>
#include <numbers>

#include "wpsec/game.hpp"

namespace wpsec {

namespace {

double poly(double a, double b, double c, double x) { return ((x + a) * x + b) * x + c; }

double polish(double a, double b, double c, double x) {
  for (int i = 0; i < 4; ++i) {
    const double f = poly(a, b, c, x);
    const double d = (3.0 * x + 2.0 * a) * x + b;
    if (d == 0.0) break;
    const double xn = x - f / d;
    if (!(std::abs(poly(a, b, c, xn)) < std::abs(f))) break;
    x = xn;
  }
  return x;
}

}  // namespace

CubicSolve solve_cubic_cardano(double a, double b, double c) {
  CubicSolve s;
  s.a = a;
  s.b = b;
  s.c = c;
  s.p = b - a * a / 3.0;
  s.q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  s.Delta = s.p * s.p * s.p / 27.0 + s.q * s.q / 4.0;
  const double shift = -a / 3.0;
  const double h = -s.q / 2.0;
  std::vector<double> roots;

  if (s.Delta >= 0.0) {
    const double sd = std::sqrt(s.Delta);
    s.x1 = {h + sd, 0.0};
    s.x2 = {h - sd, 0.0};
    // The larger-magnitude radicand avoids cancellation; the other cube
    // root follows from u v = -p/3.
    const double big = h >= 0.0 ? h + sd : h - sd;
    const double u = std::cbrt(big);
    const double v = u != 0.0 ? -s.p / (3.0 * u) : std::cbrt(h >= 0.0 ? h - sd : h + sd);
    roots.push_back(u + v + shift);
    if (s.Delta == 0.0 && s.p != 0.0) {
      roots.push_back(-1.5 * s.q / s.p + shift);  // double root
    }
  } else {
    const double sd = std::sqrt(-s.Delta);
    s.x1 = {h, sd};
    s.x2 = {h, -sd};
    // Three real roots: cube roots of x1, x2 are conjugate, so their sum is
    // 2 |x1|^(1/3) cos((arg x1 + 2 pi k) / 3).
    const double r = 2.0 * std::cbrt(std::abs(s.x1));
    const double phi = std::arg(s.x1);
    for (int k = 0; k < 3; ++k) {
      roots.push_back(r * std::cos((phi + 2.0 * std::numbers::pi * k) / 3.0) + shift);
    }
  }
  for (double& x : roots) x = polish(a, b, c, x);
  std::sort(roots.begin(), roots.end());
  // A double root perturbed by rounding splits by about sqrt(eps).
  const auto close = [](double x, double y) { return std::abs(x - y) <= 1e-7 * std::max(1.0, std::abs(y)); };
  std::vector<double> merged;
  for (double x : roots) {
    if (!merged.empty() && close(x, merged.back())) {
      if (std::abs(poly(a, b, c, x)) < std::abs(poly(a, b, c, merged.back()))) merged.back() = x;
    } else {
      merged.push_back(x);
    }
  }
  roots = merged;
  s.roots = roots;
  if (!roots.empty()) s.x_opt = roots.back();
  return s;
}

}  // namespace wpsec

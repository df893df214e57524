#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "wpsec/game.hpp"

namespace wpsec {

namespace {

// [log2(1 + y t_s) - log2(1 + y t_e)]^+ for y >= 0.
double secrecy_bracket(double y, double t_s, double t_e) {
  if (!(y > 0.0) || !(t_s > t_e)) return 0.0;
  return std::max(0.0, (std::log1p(y * t_s) - std::log1p(y * t_e)) / std::numbers::ln2);
}

// 2 theta x (1 + (x - D) t_s)(1 + (x - D) t_e) - mu' C (t_s - t_e): the
// stationarity condition of the smooth branch multiplied out, mu' =
// mu (1 - theta) / ln 2. Increasing in x on x > D.
double branch_equation(double x, const GameLinkGains& g, const AggregateConstants& k, double mu,
                       double theta) {
  const double mu_p = mu * (1.0 - theta) / std::numbers::ln2;
  const double y = x - k.D_M;
  return 2.0 * theta * x * (1.0 + y * g.t_s) * (1.0 + y * g.t_e) - mu_p * k.C_M * (g.t_s - g.t_e);
}

// Safeguarded Newton on branch_equation over [lo, hi] with a sign change.
double refine_branch_root(double x, double lo, double hi, const GameLinkGains& g,
                          const AggregateConstants& k, double mu, double theta) {
  x = std::clamp(x, lo, hi);
  for (int i = 0; i < 200; ++i) {
    const double f = branch_equation(x, g, k, mu, theta);
    if (f == 0.0) return x;
    if (f < 0.0) lo = x; else hi = x;
    const double y = x - k.D_M;
    const double df = 2.0 * theta *
                      ((1.0 + y * g.t_s) * (1.0 + y * g.t_e) +
                       x * (g.t_s * (1.0 + y * g.t_e) + g.t_e * (1.0 + y * g.t_s)));
    double xn = df > 0.0 ? x - f / df : 0.5 * (lo + hi);
    if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
    if (std::abs(xn - x) <= 1e-15 * std::max(1.0, std::abs(x))) return xn;
    x = xn;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(hi))) break;
  }
  return x;
}

struct BranchRoot {
  double x = 0.0;
  CubicSolve cubic;
  bool used_cardano = false;
};

// The unique stationary point with y = x - D > 0, if the smooth branch has
// one.
std::optional<BranchRoot> smooth_branch_root(const GameLinkGains& g, const AggregateConstants& k,
                                             double mu, double theta) {
  if (!(g.t_s > g.t_e) || !(k.C_M > 0.0)) return std::nullopt;
  const double D = k.D_M;
  if (!(branch_equation(D, g, k, mu, theta) < 0.0)) return std::nullopt;
  double hi = std::max(1.0, 2.0 * D);
  while (branch_equation(hi, g, k, mu, theta) <= 0.0) hi *= 2.0;

  BranchRoot out;
  double guess = std::numeric_limits<double>::quiet_NaN();
  if (g.t_e > 1e-6 * g.t_s) {
    const CubicCoefficients cc = cubic_coefficients(g, k, mu, theta);
    out.cubic = solve_cubic_cardano(cc.a, cc.b, cc.c);
    out.used_cardano = true;
    for (double r : out.cubic.roots) {
      if (r > D && r < hi) guess = r;
    }
  } else {
    // t_e negligible: the leading coefficient vanishes and the condition is
    // the quadratic t_s x^2 + (1 - D t_s) x - mu' C t_s / (2 theta) = 0
    // (t_e is kept in the lower-order terms).
    const double mu_p = mu * (1.0 - theta) / std::numbers::ln2;
    const double qa = g.t_s + g.t_e - 2.0 * D * g.t_s * g.t_e;
    const double qb = (1.0 - D * g.t_s) * (1.0 - D * g.t_e);
    const double qc = -mu_p * k.C_M * (g.t_s - g.t_e) / (2.0 * theta);
    const double disc = qb * qb - 4.0 * qa * qc;
    if (qa > 0.0 && disc >= 0.0) {
      const double sq = std::sqrt(disc);
      // Stable form of the positive root.
      guess = qb >= 0.0 ? (2.0 * qc) / (-qb - sq) : (-qb + sq) / (2.0 * qa);
    }
    out.cubic.a = qa;
    out.cubic.b = qb;
    out.cubic.c = qc;
  }
  if (std::isnan(guess)) guess = 0.5 * (D + hi);
  out.x = refine_branch_root(guess, D, hi, g, k, mu, theta);
  out.cubic.x_opt = out.x;
  return out;
}

}  // namespace

const char* to_string(PriceSolution::Regime r) {
  switch (r) {
    case PriceSolution::Regime::interior: return "interior";
    case PriceSolution::Regime::no_trade_vertex: return "no_trade_vertex";
    case PriceSolution::Regime::boundary: return "boundary";
  }
  return "unknown";
}

double leader_utility(double theta, double lambda, const GameLinkGains& gains,
                      const AggregateConstants& consts, double mu) {
  const double y = lambda * consts.C_M - 2.0 * consts.D_M;
  return mu * (1.0 - theta) * secrecy_bracket(y, gains.t_s, gains.t_e) - theta * lambda * y;
}

double leader_utility_actual(const GameParams& game, double theta, double lambda,
                             const GameLinkGains& gains) {
  const Eigen::VectorXd p = follower_powers(game, lambda);
  double y = 0.0;
  for (int m = 0; m < p.size(); ++m) y += p(m) * game.channels.g[static_cast<std::size_t>(m)].squaredNorm();
  return game.mu * (1.0 - theta) * secrecy_bracket(y, gains.t_s, gains.t_e) - theta * lambda * y;
}

double leader_stationarity_residual(double theta, double lambda, const GameLinkGains& g,
                                    const AggregateConstants& k, double mu) {
  const double y = lambda * k.C_M - 2.0 * k.D_M;
  double r = -2.0 * theta * k.C_M * lambda + 2.0 * theta * k.D_M;
  if (y > 0.0 && g.t_s > g.t_e) {
    r += mu * (1.0 - theta) / std::numbers::ln2 * k.C_M *
         (g.t_s / (1.0 + y * g.t_s) - g.t_e / (1.0 + y * g.t_e));
  }
  return r;
}

CubicCoefficients cubic_coefficients(const GameLinkGains& g, const AggregateConstants& k,
                                     double mu, double theta) {
  if (!(g.t_s > 0.0) || !(g.t_e > 0.0)) {
    throw std::domain_error("cubic_coefficients: t_s and t_e must be > 0");
  }
  const double ts = g.t_s;
  const double te = g.t_e;
  const double D = k.D_M;
  CubicCoefficients cc;
  cc.a = ((ts + te) - 2.0 * D * ts * te) / (ts * te);
  cc.b = (D * ts - 1.0) * (D * te - 1.0) / (ts * te);
  cc.c = -mu * (1.0 - theta) * k.C_M * (ts - te) / (2.0 * theta * ts * te * std::numbers::ln2);
  return cc;
}

PriceSolution optimal_price(const GameLinkGains& gains, const AggregateConstants& consts, double mu,
                            double theta) {
  PriceSolution best;
  best.lambda = 0.0;
  best.x = -consts.D_M;
  best.utility = leader_utility(theta, 0.0, gains, consts, mu);
  best.regime = PriceSolution::Regime::boundary;
  if (!(consts.C_M > 0.0)) {
    best.diagnostic = "no beacon can deliver energy";
    return best;
  }
  // Vertex of the branch without secrecy revenue: x = 0.
  const double lam_v = consts.D_M / consts.C_M;
  const double u_v = leader_utility(theta, lam_v, gains, consts, mu);
  if (u_v > best.utility) {
    best.lambda = lam_v;
    best.x = 0.0;
    best.utility = u_v;
    best.regime = PriceSolution::Regime::no_trade_vertex;
  }
  if (const auto root = smooth_branch_root(gains, consts, mu, theta)) {
    const double lam = (root->x + consts.D_M) / consts.C_M;
    const double u = leader_utility(theta, lam, gains, consts, mu);
    best.cubic = root->cubic;
    if (lam >= 0.0 && u >= best.utility) {
      best.lambda = lam;
      best.x = root->x;
      best.utility = u;
      best.regime = PriceSolution::Regime::interior;
    }
  } else if (!(gains.t_s > gains.t_e)) {
    best.diagnostic = "no secrecy advantage (t_s <= t_e)";
  } else {
    best.diagnostic = "secrecy revenue cannot cover the marginal price";
  }
  return best;
}

}  // namespace wpsec

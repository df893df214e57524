#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wpsec/game.hpp"
#include "wpsec/inner_problem.hpp"

namespace wpsec {

// ------------------------------------------------------------ directions

struct ScaDirectionPolicy::State {
  ChannelSet channels;
  double R_bar = 0.0;
  InnerOptions options;
  std::optional<Eigen::VectorXcd> zf;
  std::map<double, Eigen::VectorXcd> cache;
  std::mutex mutex;
};

ScaDirectionPolicy::ScaDirectionPolicy(const ChannelSet& channels, double R_bar,
                                       InnerOptions options)
    : state_(std::make_shared<State>()) {
  channels.validate();
  state_->channels = channels;
  state_->R_bar = R_bar;
  state_->options = options;
  state_->zf = zero_forcing_direction(channels.h_s, channels.h_e);
}

std::size_t ScaDirectionPolicy::cache_size() const {
  std::lock_guard<std::mutex> lock(state_->mutex);
  return state_->cache.size();
}

Eigen::VectorXcd ScaDirectionPolicy::operator()(double theta) {
  State& s = *state_;
  std::lock_guard<std::mutex> lock(s.mutex);
  if (auto it = s.cache.find(theta); it != s.cache.end()) return it->second;

  std::optional<Eigen::VectorXcd> warm;
  if (!s.cache.empty()) {
    auto hi = s.cache.lower_bound(theta);
    auto pick = hi;
    if (hi == s.cache.end() || (hi != s.cache.begin() && theta - std::prev(hi)->first < hi->first - theta)) {
      pick = std::prev(hi);
    }
    warm = pick->second;
  }
  Eigen::VectorXcd v;
  const double rate_factor = std::exp2(s.R_bar / (1.0 - theta));
  bool done = false;
  if (rate_factor <= 1e8) {
    const auto r = solve_inner_sca(s.channels, theta, s.R_bar, warm, s.options).first;
    if (r.ok()) {
      v = r.v;
      done = true;
    }
  }
  if (!done) {
    if (s.zf) {
      v = *s.zf;
    } else if (warm) {
      v = *warm;
    } else {
      v = s.channels.h_s.front().normalized();
    }
  }
  // Fix the global phase so cached directions compare equal across runs.
  const Eigen::Index i = [&] {
    Eigen::Index k = 0;
    v.cwiseAbs().maxCoeff(&k);
    return k;
  }();
  if (std::abs(v(i)) > 0.0) v *= std::conj(v(i)) / std::abs(v(i));
  s.cache.emplace(theta, v);
  return v;
}

DirectionPolicy fixed_direction(Eigen::VectorXcd v) {
  return [v = std::move(v)](double) { return v; };
}

// ------------------------------------------------------ price at fixed theta

namespace {

std::vector<int> active_indices(const std::vector<bool>& mask) {
  std::vector<int> out;
  for (std::size_t m = 0; m < mask.size(); ++m) {
    if (mask[m]) out.push_back(static_cast<int>(m));
  }
  return out;
}

// Maximiser of the true utility on [lo, hi] where the active set is fixed:
// the smooth-branch root clipped to the interval (concave there).
double interval_price(const GameLinkGains& gains, const AggregateConstants& k, double mu,
                      double theta, double lo, double hi) {
  const PriceSolution ps = optimal_price(gains, k, mu, theta);
  if (ps.regime != PriceSolution::Regime::interior) return lo;
  return std::clamp(ps.lambda, lo, hi);
}

}  // namespace

Equilibrium price_equilibrium(const GameParams& game, double theta, const Eigen::VectorXcd& v) {
  const ChannelSet& ch = game.channels;
  const int M = ch.M();
  Equilibrium eq;
  eq.theta_opt = theta;
  eq.gains = link_gains(ch, v, theta);
  std::ostringstream diag;

  std::vector<double> tau(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    const double g2 = ch.g[static_cast<std::size_t>(m)].squaredNorm();
    tau[static_cast<std::size_t>(m)] = g2 > 0.0 ? game.B(m) / g2 : std::numeric_limits<double>::infinity();
  }

  // Active-set fixed point starting from every beacon.
  std::vector<bool> active(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) active[static_cast<std::size_t>(m)] = std::isfinite(tau[static_cast<std::size_t>(m)]);
  double lam_fp = 0.0;
  eq.active_set_converged = false;
  for (int it = 1; it <= M + 1; ++it) {
    eq.active_set_iterations = it;
    const AggregateConstants k = aggregate_constants(ch, game.A, game.B, active);
    if (!(k.C_M > 0.0)) {
      lam_fp = 0.0;
      eq.active_set_converged = true;
      break;
    }
    const PriceSolution ps = optimal_price(eq.gains, k, game.mu, theta);
    lam_fp = ps.regime == PriceSolution::Regime::interior ? ps.lambda : 0.0;
    std::vector<bool> next(static_cast<std::size_t>(M));
    for (int m = 0; m < M; ++m) next[static_cast<std::size_t>(m)] = lam_fp > tau[static_cast<std::size_t>(m)];
    if (next == active) {
      eq.active_set_converged = true;
      break;
    }
    active = next;
  }
  if (!eq.active_set_converged) diag << "active-set iteration did not settle after " << M + 1 << " rounds; ";
  const double u_fp = leader_utility_actual(game, theta, lam_fp, eq.gains);

  // Certificate: enumerate the intervals between sorted thresholds.
  std::vector<int> order(static_cast<std::size_t>(M));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return tau[static_cast<std::size_t>(i)] < tau[static_cast<std::size_t>(j)] ||
           (tau[static_cast<std::size_t>(i)] == tau[static_cast<std::size_t>(j)] && i < j);
  });
  double lam_best = 0.0;
  double u_best = leader_utility_actual(game, theta, 0.0, eq.gains);
  std::vector<bool> mask(static_cast<std::size_t>(M), false);
  for (int j = 0; j < M; ++j) {
    const int m = order[static_cast<std::size_t>(j)];
    const double lo = tau[static_cast<std::size_t>(m)];
    if (!std::isfinite(lo)) break;
    mask[static_cast<std::size_t>(m)] = true;
    const double hi = j + 1 < M ? tau[static_cast<std::size_t>(order[static_cast<std::size_t>(j + 1)])]
                                : std::numeric_limits<double>::infinity();
    if (!(hi > lo)) continue;
    const AggregateConstants k = aggregate_constants(ch, game.A, game.B, mask);
    const double lam = interval_price(eq.gains, k, game.mu, theta, lo, hi);
    const double u = leader_utility_actual(game, theta, lam, eq.gains);
    if (u > u_best) {
      u_best = u;
      lam_best = lam;
    }
  }

  const double slack = 1e-12 * (1.0 + std::abs(u_best));
  if (eq.active_set_converged && u_fp >= u_best - slack) {
    eq.lambda_opt = lam_fp;
    eq.U_M = u_fp;
  } else {
    if (eq.active_set_converged) diag << "interval enumeration improved on the active-set fixed point; ";
    eq.lambda_opt = lam_best;
    eq.U_M = u_best;
  }
  if (eq.lambda_opt == 0.0) diag << "no profitable price; ";

  eq.p_opt = follower_powers(game, eq.lambda_opt);
  eq.U_PB.resize(M);
  std::vector<bool> final_mask(static_cast<std::size_t>(M));
  double y = 0.0;
  for (int m = 0; m < M; ++m) {
    const double g2 = ch.g[static_cast<std::size_t>(m)].squaredNorm();
    eq.U_PB(m) = pb_utility(theta, eq.lambda_opt, eq.p_opt(m), g2, game.A(m), game.B(m));
    final_mask[static_cast<std::size_t>(m)] = eq.p_opt(m) > 0.0;
    y += eq.p_opt(m) * g2;
  }
  eq.active_set = active_indices(final_mask);
  eq.consts = aggregate_constants(ch, game.A, game.B, final_mask);
  eq.secrecy_rate =
      y > 0.0 && eq.gains.t_s > eq.gains.t_e
          ? (1.0 - theta) * std::max(0.0, std::log2(1.0 + y * eq.gains.t_s) - std::log2(1.0 + y * eq.gains.t_e))
          : 0.0;
  eq.diagnostics = diag.str();
  return eq;
}

// ------------------------------------------------------------- theta level

GoldenResult maximize_over_theta(const std::function<double(double)>& f,
                                 const ThetaSearchOptions& o) {
  if (o.grid_points < 3) throw std::invalid_argument("maximize_over_theta: need >= 3 grid points");
  const int n = o.grid_points;
  const double h = (o.hi - o.lo) / (n - 1);
  std::vector<double> vals(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) if (o.parallel)
  for (int i = 0; i < n; ++i) vals[static_cast<std::size_t>(i)] = f(o.lo + i * h);
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (vals[static_cast<std::size_t>(i)] > vals[static_cast<std::size_t>(best)]) best = i;
  }
  const double a = o.lo + std::max(0, best - 1) * h;
  const double b = o.lo + std::min(n - 1, best + 1) * h;
  GoldenResult g = golden_section_minimize([&](double x) { return -f(x); }, a, b, o.tol);
  GoldenResult out{g.x, -g.fx, g.evaluations + n};
  if (vals[static_cast<std::size_t>(best)] >= out.fx) {
    out.x = o.lo + best * h;
    out.fx = vals[static_cast<std::size_t>(best)];
  }
  return out;
}

Equilibrium optimal_theta(const GameParams& game, const DirectionPolicy& policy,
                          const ThetaSearchOptions& o) {
  game.validate();
  // Directions on the grid are fixed first, in grid order, so a stateful
  // policy sees the same call sequence whether or not the grid is parallel.
  const int n = o.grid_points;
  const double h = (o.hi - o.lo) / (n - 1);
  std::map<double, Eigen::VectorXcd> dirs;
  for (int i = 0; i < n; ++i) dirs.emplace(o.lo + i * h, policy(o.lo + i * h));
  std::mutex mutex;
  auto direction = [&](double theta) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      if (auto it = dirs.find(theta); it != dirs.end()) return it->second;
    }
    return policy(theta);
  };
  const GoldenResult g = maximize_over_theta(
      [&](double theta) { return price_equilibrium(game, theta, direction(theta)).U_M; }, o);
  Equilibrium eq = price_equilibrium(game, g.x, direction(g.x));
  if (!(eq.U_M > 0.0)) eq.diagnostics += "leader utility is not positive anywhere on the search; ";
  return eq;
}

Equilibrium solve_equilibrium(const GameParams& game, const ThetaSearchOptions& options,
                              const InnerOptions& inner) {
  game.validate();
  ScaDirectionPolicy policy(game.channels, game.R_bar, inner);
  return optimal_theta(game, std::ref(policy), options);
}

DeviationReport check_deviations(const GameParams& game, const Equilibrium& eq,
                                 const DirectionPolicy& policy, int n_theta, int n_lambda,
                                 int n_p) {
  DeviationReport rep;
  rep.leader_gain = -std::numeric_limits<double>::infinity();
  const ChannelSet& ch = game.channels;
  double lam_hi = eq.lambda_opt;
  for (int m = 0; m < ch.M(); ++m) {
    const double g2 = ch.g[static_cast<std::size_t>(m)].squaredNorm();
    if (g2 > 0.0) lam_hi = std::max(lam_hi, game.B(m) / g2);
  }
  lam_hi = 2.0 * std::max(lam_hi, 1e-12);
  const double lo = 1e-3;
  const double hi = 1.0 - 1e-3;
  for (int i = 0; i < n_theta; ++i) {
    const double theta = lo + i * (hi - lo) / (n_theta - 1);
    const GameLinkGains gains = link_gains(ch, policy(theta), theta);
    for (int j = 0; j < n_lambda; ++j) {
      const double lam = j * lam_hi / (n_lambda - 1);
      rep.leader_gain = std::max(rep.leader_gain, leader_utility_actual(game, theta, lam, gains) - eq.U_M);
    }
  }
  rep.follower_gain = -std::numeric_limits<double>::infinity();
  for (int m = 0; m < ch.M(); ++m) {
    const double g2 = ch.g[static_cast<std::size_t>(m)].squaredNorm();
    const double p_hi = 10.0 * std::max(eq.p_opt(m), 1.0);
    for (int i = 0; i < n_p; ++i) {
      const double p = i * p_hi / (n_p - 1);
      const double u = pb_utility(eq.theta_opt, eq.lambda_opt, p, g2, game.A(m), game.B(m));
      rep.follower_gain = std::max(rep.follower_gain, u - eq.U_PB(m));
    }
  }
  return rep;
}

}  // namespace wpsec

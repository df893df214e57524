#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "wpsec/channels.hpp"
#include "wpsec/game.hpp"
#include "wpsec/inner_problem.hpp"
#include "wpsec/rng.hpp"

using namespace wpsec;

namespace {

GameParams make_game(std::uint64_t seed, int M = 5, double mu = 1.0) {
  SystemParams p;
  p.M = M;
  GameParams g;
  g.channels = sample_channels(p, PathLossModel{}, seed);
  g.mu = mu;
  g.A = Eigen::VectorXd::Constant(M, 0.05);
  g.B = Eigen::VectorXd::Constant(M, 0.05);
  g.R_bar = 2.0;
  return g;
}

Eigen::VectorXcd zf(const GameParams& g) {
  return *zero_forcing_direction(g.channels.h_s, g.channels.h_e);
}

// Reference utility evaluated from its definition with explicit powers.
double leader_reference(const GameParams& g, double theta, double lambda, const GameLinkGains& gains) {
  double y = 0.0;
  for (int m = 0; m < g.channels.M(); ++m) {
    const double gn = g.channels.g[m].squaredNorm();
    const double p = std::max(0.0, (lambda * gn - g.B[m]) / (2.0 * g.A[m]));
    y += p * gn;
  }
  const double bracket = std::log2(1.0 + y * gains.t_s) - std::log2(1.0 + y * gains.t_e);
  return g.mu * (1.0 - theta) * std::max(0.0, bracket) - theta * lambda * y;
}

}  // namespace

TEST_CASE("follower best response examples") {
  CHECK(follower_best_response(2.0, 1.0, 0.5, 1.0) == doctest::Approx(1.0));
  CHECK(follower_best_response(0.5, 1.0, 0.5, 1.0) == 0.0);
  CHECK(follower_best_response(1.0, 1.0, 0.5, 1.0) == 0.0);
  const Eigen::Vector2cd g(1.0, std::complex<double>(0.0, 1.0));
  CHECK(follower_best_response(3.0, g, 1.0, 2.0) == doctest::Approx(2.0));
  CHECK(pb_utility(0.3, 2.0, 0.0, 1.0, 0.5, 1.0) == 0.0);
  CHECK(pb_utility(0.5, 2.0, 1.0, 1.0, 0.5, 1.0) == doctest::Approx(0.5 * (2.0 - 0.5 - 1.0)));
  CHECK(pb_utility(0.5, 3.0, 1.0, g, 1.0, 2.0) == doctest::Approx(0.5 * (6.0 - 1.0 - 2.0)));
}

TEST_CASE("follower best response beats a power grid") {
  Philox4x32 r(1, 0xf0);
  for (int i = 0; i < 200; ++i) {
    const double lambda = 10.0 * r.uniform();
    const double gn = 0.1 + 2.0 * r.uniform();
    const double A = 0.1 + r.uniform();
    const double B = r.uniform();
    const double p = follower_best_response(lambda, gn, A, B);
    const double u = pb_utility(0.5, lambda, p, gn, A, B);
    const double hi = 2.0 * std::max(1.0, lambda * gn / A);
    double best = -1e300;
    for (int k = 0; k <= 2000; ++k) best = std::max(best, pb_utility(0.5, lambda, hi * k / 2000.0, gn, A, B));
    CHECK(u >= best - 1e-12);
    CHECK(p >= 0.0);
  }
}

TEST_CASE("beacon utility is concave in power") {
  for (double p = 0.1; p < 5.0; p += 0.1) {
    const double h = 1e-2;
    const double d2 = pb_utility(0.4, 2.0, p + h, 1.3, 0.7, 0.2) - 2 * pb_utility(0.4, 2.0, p, 1.3, 0.7, 0.2) +
                      pb_utility(0.4, 2.0, p - h, 1.3, 0.7, 0.2);
    CHECK(d2 < 0.0);
  }
}

TEST_CASE("aggregate constants") {
  ChannelSet ch;
  ch.h_s = {Eigen::VectorXcd::Ones(2)};
  ch.h_e = {Eigen::VectorXcd::Ones(2)};
  ch.g = {Eigen::Vector2cd(1.0, 1.0)};
  const auto c = aggregate_constants(ch, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1));
  CHECK(c.C_M == doctest::Approx(2.0));
  CHECK(c.D_M == doctest::Approx(0.5));

  const auto g = make_game(3);
  Philox4x32 r(3);
  Eigen::VectorXd A(5), B(5);
  for (int m = 0; m < 5; ++m) {
    A[m] = 0.01 + r.uniform();
    B[m] = r.uniform();
  }
  double C = 0.0, D = 0.0;
  for (int m = 0; m < 5; ++m) {
    double gn = 0.0;
    for (int i = 0; i < g.channels.g[m].size(); ++i) gn += std::norm(g.channels.g[m][i]);
    C += gn * gn / (2.0 * A[m]);
    D += B[m] * gn / (4.0 * A[m]);
  }
  const auto k = aggregate_constants(g.channels, A, B);
  CHECK(k.C_M == doctest::Approx(C).epsilon(1e-12));
  CHECK(k.D_M == doctest::Approx(D).epsilon(1e-12));
  const auto half = aggregate_constants(g.channels, A, B, {true, false, true, false, false});
  CHECK(half.C_M < k.C_M);
}

TEST_CASE("leader utility reduces to a quadratic without revenue") {
  const auto g = make_game(4);
  const auto gains = link_gains(g.channels, zf(g), 0.5);
  const auto k = aggregate_constants(g.channels, g.A, g.B);
  for (double lambda : {0.0, 0.3, 1.0, 7.0}) {
    CHECK(leader_utility(0.5, lambda, gains, k, 0.0) ==
          doctest::Approx(-0.5 * lambda * lambda * k.C_M + 2 * 0.5 * lambda * k.D_M));
  }
  const auto p = optimal_price(gains, k, 0.0, 0.5);
  CHECK(p.lambda == doctest::Approx(k.D_M / k.C_M).epsilon(1e-10));
}

TEST_CASE("equal link gains leave no secrecy term") {
  GameLinkGains gains;
  gains.t_s = gains.t_e = 3.0;
  const AggregateConstants k{2.0, 0.5};
  for (double lambda : {0.0, 0.5, 1.0, 10.0}) {
    const double y = lambda * k.C_M - 2 * k.D_M;
    CHECK(leader_utility(0.4, lambda, gains, k, 1.0) == doctest::Approx(-0.4 * lambda * y));
  }
  CHECK(cubic_coefficients(gains, k, 1.0, 0.4).c == 0.0);
  gains.t_e = 0.0;
  CHECK_THROWS_AS(cubic_coefficients(gains, k, 1.0, 0.4), std::domain_error);
}

TEST_CASE("link gains follow their definition") {
  const auto g = make_game(5);
  const auto v = zf(g);
  const double theta = 0.3;
  const auto gains = link_gains(g.channels, v, theta);
  double ts = 1e300, te = 0.0;
  for (const auto& h : g.channels.h_s) ts = std::min(ts, theta * std::norm(h.dot(v)) / ((1 - theta) * g.channels.sigma_s2));
  for (const auto& h : g.channels.h_e) te = std::max(te, theta * std::norm(h.dot(v)) / ((1 - theta) * g.channels.sigma_e2));
  CHECK(gains.t_s == doctest::Approx(ts).epsilon(1e-12));
  CHECK(gains.t_e == doctest::Approx(te).epsilon(1e-9).scale(ts));
}

TEST_CASE("cubic roots") {
  const auto s = solve_cubic_cardano(-6.0, 11.0, -6.0);
  REQUIRE(s.roots.size() == 3);
  CHECK(s.roots[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.roots[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s.roots[2] == doctest::Approx(3.0).epsilon(1e-12));
  const auto z = solve_cubic_cardano(1.0, 1.0, 0.0);
  REQUIRE(z.roots.size() == 1);
  CHECK(z.roots[0] == 0.0);
  const auto d = solve_cubic_cardano(0.0, 0.0, 0.0);
  REQUIRE(d.roots.size() == 1);
  CHECK(d.roots[0] == 0.0);
  const auto dbl = solve_cubic_cardano(-4.0, 5.0, -2.0);  // (x-1)^2 (x-2)
  REQUIRE(dbl.roots.size() == 2);
  CHECK(dbl.roots[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(dbl.roots[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cubic roots match sign-change bisection") {
  Philox4x32 r(7, 0xc0);
  for (int t = 0; t < 200; ++t) {
    const double a = 20 * r.uniform() - 10, b = 20 * r.uniform() - 10, c = 20 * r.uniform() - 10;
    auto f = [&](double x) { return ((x + a) * x + b) * x + c; };
    // Roots lie within the Cauchy bound; the critical points split it into
    // monotone pieces.
    const double R = 1.0 + std::max({std::abs(a), std::abs(b), std::abs(c)});
    std::vector<double> cuts{-R};
    const double disc = a * a - 3 * b;
    if (disc > 0) {
      cuts.push_back((-a - std::sqrt(disc)) / 3);
      cuts.push_back((-a + std::sqrt(disc)) / 3);
    }
    cuts.push_back(R);
    std::vector<double> expect;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double lo = cuts[i], hi = cuts[i + 1];
      if (f(lo) == 0.0) { expect.push_back(lo); continue; }
      if ((f(lo) < 0) == (f(hi) < 0)) continue;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(mid) < 0) == (f(lo) < 0) ? lo : hi) = mid;
      }
      expect.push_back(0.5 * (lo + hi));
    }
    const auto s = solve_cubic_cardano(a, b, c);
    REQUIRE(s.roots.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(std::abs(s.roots[i] - expect[i]) < 1e-9 * std::max(1.0, std::abs(expect[i])));
  }
}

TEST_CASE("optimal price is stationary and beats a price grid") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    const auto g = make_game(seed);
    const double theta = 0.3;
    const auto gains = link_gains(g.channels, zf(g), theta);
    const auto k = aggregate_constants(g.channels, g.A, g.B);
    const auto p = optimal_price(gains, k, g.mu, theta);
    if (p.regime == PriceSolution::Regime::interior) {
      const double scale = std::abs(g.mu / std::max(p.lambda, 1e-300)) + theta * std::abs(p.lambda * k.C_M);
      CHECK(std::abs(leader_stationarity_residual(theta, p.lambda, gains, k, g.mu)) <= 1e-7 * scale);
    }
    double best = -1e300;
    const double hi = 3.0 * std::max(p.lambda, 2 * k.D_M / k.C_M);
    for (int i = 0; i <= 1000; ++i) best = std::max(best, leader_utility(theta, hi * i / 1000.0, gains, k, g.mu));
    CHECK(p.utility >= best - 1e-9 * std::max(1.0, std::abs(best)));
    CHECK(p.utility == doctest::Approx(leader_utility(theta, p.lambda, gains, k, g.mu)).epsilon(1e-12));
  }
}

TEST_CASE("price equilibrium is consistent with follower responses") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto g = make_game(seed);
    const auto v = zf(g);
    const auto eq = price_equilibrium(g, 0.4, v);
    const auto p = follower_powers(g, eq.lambda_opt);
    CHECK((p - eq.p_opt).norm() <= 1e-12 * std::max(1.0, p.norm()));
    std::vector<int> active;
    for (int m = 0; m < p.size(); ++m)
      if (p[m] > 0.0) active.push_back(m);
    CHECK(active == eq.active_set);
    CHECK(eq.U_M == doctest::Approx(leader_reference(g, 0.4, eq.lambda_opt, eq.gains)).epsilon(1e-10));
    CHECK(eq.U_M == doctest::Approx(leader_utility_actual(g, 0.4, eq.lambda_opt, eq.gains)).epsilon(1e-12));
  }
}

TEST_CASE("price scales with costs when revenue scales too") {
  const auto g = make_game(9);
  auto h = g;
  const double s = 3.0;
  h.A *= s;
  h.B *= s;
  h.mu *= s;
  const auto v = zf(g);
  const auto a = price_equilibrium(g, 0.4, v);
  const auto b = price_equilibrium(h, 0.4, v);
  CHECK(b.lambda_opt == doctest::Approx(s * a.lambda_opt).epsilon(1e-8));
  CHECK(b.U_M == doctest::Approx(s * a.U_M).epsilon(1e-8));
  CHECK((b.p_opt - a.p_opt).norm() <= 1e-8 * a.p_opt.norm());
}

TEST_CASE("an unprofitable market stays idle") {
  auto g = make_game(2, 1);
  g.B[0] = 1e12;
  const auto eq = price_equilibrium(g, 0.5, zf(g));
  CHECK(eq.p_opt[0] == 0.0);
  CHECK(eq.secrecy_rate == 0.0);
  CHECK(eq.active_set.empty());
  CHECK(eq.U_M == 0.0);
}

TEST_CASE("theta maximiser finds an injected peak") {
  const auto f = [](double t) { return 1.0 - (t - 0.4) * (t - 0.4); };
  ThetaSearchOptions o;
  o.parallel = false;
  const auto s = maximize_over_theta(f, o);
  o.parallel = true;
  const auto p = maximize_over_theta(f, o);
  CHECK(std::abs(s.x - 0.4) <= 1e-3);
  CHECK(s.x == p.x);
  CHECK(s.fx == p.fx);
}

TEST_CASE("leader level with a fixed direction") {
  const auto g = make_game(11);
  const auto v = zf(g);
  const auto eq = optimal_theta(g, fixed_direction(v));
  CHECK(eq.theta_opt > 0.0);
  CHECK(eq.theta_opt < 1.0);
  for (double t = 0.05; t < 1.0; t += 0.05) CHECK(price_equilibrium(g, t, v).U_M <= eq.U_M + 1e-9);
}

TEST_CASE("no profitable deviation at equilibrium") {
  const auto g = make_game(12, 3);
  ScaDirectionPolicy policy(g.channels, g.R_bar);
  ThetaSearchOptions o;
  o.parallel = false;
  const DirectionPolicy pol = [&](double t) { return policy(t); };
  const auto eq = optimal_theta(g, pol, o);
  const auto dev = check_deviations(g, eq, pol, 20, 20, 1000);
  CHECK(dev.leader_gain <= 1e-6);
  CHECK(dev.follower_gain <= 1e-6);
}

TEST_CASE("invalid game parameters") {
  auto g = make_game(1);
  g.mu = 0.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  g = make_game(1);
  g.A = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

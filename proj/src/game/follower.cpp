#include <cmath>
#include <stdexcept>

#include "wpsec/game.hpp"

namespace wpsec {

void GameParams::validate() const {
  channels.validate();
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("GameParams: mu must be > 0");
  if (A.size() != channels.M() || B.size() != channels.M()) {
    throw std::invalid_argument("GameParams: A and B need one entry per beacon");
  }
  if (!(A.array() > 0.0).all() || !A.allFinite()) {
    throw std::invalid_argument("GameParams: A must be > 0");
  }
  if (!(B.array() > 0.0).all() || !B.allFinite()) {
    throw std::invalid_argument("GameParams: B must be > 0");
  }
  if (!(R_bar >= 0.0) || !std::isfinite(R_bar)) {
    throw std::invalid_argument("GameParams: R_bar must be >= 0");
  }
}

double follower_best_response(double lambda, double g_norm_sq, double A_m, double B_m) {
  if (lambda * g_norm_sq > B_m) return (lambda * g_norm_sq - B_m) / (2.0 * A_m);
  return 0.0;
}

double follower_best_response(double lambda, const Eigen::VectorXcd& g_m, double A_m, double B_m) {
  return follower_best_response(lambda, g_m.squaredNorm(), A_m, B_m);
}

double pb_utility(double theta, double lambda, double p_m, double g_norm_sq, double A_m,
                  double B_m) {
  return theta * (lambda * p_m * g_norm_sq - A_m * p_m * p_m - B_m * p_m);
}

double pb_utility(double theta, double lambda, double p_m, const Eigen::VectorXcd& g_m, double A_m,
                  double B_m) {
  return pb_utility(theta, lambda, p_m, g_m.squaredNorm(), A_m, B_m);
}

Eigen::VectorXd follower_powers(const GameParams& game, double lambda) {
  const int M = game.channels.M();
  Eigen::VectorXd p(M);
  for (int m = 0; m < M; ++m) {
    p(m) = follower_best_response(lambda, game.channels.g[static_cast<std::size_t>(m)], game.A(m),
                                  game.B(m));
  }
  return p;
}

AggregateConstants aggregate_constants(const ChannelSet& channels, const Eigen::VectorXd& A,
                                       const Eigen::VectorXd& B, const std::vector<bool>& active) {
  const int M = channels.M();
  if (A.size() != M || B.size() != M || static_cast<int>(active.size()) != M) {
    throw std::invalid_argument("aggregate_constants: one entry per beacon expected");
  }
  AggregateConstants k;
  for (int m = 0; m < M; ++m) {
    if (!active[static_cast<std::size_t>(m)]) continue;
    const double g2 = channels.g[static_cast<std::size_t>(m)].squaredNorm();
    k.C_M += g2 * g2 / (2.0 * A(m));
    k.D_M += B(m) * g2 / (4.0 * A(m));
  }
  return k;
}

AggregateConstants aggregate_constants(const ChannelSet& channels, const Eigen::VectorXd& A,
                                       const Eigen::VectorXd& B) {
  return aggregate_constants(channels, A, B, std::vector<bool>(static_cast<std::size_t>(channels.M()), true));
}

GameLinkGains link_gains(const ChannelSet& channels, const Eigen::VectorXcd& v, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("link_gains: theta outside (0,1)");
  GameLinkGains g;
  g.v = v;
  const double r = theta / (1.0 - theta);
  g.t_s = std::numeric_limits<double>::infinity();
  for (const auto& h : channels.h_s) g.t_s = std::min(g.t_s, r * std::norm(h.dot(v)) / channels.sigma_s2);
  g.t_e = 0.0;
  for (const auto& h : channels.h_e) g.t_e = std::max(g.t_e, r * std::norm(h.dot(v)) / channels.sigma_e2);
  return g;
}

}  // namespace wpsec

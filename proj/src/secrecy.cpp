#include "wpsec/secrecy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wpsec {

namespace {
void check_theta(double theta, const char* where) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error(std::string(where) + ": theta outside (0,1)");
}
}  // namespace

double link_rate(const Eigen::VectorXcd& h, const Eigen::VectorXcd& w, double theta,
                 double g_norms_sq_sum, double sigma2) {
  check_theta(theta, "link_rate");
  if (!(sigma2 > 0.0)) throw std::domain_error("link_rate: sigma2 must be > 0");
  if (h.size() != w.size()) throw std::invalid_argument("link_rate: length mismatch");
  const double gain = std::norm(h.dot(w));
  return (1.0 - theta) * std::log2(1.0 + theta * g_norms_sq_sum * gain / ((1.0 - theta) * sigma2));
}

double multicast_secrecy_rate(const ChannelSet& channels, const Eigen::VectorXcd& w,
                              double theta) {
  const double G = channels.beacon_gain_sum();
  double worst_user = std::numeric_limits<double>::infinity();
  for (const auto& h : channels.h_s) {
    worst_user = std::min(worst_user, link_rate(h, w, theta, G, channels.sigma_s2));
  }
  double best_eve = 0.0;
  for (const auto& h : channels.h_e) {
    best_eve = std::max(best_eve, link_rate(h, w, theta, G, channels.sigma_e2));
  }
  return std::max(0.0, worst_user - best_eve);
}

EffectiveParams effective_params(const ChannelSet& channels, double theta, double R_bar) {
  check_theta(theta, "effective_params");
  const double G = channels.beacon_gain_sum();
  if (!(G > 0.0)) throw std::domain_error("effective_params: beacon channels carry no energy");
  const double ratio = (1.0 - theta) / (theta * G);
  return {ratio * channels.sigma_s2, ratio * channels.sigma_e2, R_bar / (1.0 - theta)};
}

double pair_rate_slack(const Eigen::VectorXcd& h_s, const Eigen::VectorXcd& h_e,
                       const Eigen::VectorXcd& w, const EffectiveParams& eff) {
  return std::log2(1.0 + std::norm(h_s.dot(w)) / eff.sigma_s2_bar) -
         std::log2(1.0 + std::norm(h_e.dot(w)) / eff.sigma_e2_bar) - eff.R_bar_bar;
}

}  // namespace wpsec

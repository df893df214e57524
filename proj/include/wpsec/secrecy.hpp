#pragma once

#include <Eigen/Dense>

#include "wpsec/channels.hpp"

namespace wpsec {

/// (1-theta) log2(1 + theta*g_sum*|h^H w|^2 / ((1-theta) sigma2)).
/// w carries the per-beacon power: w = sqrt(P) v.
double link_rate(const Eigen::VectorXcd& h, const Eigen::VectorXcd& w, double theta,
                 double g_norms_sq_sum, double sigma2);

/// [min_k R_s,k - max_l R_e,l]^+ with the clamp applied once, after the
/// min and max.
double multicast_secrecy_rate(const ChannelSet& channels, const Eigen::VectorXcd& w,
                              double theta);

/// Constants of the inner problem at a fixed time split.
struct EffectiveParams {
  double sigma_s2_bar = 0.0;  // (1-theta) sigma_s^2 / (theta sum ||g||^2)
  double sigma_e2_bar = 0.0;  // (1-theta) sigma_e^2 / (theta sum ||g||^2)
  double R_bar_bar = 0.0;     // R_bar / (1-theta)
};

EffectiveParams effective_params(const ChannelSet& channels, double theta, double R_bar);

/// Slack of one user/eavesdropper pair in the effective-noise form:
/// log2(1 + |h_s^H w|^2/sigma_s_bar^2) - log2(1 + |h_e^H w|^2/sigma_e_bar^2) - R_bar_bar.
double pair_rate_slack(const Eigen::VectorXcd& h_s, const Eigen::VectorXcd& h_e,
                       const Eigen::VectorXcd& w, const EffectiveParams& eff);

}  // namespace wpsec

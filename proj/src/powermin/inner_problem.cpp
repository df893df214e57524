#include "wpsec/inner_problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace wpsec {

const char* to_string(InnerMethod m) {
  switch (m) {
    case InnerMethod::socp: return "socp";
    case InnerMethod::sdp: return "sdp";
    case InnerMethod::sca: return "sca";
    case InnerMethod::closed_form: return "closed_form";
  }
  return "unknown";
}

InnerMethod parse_inner_method(std::string_view tag) {
  if (tag == "socp") return InnerMethod::socp;
  if (tag == "sdp") return InnerMethod::sdp;
  if (tag == "sca") return InnerMethod::sca;
  if (tag == "closed_form") return InnerMethod::closed_form;
  throw std::invalid_argument("unknown inner method '" + std::string(tag) + "'");
}

const char* to_string(BeamStatus s) {
  switch (s) {
    case BeamStatus::optimal: return "ok";
    case BeamStatus::infeasible: return "infeasible";
    case BeamStatus::failed: return "failed";
  }
  return "unknown";
}

InnerProblem InnerProblem::make(const ChannelSet& channels, double theta, double R_bar) {
  channels.validate();
  InnerProblem p;
  p.N = channels.num_antennas();
  p.K = channels.K();
  p.L = channels.L();
  p.theta = theta;
  p.R_bar = R_bar;
  p.eff = effective_params(channels, theta, R_bar);
  p.rate_factor = std::exp2(p.eff.R_bar_bar);
  p.c0 = p.rate_factor - 1.0;
  p.gain_sum = channels.beacon_gain_sum();
  const double ss = std::sqrt(p.eff.sigma_s2_bar);
  const double se = std::sqrt(p.eff.sigma_e2_bar);
  double gamma = 0.0;
  for (const auto& h : channels.h_s) gamma = std::max(gamma, h.norm() / ss);
  p.gamma = gamma > 0.0 ? gamma : 1.0;
  for (const auto& h : channels.h_s) p.a.push_back(h / (ss * p.gamma));
  for (const auto& h : channels.h_e) p.e.push_back(h / (se * p.gamma));
  return p;
}

bool InnerProblem::representable() const { return std::isfinite(rate_factor) && std::isfinite(c0); }

double InnerProblem::min_margin(const Eigen::VectorXcd& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ak : a) {
    const double s = std::norm(ak.dot(x));
    for (const auto& el : e) best = std::min(best, s - rate_factor * std::norm(el.dot(x)) - c0);
  }
  return best;
}

std::optional<double> InnerProblem::feasibility_scale(const Eigen::VectorXcd& dir) const {
  if (!representable() || !dir.allFinite()) return std::nullopt;
  double s2 = 0.0;
  for (const auto& ak : a) {
    const double gain = std::norm(ak.dot(dir));
    for (const auto& el : e) {
      const double diff = gain - rate_factor * std::norm(el.dot(dir));
      if (!(diff > 0.0)) return std::nullopt;
      s2 = std::max(s2, c0 / diff);
    }
  }
  // The relative bump keeps the binding pair on the feasible side after
  // rounding.
  return std::sqrt(s2) * (1.0 + 1e-12);
}

BeamformerResult InnerProblem::finalize(const Eigen::VectorXcd& dir, InnerMethod method,
                                        int iterations, const ChannelSet& channels) const {
  BeamformerResult r;
  r.method = method;
  r.theta = theta;
  r.iterations = iterations;
  const auto s = feasibility_scale(dir);
  if (!s || !(*s > 0.0)) {
    r.status = BeamStatus::failed;
    r.message = "direction cannot be scaled to meet every secrecy constraint";
    return r;
  }
  r.w = (*s / gamma) * dir;
  r.P_opt = r.w.squaredNorm();
  r.v = r.w / std::sqrt(r.P_opt);
  r.objective = theta * gain_sum / (1.0 - theta) * r.P_opt;
  r.achieved_rate = multicast_secrecy_rate(channels, r.w, theta);
  r.status = BeamStatus::optimal;
  return r;
}

BeamformerResult InnerProblem::infeasible(InnerMethod method, const char* why) const {
  BeamformerResult r;
  r.status = BeamStatus::infeasible;
  r.method = method;
  r.theta = theta;
  r.message = why;
  return r;
}

}  // namespace wpsec

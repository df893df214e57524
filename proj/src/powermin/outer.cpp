#include <cmath>
#include <limits>

#include "wpsec/golden.hpp"
#include "wpsec/powermin.hpp"

namespace wpsec {

BeamformerResult solve_inner(const ChannelSet& channels, double theta, double R_bar,
                             InnerMethod method, const InnerOptions& options) {
  switch (method) {
    case InnerMethod::socp: return solve_inner_socp(channels, theta, R_bar, options);
    case InnerMethod::sdp: return solve_inner_sdp(channels, theta, R_bar, options).second;
    case InnerMethod::sca: return solve_inner_sca(channels, theta, R_bar, std::nullopt, options).first;
    case InnerMethod::closed_form: return closed_form_single_user(channels, theta, R_bar).first;
  }
  return {};
}

ThetaSearchResult outer_theta_search(const InnerSolver& inner, double tol, double lo, double hi) {
  ThetaSearchResult out;
  BeamformerResult best;
  bool have = false;
  BeamformerResult last;
  const auto g = golden_section_minimize(
      [&](double theta) {
        BeamformerResult r = inner(theta);
        const double v = r.ok() ? r.objective : std::numeric_limits<double>::infinity();
        if (r.ok() && (!have || v < best.objective)) {
          best = r;
          have = true;
        }
        last = std::move(r);
        return v;
      },
      lo, hi, tol);
  out.evaluations = g.evaluations;
  if (have) {
    out.theta_opt = best.theta;
    out.result = std::move(best);
  } else {
    out.theta_opt = g.x;
    out.result = std::move(last);
    if (out.result.status != BeamStatus::failed) out.result.status = BeamStatus::infeasible;
    out.result.message = "no feasible theta in the bracket";
  }
  return out;
}

ThetaSearchResult outer_theta_search(const ChannelSet& channels, double R_bar, InnerMethod method,
                                     double tol, const InnerOptions& options) {
  if (method != InnerMethod::sca) {
    return outer_theta_search(
        [&](double theta) { return solve_inner(channels, theta, R_bar, method, options); }, tol);
  }
  // SCA starts from the previous feasible direction.
  std::optional<Eigen::VectorXcd> warm;
  return outer_theta_search(
      [&](double theta) {
        auto r = solve_inner_sca(channels, theta, R_bar, warm, options).first;
        if (r.ok()) warm = r.v;
        return r;
      },
      tol);
}

BeamformerResult minimize_total_power(const ChannelSet& channels, const SystemParams& params,
                                      InnerMethod method, const InnerOptions& options,
                                      double theta_tol) {
  params.validate();
  channels.validate();
  BeamformerResult r = outer_theta_search(channels, params.R_bar, method, theta_tol, options).result;
  r.within_power_cap = r.ok() && r.P_opt <= params.P_max;
  return r;
}

}  // namespace wpsec

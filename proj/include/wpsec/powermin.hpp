#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wpsec/channels.hpp"

namespace wpsec {

enum class InnerMethod { socp, sdp, sca, closed_form };
const char* to_string(InnerMethod m);
/// Throws std::invalid_argument on an unknown tag.
InnerMethod parse_inner_method(std::string_view tag);

enum class BeamStatus { optimal, infeasible, failed };
const char* to_string(BeamStatus s);

struct BeamformerResult {
  BeamStatus status = BeamStatus::failed;
  Eigen::VectorXcd w;  // sqrt(P) v
  Eigen::VectorXcd v;  // unit norm
  double P_opt = 0.0;  // ||w||^2, per-beacon power in mW
  double theta = 0.0;
  double objective = std::numeric_limits<double>::infinity();  // theta G/(1-theta) ||w||^2
  double achieved_rate = 0.0;
  InnerMethod method = InnerMethod::sca;
  int iterations = 0;
  bool within_power_cap = true;
  std::string message;

  bool ok() const { return status == BeamStatus::optimal; }
};

struct SdpSolution {
  enum class Extraction { eigen, randomization };
  Eigen::MatrixXcd Q_s;          // in units of w w^H
  int rank_est = 0;
  double eiggap = 0.0;           // lambda_2 / lambda_1
  Extraction extraction = Extraction::eigen;
  double relaxed_power = 0.0;    // trace(Q_s)
  double relaxed_objective = 0.0;  // theta G/(1-theta) trace(Q_s)
};

struct SCAState {
  std::vector<Eigen::Vector2d> u;  // linearisation points
  std::vector<Eigen::Vector2d> q;  // (Re, Im) of x^H a_k at the last iterate
  std::vector<double> b;           // slack b_k at the last iterate
  int n = 0;
  std::vector<double> obj_history;  // ||w||^2 per iteration
  bool converged = false;
};

struct ClosedFormDiagnostics {
  double alpha_opt = 0.0;
  double rho_max = 0.0;
  Eigen::VectorXcd eigvec;
};

struct Feasibility {
  enum class Verdict { feasible, infeasible, undetermined };
  Verdict verdict = Verdict::undetermined;
  std::string reason;
  Eigen::VectorXcd zf_direction;  // unit norm when a zero-forcing point exists

  bool feasible() const { return verdict == Verdict::feasible; }
};

struct InnerOptions {
  double solver_tol = 1e-8;
  int randomizations = 1000;
  double rank_threshold = 1e-6;
  std::uint64_t randomization_seed = 0x5eedULL;
  int sca_max_iter = 50;
  double sca_rel_tol = 1e-5;
  /// Zero-forcing starting points tried when no initial point is supplied.
  int sca_starts = 4;
  /// Run the randomisation and multistart loops with OpenMP.
  bool parallel = true;
};

/// Zero-forcing test: when N_T >= K + L and the projection of every user
/// channel onto the null space of the eavesdropper channels is nonzero the
/// instance is feasible for any rate target. Aligned user/eavesdropper pairs
/// whose gain ratio cannot reach 2^R_bar are reported infeasible. Anything
/// else is undetermined.
Feasibility check_feasibility(const ChannelSet& channels, const SystemParams& params);

/// Second-order cone form of the inner problem. Only valid when a rank-one
/// SDP solution is guaranteed (K = 1, or 1 < K <= 3 with L = 1); otherwise
/// throws std::invalid_argument pointing at the SCA solver.
BeamformerResult solve_inner_socp(const ChannelSet& channels, double theta, double R_bar,
                                  const InnerOptions& options = {});

std::pair<SdpSolution, BeamformerResult> solve_inner_sdp(const ChannelSet& channels,
                                                         double theta, double R_bar,
                                                         const InnerOptions& options = {});

std::pair<BeamformerResult, SCAState> solve_inner_sca(
    const ChannelSet& channels, double theta, double R_bar,
    const std::optional<Eigen::VectorXcd>& init = std::nullopt, const InnerOptions& options = {});

/// K = L = 1 only (std::invalid_argument otherwise).
std::pair<BeamformerResult, ClosedFormDiagnostics> closed_form_single_user(
    const ChannelSet& channels, double theta, double R_bar);

/// Dispatches to one of the four inner solvers.
BeamformerResult solve_inner(const ChannelSet& channels, double theta, double R_bar,
                             InnerMethod method, const InnerOptions& options = {});

using InnerSolver = std::function<BeamformerResult(double theta)>;

struct ThetaSearchResult {
  double theta_opt = 0.0;
  BeamformerResult result;
  int evaluations = 0;
};

inline constexpr double kThetaLo = 1e-3;
inline constexpr double kThetaHi = 1.0 - 1e-3;

/// Golden-section search of theta -> inner(theta).objective on [lo, hi].
/// Non-optimal inner results count as +inf. If no theta is feasible the
/// returned result has status infeasible.
ThetaSearchResult outer_theta_search(const InnerSolver& inner, double tol = 1e-4,
                                     double lo = kThetaLo, double hi = kThetaHi);

ThetaSearchResult outer_theta_search(const ChannelSet& channels, double R_bar, InnerMethod method,
                                     double tol = 1e-4, const InnerOptions& options = {});

/// Full pipeline: all beacons at the common power P, theta search, inner
/// beamformer. Flags results with P_opt above params.P_max.
BeamformerResult minimize_total_power(const ChannelSet& channels, const SystemParams& params,
                                      InnerMethod method, const InnerOptions& options = {},
                                      double theta_tol = 1e-4);

}  // namespace wpsec

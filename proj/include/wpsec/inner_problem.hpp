#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "wpsec/channels.hpp"
#include "wpsec/powermin.hpp"
#include "wpsec/secrecy.hpp"

namespace wpsec {

/// The inner problem at fixed theta in normalised units. With
/// a_k = h_s,k / sigma_s_bar and e_l = h_e,l / sigma_e_bar every pair
/// constraint reads
///     |a_k^H w|^2 - 2^Rbb |e_l^H w|^2 >= 2^Rbb - 1.
/// Channels are further divided by gamma = max_k ||a_k|| and the unknown is
/// x = gamma w, which keeps the conic data of order one.
struct InnerProblem {
  int N = 0;
  int K = 0;
  int L = 0;
  double theta = 0.0;
  double R_bar = 0.0;
  EffectiveParams eff;
  double rate_factor = 0.0;  // 2^Rbb
  double c0 = 0.0;           // 2^Rbb - 1
  double gamma = 1.0;
  double gain_sum = 0.0;
  std::vector<Eigen::VectorXcd> a;  // h_s,k / (sigma_s_bar gamma)
  std::vector<Eigen::VectorXcd> e;  // h_e,l / (sigma_e_bar gamma)

  /// Throws std::domain_error for theta outside (0,1).
  static InnerProblem make(const ChannelSet& channels, double theta, double R_bar);

  /// False when 2^Rbb overflows; no beamformer can then meet the target.
  bool representable() const;

  /// min over pairs of |a^H x|^2 - 2^Rbb |e^H x|^2 - c0.
  double min_margin(const Eigen::VectorXcd& x) const;

  /// Smallest s >= 0 with s*dir feasible, or nullopt when some pair cannot
  /// be satisfied along dir.
  std::optional<double> feasibility_scale(const Eigen::VectorXcd& dir) const;

  /// Scales dir to the feasibility boundary and fills a result (w, v, P,
  /// objective, achieved rate). Status failed when dir cannot be scaled.
  BeamformerResult finalize(const Eigen::VectorXcd& dir, InnerMethod method, int iterations,
                            const ChannelSet& channels) const;

  BeamformerResult infeasible(InnerMethod method, const char* why) const;
};

/// Unit vector orthogonal to every eavesdropper channel with a nonzero gain
/// towards every user, or nullopt when none exists.
std::optional<Eigen::VectorXcd> zero_forcing_direction(const std::vector<Eigen::VectorXcd>& users,
                                                       const std::vector<Eigen::VectorXcd>& eves);

/// The zero-forcing direction above followed by count - 1 directions that
/// combine the projected user channels with Philox CN(0,1) weights.
std::vector<Eigen::VectorXcd> zero_forcing_candidates(const std::vector<Eigen::VectorXcd>& users,
                                                      const std::vector<Eigen::VectorXcd>& eves,
                                                      int count, std::uint64_t seed);

struct RandomizationOutcome {
  std::optional<Eigen::VectorXcd> direction;  // best candidate scaled to feasibility
  double power = 0.0;                         // ||direction||^2 in x units
  int feasible_count = 0;
  int best_index = -1;                        // -1: the principal eigenvector won
};

/// Guided randomisation: candidate i is U diag(sqrt(lambda)) r_i with r_i
/// drawn from Philox stream i, scaled to feasibility; the principal
/// eigenvector competes as well. The OpenMP and serial paths return the
/// same outcome.
RandomizationOutcome guided_randomization(const InnerProblem& problem, const Eigen::MatrixXcd& Q,
                                          int count, std::uint64_t seed, bool parallel);

}  // namespace wpsec

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace wpsec {

/// System dimensions and targets. Powers are in mW, rates in bps/Hz.
struct SystemParams {
  int N_T = 8;
  int K = 3;
  int L = 5;
  int M = 5;
  double xi = 1.0;
  double T = 1.0;
  double P_max = 1.0e3;
  double R_bar = 2.0;
  double sigma_s2 = 1e-8;
  double sigma_e2 = 1e-8;

  void validate() const;
};

struct PathLossModel {
  double A = 1e-3;
  double alpha = 3.0;
  double d_s = 2.0;
  double d_e = 2.0;
  double d_PB = 5.0;

  void validate() const;
};

struct ChannelSet {
  std::vector<Eigen::VectorXcd> h_s;  // transmitter -> users
  std::vector<Eigen::VectorXcd> h_e;  // transmitter -> eavesdroppers
  std::vector<Eigen::VectorXcd> g;    // beacons -> transmitter
  double sigma_s2 = 1e-8;
  double sigma_e2 = 1e-8;

  int num_antennas() const;
  int K() const { return static_cast<int>(h_s.size()); }
  int L() const { return static_cast<int>(h_e.size()); }
  int M() const { return static_cast<int>(g.size()); }
  /// sum_m ||g_m||^2
  double beacon_gain_sum() const;
  /// Throws std::invalid_argument on empty groups, length mismatch,
  /// non-finite entries or non-positive noise.
  void validate() const;
};

/// sqrt(A d^-alpha). Throws std::domain_error for d <= 0.
double path_loss_gain(double d, const PathLossModel& model);

/// Rayleigh fading scaled by the path-loss amplitude. User k, eavesdropper l
/// and beacon m each own a Philox stream, so a realisation is unchanged for
/// the entities it shares with a run that has more beacons or a different
/// distance.
ChannelSet sample_channels(const SystemParams& params, const PathLossModel& model,
                           std::uint64_t seed);

/// xi * sum_m p_m ||g_m||^2 * theta * T.
double harvested_energy(const Eigen::VectorXd& p, const ChannelSet& channels, double theta,
                        const SystemParams& params);

}  // namespace wpsec

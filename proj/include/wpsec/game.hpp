#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wpsec/channels.hpp"
#include "wpsec/golden.hpp"
#include "wpsec/powermin.hpp"

namespace wpsec {

/// Energy-trading game between the transmitter (leader, sets price lambda
/// and split theta) and the power beacons (followers, set powers p_m).
/// Utilities are in log2 units.
struct GameParams {
  double mu = 1.0;     // revenue per unit secrecy rate
  Eigen::VectorXd A;   // quadratic cost coefficients, one per beacon
  Eigen::VectorXd B;   // linear cost coefficients, one per beacon
  ChannelSet channels;
  double R_bar = 2.0;  // target used by the direction policy

  /// Throws std::invalid_argument unless mu > 0, A > 0, B > 0 and the cost
  /// vectors have one entry per beacon.
  void validate() const;
};

/// C = sum ||g_m||^4 / (2 A_m),  D = sum B_m ||g_m||^2 / (4 A_m).
struct AggregateConstants {
  double C_M = 0.0;
  double D_M = 0.0;
};

AggregateConstants aggregate_constants(const ChannelSet& channels, const Eigen::VectorXd& A,
                                       const Eigen::VectorXd& B);
/// Sums restricted to the beacons flagged in `active`.
AggregateConstants aggregate_constants(const ChannelSet& channels, const Eigen::VectorXd& A,
                                       const Eigen::VectorXd& B, const std::vector<bool>& active);

struct GameLinkGains {
  double t_s = 0.0;  // min_k theta |h_s,k^H v|^2 / ((1-theta) sigma_s^2)
  double t_e = 0.0;  // max_l theta |h_e,l^H v|^2 / ((1-theta) sigma_e^2)
  Eigen::VectorXcd v;
};

GameLinkGains link_gains(const ChannelSet& channels, const Eigen::VectorXcd& v, double theta);

// ------------------------------------------------------------- followers

/// p = (lambda ||g||^2 - B) / (2A) above the threshold B/||g||^2, else 0.
double follower_best_response(double lambda, const Eigen::VectorXcd& g_m, double A_m, double B_m);
double follower_best_response(double lambda, double g_norm_sq, double A_m, double B_m);

/// theta (lambda p ||g||^2 - A p^2 - B p).
double pb_utility(double theta, double lambda, double p_m, const Eigen::VectorXcd& g_m, double A_m,
                  double B_m);
double pb_utility(double theta, double lambda, double p_m, double g_norm_sq, double A_m, double B_m);

/// Best responses of every beacon.
Eigen::VectorXd follower_powers(const GameParams& game, double lambda);

// ---------------------------------------------------------------- leader

/// Leader utility with every beacon active:
///   mu (1-theta) [log2(1 + y t_s) - log2(1 + y t_e)]^+ - theta lambda y,
/// y = lambda C - 2D. The secrecy term is zero whenever y <= 0 or t_s <= t_e.
double leader_utility(double theta, double lambda, const GameLinkGains& gains,
                      const AggregateConstants& consts, double mu);

/// Leader utility under the true follower best responses (inactive beacons
/// deliver nothing and are paid nothing).
double leader_utility_actual(const GameParams& game, double theta, double lambda,
                             const GameLinkGains& gains);

/// d/d lambda of leader_utility (the secrecy term only where it is smooth
/// and positive).
double leader_stationarity_residual(double theta, double lambda, const GameLinkGains& gains,
                                    const AggregateConstants& consts, double mu);

struct CubicCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Monic cubic in x = lambda C - D whose roots are the stationary points of
/// the smooth branch. c carries the 1/ln 2 of the log2 derivative and the
/// 1/(2 theta t_s t_e) normalisation. Throws std::domain_error if t_s or t_e
/// is not positive.
CubicCoefficients cubic_coefficients(const GameLinkGains& gains, const AggregateConstants& consts,
                                     double mu, double theta);

struct CubicSolve {
  double a = 0.0, b = 0.0, c = 0.0;
  double p = 0.0, q = 0.0, Delta = 0.0;
  std::complex<double> x1, x2;
  std::vector<double> roots;  // ascending, distinct
  double x_opt = 0.0;         // filled by callers that select a root
};

/// All real roots of x^3 + a x^2 + b x + c. Cardano for Delta >= 0, the
/// trigonometric form for Delta < 0, each root Newton-polished.
CubicSolve solve_cubic_cardano(double a, double b, double c);

struct PriceSolution {
  enum class Regime { interior, no_trade_vertex, boundary };
  double lambda = 0.0;
  double x = 0.0;
  double utility = 0.0;
  Regime regime = Regime::boundary;
  CubicSolve cubic;
  std::string diagnostic;
};
const char* to_string(PriceSolution::Regime r);

/// Maximiser over lambda >= 0 of leader_utility with the given constants:
/// the best of the smooth-branch root (Cardano), the vertex x = 0 of the
/// branch without secrecy revenue, and lambda = 0.
PriceSolution optimal_price(const GameLinkGains& gains, const AggregateConstants& consts, double mu,
                            double theta);

// ------------------------------------------------------------ equilibrium

/// Beam direction used at a given theta.
using DirectionPolicy = std::function<Eigen::VectorXcd(double theta)>;

/// Default policy: the normalised SCA power-minimising beamformer at
/// (theta, R_bar), warm-started from the closest cached theta, with the
/// zero-forcing direction when SCA fails or 2^Rbb exceeds 1e8. Results are
/// cached per theta; a cache is tied to one channel realisation.
class ScaDirectionPolicy {
 public:
  ScaDirectionPolicy(const ChannelSet& channels, double R_bar, InnerOptions options = {});
  Eigen::VectorXcd operator()(double theta);
  std::size_t cache_size() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// Fixed direction, e.g. for tests.
DirectionPolicy fixed_direction(Eigen::VectorXcd v);

struct Equilibrium {
  double theta_opt = 0.0;
  double lambda_opt = 0.0;
  Eigen::VectorXd p_opt;
  double U_M = 0.0;
  Eigen::VectorXd U_PB;
  std::vector<int> active_set;
  GameLinkGains gains;
  AggregateConstants consts;  // over the active set
  double secrecy_rate = 0.0;
  int active_set_iterations = 0;
  bool active_set_converged = true;
  std::string diagnostics;
};

/// Price and powers at a fixed theta and direction. The active set is
/// found by the fixed point "price -> beacons above threshold -> constants",
/// and certified by maximising the true utility on every interval between
/// consecutive beacon thresholds.
Equilibrium price_equilibrium(const GameParams& game, double theta, const Eigen::VectorXcd& v);

struct ThetaSearchOptions {
  int grid_points = 200;
  double tol = 1e-7;
  double lo = 1e-3;
  double hi = 1.0 - 1e-3;
  bool parallel = true;
};

/// Grid scan then golden refinement of a scalar function of theta. The grid
/// runs with OpenMP when `parallel`; both paths return the same point.
GoldenResult maximize_over_theta(const std::function<double(double)>& f,
                                   const ThetaSearchOptions& options = {});

/// Leader level: theta maximising U_M(theta, lambda_opt(theta)).
Equilibrium optimal_theta(const GameParams& game, const DirectionPolicy& policy,
                          const ThetaSearchOptions& options = {});

/// optimal_theta with the default SCA policy, plus a check that no grid
/// deviation improves either side (recorded in diagnostics).
Equilibrium solve_equilibrium(const GameParams& game, const ThetaSearchOptions& options = {},
                              const InnerOptions& inner = {});

struct DeviationReport {
  double leader_gain = 0.0;    // max over the (theta, lambda) grid of U - U_opt
  double follower_gain = 0.0;  // max over beacons and p grids of U_PB - U_PB_opt
};

/// Definition-style check on an n_theta x n_lambda grid (followers respond
/// optimally to every leader deviation) and on n_p-point per-beacon grids.
DeviationReport check_deviations(const GameParams& game, const Equilibrium& eq,
                                 const DirectionPolicy& policy, int n_theta = 50,
                                 int n_lambda = 50, int n_p = 1000);

}  // namespace wpsec

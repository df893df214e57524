#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wpsec/channels.hpp"
#include "wpsec/game.hpp"
#include "wpsec/powermin.hpp"

namespace wpsec {

// ---------------------------------------------------------------- config

enum class SweepVar { d_PB, N_T, M, lambda, theta, mu };
const char* to_string(SweepVar v);
/// Throws std::invalid_argument on an unknown name.
SweepVar parse_sweep_var(std::string_view name);

/// Scalar game settings; every beacon gets the same A and B.
struct GameScalars {
  double mu = 1.0;
  double A = 0.05;
  double B = 0.05;
  double theta = 0.3;  // fixed split used by lambda sweeps
};

struct SolverSettings {
  double theta_tol = 1e-4;   // golden-section width of the power-minimisation search
  int theta_grid = 200;      // grid points of the game theta search
  double game_theta_tol = 1e-7;
  double fixed_theta = 0.5;  // split used by the sca_fixed_theta method
  InnerOptions inner;
};

/// Method tags: socp, sdp, sca, closed_form, sca_fixed_theta, game.
struct ScenarioConfig {
  std::string id = "scenario";
  SystemParams system;
  PathLossModel pathloss;
  std::optional<GameScalars> game;
  SweepVar sweep = SweepVar::d_PB;
  std::vector<double> grid{5.0};
  int trials = 200;
  std::uint64_t seed = 1;
  std::vector<std::string> methods{"sca"};
  SolverSettings solver;

  /// Throws std::invalid_argument when a grid is empty or unsorted, trials
  /// < 1, a method is unknown, or a game quantity is needed but missing.
  void validate() const;
};

ScenarioConfig parse_config(const std::string& yaml_text);
ScenarioConfig load_config(const std::filesystem::path& file);
std::string to_yaml(const ScenarioConfig& config);

// ------------------------------------------------------------------- rows

inline constexpr const char* kTrialSchema = "wpsec-trial/1";
inline constexpr const char* kSummarySchema = "wpsec-summary/1";

/// Power-minimisation rows leave lambda_opt, U_M and U_PB_total at 0. Game
/// rows use objective = harvested energy and P_opt = total beacon power.
struct TrialRow {
  std::string scenario;
  std::uint64_t seed = 0;
  double sweep_value = 0.0;
  std::string method;
  double objective = 0.0;
  double P_opt = 0.0;
  double theta_opt = 0.0;
  double lambda_opt = 0.0;
  double U_M = 0.0;
  double U_PB_total = 0.0;
  double achieved_rate = 0.0;
  int iterations = 0;
  double wall_time_ms = 0.0;
  std::string status;

  bool ok() const { return status == "ok"; }
};

std::vector<std::string> trial_fields();
std::string csv_header();
std::string to_csv_line(const TrialRow& row);
/// Header plus one line per row, rows in the given order.
std::string to_csv(const std::vector<TrialRow>& rows);
/// Inverse of to_csv; throws std::runtime_error on a malformed file.
std::vector<TrialRow> parse_trial_csv(const std::string& text);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
};

/// Statistics over the ok rows of one (scenario, sweep value, method).
struct SummaryRow {
  std::string scenario;
  double sweep_value = 0.0;
  std::string method;
  int n = 0;
  int n_ok = 0;
  Stat objective, P_opt, theta_opt, lambda_opt, U_M, U_PB_total, achieved_rate, wall_time_ms;
};

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows);
std::string summary_csv(const std::vector<SummaryRow>& summary);

/// Orders rows by (scenario, sweep value, method, seed).
void sort_rows(std::vector<TrialRow>& rows);

// ----------------------------------------------------------------- runner

/// Per-trial memo of inner beamforming directions and game policies. Valid
/// across sweep points that keep h_s, h_e, the noise powers, N_T and R_bar.
class DirectionStore {
 public:
  struct InnerEntry {
    Eigen::VectorXcd direction;  // unit norm; empty when the solve failed
    BeamStatus status = BeamStatus::failed;
    int iterations = 0;
    std::string message;
  };
  using InnerMemo = std::map<double, InnerEntry>;

  InnerMemo& inner_memo(const std::string& key);
  ScaDirectionPolicy& policy(const std::string& key, const ChannelSet& channels, double R_bar,
                             const InnerOptions& options);

 private:
  std::mutex mutex_;
  std::map<std::string, std::unique_ptr<InnerMemo>> inner_;
  std::map<std::string, std::unique_ptr<ScaDirectionPolicy>> policies_;
};

struct RunOptions {
  bool parallel = true;                   // OpenMP over trials
  std::shared_ptr<DirectionStore> store;  // fresh store per call when null
  std::optional<double> solver_tol;       // overrides the config's conic tolerance
};

/// One row per (trial, sweep value, method), sorted. Trial t uses channel
/// seed config.seed + t. Failures are recorded in the row status.
std::vector<TrialRow> run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Writes trials.csv, summary.csv and manifest.json into dir.
void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                   const std::vector<TrialRow>& rows);

// ---------------------------------------------------------------- figures

struct Verdict {
  std::string claim;
  bool pass = false;
  std::string detail;
};

struct FigureReport {
  std::string name;
  std::vector<ScenarioConfig> series;
  std::vector<TrialRow> rows;
  std::vector<SummaryRow> summary;
  std::vector<Verdict> verdicts;

  bool pass() const;
  std::string report_text() const;
};

std::vector<std::string> figure_names();
/// The preconfigured series of a figure; throws std::invalid_argument on an
/// unknown name or on fig6 (use benchmark_runtime).
std::vector<ScenarioConfig> figure_series(const std::string& name, int trials, std::uint64_t seed);
/// Verdicts of a figure computed from rows of its series. fig10, fig11 and
/// fig12 share one series set, so a single run can be scored three ways.
std::vector<Verdict> figure_verdicts(const std::string& name, const std::vector<ScenarioConfig>& series,
                                     const std::vector<TrialRow>& rows);
FigureReport reproduce_figure(const std::string& name, int trials, std::uint64_t seed,
                              const RunOptions& options = {});
void write_figure(const std::filesystem::path& dir, const FigureReport& report);

// ---------------------------------------------------------------- trends

/// Adjacent means must move in the stated direction; a step against it is
/// tolerated up to one standard error of the difference.
enum class Direction { increasing, decreasing };
Verdict trend_verdict(const std::string& claim, const std::vector<double>& x,
                      const std::vector<Stat>& stats, const std::vector<int>& counts,
                      Direction direction, bool strict);

// -------------------------------------------------------------- benchmark

struct BenchRow {
  int N_T = 0;
  std::string method;  // sca, sca_multistart, sdp
  int trials = 0;
  double median_ms = 0.0;
  int ok = 0;
};

struct BenchReport {
  std::vector<BenchRow> table;
  std::vector<Verdict> verdicts;
  std::string csv() const;
  std::string report_text() const;
};

/// Serial timing of one inner solve at theta = 0.5 per (N_T, trial, method)
/// with K = 3, L = 5. Throws std::invalid_argument for N_T outside [4, 12].
BenchReport benchmark_runtime(const std::vector<int>& NT_grid, int trials, std::uint64_t seed);

}  // namespace wpsec

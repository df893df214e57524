#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wpsec/experiments.hpp"
#include "wpsec/inner_problem.hpp"

namespace wpsec {

DirectionStore::InnerMemo& DirectionStore::inner_memo(const std::string& key) {
  std::lock_guard lock(mutex_);
  auto& slot = inner_[key];
  if (!slot) slot = std::make_unique<InnerMemo>();
  return *slot;
}

ScaDirectionPolicy& DirectionStore::policy(const std::string& key, const ChannelSet& channels, double R_bar,
                                           const InnerOptions& options) {
  std::lock_guard lock(mutex_);
  auto& slot = policies_[key];
  if (!slot) slot = std::make_unique<ScaDirectionPolicy>(channels, R_bar, options);
  return *slot;
}

namespace {

bool is_power_method(const std::string& m) {
  return m == "socp" || m == "sdp" || m == "sca" || m == "closed_form" || m == "sca_fixed_theta";
}

// Everything the beam direction depends on; d_PB, M and the game scalars
// are left out on purpose.
std::string direction_key(const SystemParams& s, const PathLossModel& pl, const InnerOptions& o,
                          std::uint64_t seed) {
  std::ostringstream k;
  k.precision(17);
  k << seed << '|' << s.N_T << '|' << s.K << '|' << s.L << '|' << s.R_bar << '|' << s.sigma_s2 << '|'
    << s.sigma_e2 << '|' << pl.A << '|' << pl.alpha << '|' << pl.d_s << '|' << pl.d_e << '|' << o.solver_tol
    << '|' << o.randomizations << '|' << o.rank_threshold << '|' << o.randomization_seed << '|'
    << o.sca_max_iter << '|' << o.sca_rel_tol << '|' << o.sca_starts;
  return k.str();
}

const char* status_tag(BeamStatus s) { return to_string(s); }

BeamformerResult memo_inner(DirectionStore::InnerMemo& memo, const ChannelSet& ch, double theta,
                            double R_bar, InnerMethod method, const InnerOptions& opts) {
  if (const auto it = memo.find(theta); it != memo.end()) {
    const auto& e = it->second;
    const auto p = InnerProblem::make(ch, theta, R_bar);
    if (e.status != BeamStatus::optimal) {
      BeamformerResult r = p.infeasible(method, e.message.c_str());
      r.status = e.status;
      return r;
    }
    return p.finalize(e.direction, method, e.iterations, ch);
  }
  BeamformerResult r = solve_inner(ch, theta, R_bar, method, opts);
  DirectionStore::InnerEntry e;
  e.status = r.status;
  e.iterations = r.iterations;
  e.message = r.message;
  if (r.ok()) e.direction = r.v;
  memo.emplace(theta, std::move(e));
  return r;
}

void fill_power_row(TrialRow& row, const BeamformerResult& r, double theta) {
  row.status = status_tag(r.status);
  row.theta_opt = theta;
  row.iterations = r.iterations;
  if (r.ok()) {
    row.objective = r.objective;
    row.P_opt = r.P_opt;
    row.achieved_rate = r.achieved_rate;
  }
}

double game_rate(const GameParams& g, const Eigen::VectorXd& p, const GameLinkGains& gains, double theta) {
  double y = 0.0;
  for (int m = 0; m < g.channels.M(); ++m) y += p[m] * g.channels.g[m].squaredNorm();
  if (!(y > 0.0) || !(gains.t_s > gains.t_e)) return 0.0;
  return (1.0 - theta) * (std::log2(1.0 + y * gains.t_s) - std::log2(1.0 + y * gains.t_e));
}

void fill_game_row(TrialRow& row, const GameParams& g, const SystemParams& s, double theta, double lambda,
                   const Eigen::VectorXd& p, double U_M, const GameLinkGains& gains, int iterations) {
  row.theta_opt = theta;
  row.lambda_opt = lambda;
  row.U_M = U_M;
  row.P_opt = p.sum();
  row.objective = harvested_energy(p, g.channels, theta, s);
  double upb = 0.0;
  for (int m = 0; m < g.channels.M(); ++m) upb += pb_utility(theta, lambda, p[m], g.channels.g[m], g.A[m], g.B[m]);
  row.U_PB_total = upb;
  row.achieved_rate = game_rate(g, p, gains, theta);
  row.iterations = iterations;
  row.status = "ok";
}

TrialRow evaluate(const ScenarioConfig& c, int trial, double value, const std::string& method,
                  DirectionStore& store, bool inner_parallel) {
  TrialRow row;
  row.scenario = c.id;
  row.seed = c.seed + static_cast<std::uint64_t>(trial);
  row.sweep_value = value;
  row.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    SystemParams s = c.system;
    PathLossModel pl = c.pathloss;
    GameScalars gs = c.game.value_or(GameScalars{});
    switch (c.sweep) {
      case SweepVar::d_PB: pl.d_PB = value; break;
      case SweepVar::N_T: s.N_T = static_cast<int>(value); break;
      case SweepVar::M: s.M = static_cast<int>(value); break;
      case SweepVar::mu: gs.mu = value; break;
      case SweepVar::lambda:
      case SweepVar::theta: break;
    }
    const ChannelSet ch = sample_channels(s, pl, row.seed);
    InnerOptions opts = c.solver.inner;
    opts.parallel = inner_parallel;
    const std::string key = direction_key(s, pl, opts, row.seed);

    if (is_power_method(method)) {
      const bool fixed = method == "sca_fixed_theta";
      const InnerMethod im = fixed ? InnerMethod::sca : parse_inner_method(method);
      auto& memo = store.inner_memo(key + '|' + (fixed ? "sca" : method));
      if (fixed) {
        fill_power_row(row, memo_inner(memo, ch, c.solver.fixed_theta, s.R_bar, im, opts), c.solver.fixed_theta);
      } else {
        const InnerSolver inner = [&](double theta) { return memo_inner(memo, ch, theta, s.R_bar, im, opts); };
        const auto best = outer_theta_search(inner, c.solver.theta_tol);
        fill_power_row(row, best.result, best.theta_opt);
      }
    } else {
      GameParams g;
      g.mu = gs.mu;
      g.A = Eigen::VectorXd::Constant(s.M, gs.A);
      g.B = Eigen::VectorXd::Constant(s.M, gs.B);
      g.channels = ch;
      g.R_bar = s.R_bar;
      g.validate();
      auto& policy = store.policy(key, ch, s.R_bar, opts);
      if (c.sweep == SweepVar::lambda) {
        const double theta = gs.theta;
        const Equilibrium eq = price_equilibrium(g, theta, policy(theta));
        const Eigen::VectorXd p = follower_powers(g, value);
        fill_game_row(row, g, s, theta, value, p, leader_utility_actual(g, theta, value, eq.gains), eq.gains,
                      eq.active_set_iterations);
        // lambda_opt reports the equilibrium price at this theta.
        row.lambda_opt = eq.lambda_opt;
      } else {
        Equilibrium eq;
        if (c.sweep == SweepVar::theta) {
          eq = price_equilibrium(g, value, policy(value));
          eq.theta_opt = value;
        } else {
          ThetaSearchOptions to;
          to.grid_points = c.solver.theta_grid;
          to.tol = c.solver.game_theta_tol;
          to.parallel = inner_parallel;
          eq = optimal_theta(g, std::ref(policy), to);
        }
        fill_game_row(row, g, s, eq.theta_opt, eq.lambda_opt, eq.p_opt, eq.U_M, eq.gains,
                      eq.active_set_iterations);
      }
    }
  } catch (const std::exception&) {
    row.status = "error";
  }
  const auto t1 = std::chrono::steady_clock::now();
  row.wall_time_ms = std::max(std::chrono::duration<double, std::milli>(t1 - t0).count(), 1e-6);
  if (row.ok()) {
    for (double v : {row.objective, row.P_opt, row.theta_opt, row.lambda_opt, row.U_M, row.U_PB_total,
                     row.achieved_rate}) {
      if (!std::isfinite(v)) row.status = "nonfinite";
    }
  }
  return row;
}

}  // namespace

std::vector<TrialRow> run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioConfig c = config;
  if (options.solver_tol) c.solver.inner.solver_tol = *options.solver_tol;
  c.validate();
  auto store = options.store ? options.store : std::make_shared<DirectionStore>();
  std::vector<std::vector<TrialRow>> per_trial(c.trials);
  const bool inner_parallel = !options.parallel;
  // Each trial walks its sweep points in grid order so the direction memo
  // fills identically on every run.
  auto run_trial = [&](int t) {
    for (double v : c.grid) {
      for (const auto& m : c.methods) per_trial[t].push_back(evaluate(c, t, v, m, *store, inner_parallel));
    }
  };
  if (options.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < c.trials; ++t) run_trial(t);
  } else {
    for (int t = 0; t < c.trials; ++t) run_trial(t);
  }
  std::vector<TrialRow> rows;
  for (auto& v : per_trial) rows.insert(rows.end(), v.begin(), v.end());
  sort_rows(rows);
  return rows;
}

void write_outputs(const std::filesystem::path& dir, const ScenarioConfig& config,
                   const std::vector<TrialRow>& rows) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    out << text;
  };
  write("trials.csv", to_csv(rows));
  write("summary.csv", summary_csv(summarize(rows)));
  const auto ok = std::count_if(rows.begin(), rows.end(), [](const TrialRow& r) { return r.ok(); });
  nlohmann::json manifest{{"trial_schema", kTrialSchema},
                          {"summary_schema", kSummarySchema},
                          {"scenario", config.id},
                          {"rows", rows.size()},
                          {"ok_rows", ok},
                          {"config", to_yaml(config)}};
  write("manifest.json", manifest.dump(2) + "\n");
}

}  // namespace wpsec

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "wpsec/experiments.hpp"

namespace wpsec {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

ScenarioConfig base(const std::string& id, int trials, std::uint64_t seed) {
  ScenarioConfig c;
  c.id = id;
  c.trials = trials;
  c.seed = seed;
  return c;
}

std::vector<double> range(double lo, double hi, double step) {
  std::vector<double> v;
  for (int i = 0; lo + i * step <= hi + 1e-9 * step; ++i) v.push_back(std::round((lo + i * step) * 1e9) / 1e9);
  return v;
}

ScenarioConfig game_series(const std::string& id, int trials, std::uint64_t seed, double mu, double d_PB,
                           int K, int L) {
  ScenarioConfig c = base(id, trials, seed);
  c.system.K = K;
  c.system.L = L;
  c.pathloss.d_PB = d_PB;
  c.game = GameScalars{};
  c.game->mu = mu;
  c.methods = {"game"};
  c.sweep = SweepVar::M;
  c.grid = {1, 2, 4, 6, 8};
  return c;
}

struct Curve {
  std::vector<double> x;
  std::vector<Stat> stat;
  std::vector<int> n;
};

Curve curve(const std::vector<SummaryRow>& summary, const std::string& scenario, const std::string& method,
            Stat SummaryRow::*field) {
  Curve c;
  for (const auto& s : summary) {
    if (s.scenario != scenario || s.method != method) continue;
    c.x.push_back(s.sweep_value);
    c.stat.push_back(s.*field);
    c.n.push_back(s.n_ok);
  }
  return c;
}

double se(const Stat& s, int n) { return n > 0 ? s.std / std::sqrt(static_cast<double>(n)) : 0.0; }

/// rows of one (scenario, method) as seed -> sweep value -> row
using Table = std::map<std::uint64_t, std::map<double, const TrialRow*>>;

Table table(const std::vector<TrialRow>& rows, const std::string& scenario, const std::string& method) {
  Table t;
  for (const auto& r : rows) {
    if (r.scenario == scenario && r.method == method) t[r.seed][r.sweep_value] = &r;
  }
  return t;
}

Verdict trend(const std::string& claim, const std::vector<SummaryRow>& summary, const std::string& scenario,
              const std::string& method, Stat SummaryRow::*field, Direction d, bool strict) {
  const Curve c = curve(summary, scenario, method, field);
  return trend_verdict(claim, c.x, c.stat, c.n, d, strict);
}

/// mean(lower) < mean(upper) at every sweep value, up to one standard error.
Verdict ordered(const std::string& claim, const std::vector<SummaryRow>& summary, const std::string& lower,
                const std::string& upper, const std::string& method, Stat SummaryRow::*field) {
  const Curve lo = curve(summary, lower, method, field);
  const Curve hi = curve(summary, upper, method, field);
  Verdict v{claim, !lo.x.empty() && lo.x == hi.x, ""};
  double worst = std::numeric_limits<double>::infinity();
  double worst_x = 0.0;
  for (std::size_t i = 0; v.pass && i < lo.x.size(); ++i) {
    const double gap = hi.stat[i].mean - lo.stat[i].mean;
    const double slack = std::hypot(se(lo.stat[i], lo.n[i]), se(hi.stat[i], hi.n[i]));
    if (gap + slack < worst) {
      worst = gap + slack;
      worst_x = lo.x[i];
    }
    if (!(gap > -slack)) v.pass = false;
  }
  v.detail = lo.x.empty() ? "no data" : fmt("smallest gap+slack %.3g at x=%g", worst, worst_x);
  return v;
}

/// Per trial, every method in `others` matches `ref` within rel.
Verdict agree(const std::string& claim, const std::vector<TrialRow>& rows, const std::string& scenario,
              const std::string& ref, const std::vector<std::string>& others, double rel) {
  const Table base_t = table(rows, scenario, ref);
  double worst = 0.0;
  int compared = 0;
  int failures = 0;
  for (const auto& m : others) {
    const Table t = table(rows, scenario, m);
    for (const auto& [seed, pts] : base_t) {
      for (const auto& [x, r] : pts) {
        const auto it = t.find(seed);
        if (it == t.end() || !it->second.count(x)) continue;
        const TrialRow* o = it->second.at(x);
        if (r->ok() != o->ok()) {
          ++failures;
          continue;
        }
        if (!r->ok()) continue;
        ++compared;
        const double e = std::abs(o->P_opt - r->P_opt) / std::max(std::abs(r->P_opt), 1e-300);
        worst = std::max(worst, e);
        if (e > rel) ++failures;
      }
    }
  }
  Verdict v{claim, compared > 0 && failures == 0, ""};
  v.detail = fmt("%.0f pairs, %.0f mismatches, worst relative gap %.3g", compared, failures, worst);
  return v;
}

std::vector<Verdict> power_trend(const std::vector<SummaryRow>& s, const std::string& scenario,
                                 const std::vector<std::string>& methods) {
  std::vector<Verdict> out;
  for (const auto& m : methods) {
    out.push_back(trend(m + ": P_opt increases with d_PB", s, scenario, m, &SummaryRow::P_opt,
                        Direction::increasing, true));
  }
  return out;
}

Verdict sca_dominates(const std::vector<TrialRow>& rows, const std::string& scenario) {
  const Table sca = table(rows, scenario, "sca");
  const Table sdp = table(rows, scenario, "sdp");
  int n = 0;
  int wins = 0;
  double worst = 0.0;
  for (const auto& [seed, pts] : sca) {
    for (const auto& [x, r] : pts) {
      const auto it = sdp.find(seed);
      if (it == sdp.end() || !it->second.count(x)) continue;
      const TrialRow* o = it->second.at(x);
      if (!r->ok() || !o->ok()) continue;
      ++n;
      const double rel = (r->P_opt - o->P_opt) / o->P_opt;
      worst = std::max(worst, rel);
      if (rel <= 1e-4) ++wins;
    }
  }
  Verdict v{"SCA power <= SDP+randomisation power in >= 95% of trials, never > 1% worse", false, ""};
  v.pass = n > 0 && wins >= 0.95 * n && worst <= 0.01;
  v.detail = fmt("%.0f of %.0f trials, worst excess %.3g", wins, n, worst);
  return v;
}

Verdict fixed_theta_dominates(const std::vector<TrialRow>& rows, const std::string& scenario) {
  const Table opt = table(rows, scenario, "sca");
  const Table fixed = table(rows, scenario, "sca_fixed_theta");
  int n = 0;
  int bad = 0;
  for (const auto& [seed, pts] : opt) {
    for (const auto& [x, r] : pts) {
      const auto it = fixed.find(seed);
      if (it == fixed.end() || !it->second.count(x)) continue;
      const TrialRow* f = it->second.at(x);
      if (!r->ok() || !f->ok()) continue;
      ++n;
      if (f->objective < r->objective * (1.0 - 1e-9)) ++bad;
    }
  }
  Verdict v{"fixed theta = 0.5 needs at least the optimal-theta transmit energy on every trial", n > 0 && bad == 0,
            ""};
  v.detail = fmt("%.0f trials, %.0f violations", n, bad);
  return v;
}

// Per trial: concavity where every beacon is active, and the equilibrium
// price against the grid argmax.
std::vector<Verdict> lambda_curve_checks(const ScenarioConfig& c, const std::vector<TrialRow>& rows) {
  const Table t = table(rows, c.id, "game");
  const double step = c.grid.size() > 1 ? c.grid[1] - c.grid[0] : 0.0;
  int trials = 0;
  int concave_fail = 0;
  int argmax_fail = 0;
  double worst_d2 = -std::numeric_limits<double>::infinity();
  for (const auto& [seed, pts] : t) {
    const ChannelSet ch = sample_channels(c.system, c.pathloss, seed);
    double tau = 0.0;
    for (const auto& g : ch.g) tau = std::max(tau, c.game->B / g.squaredNorm());
    std::vector<double> x, u;
    double lambda_opt = 0.0;
    bool ok = true;
    for (const auto& [lam, r] : pts) {
      ok = ok && r->ok();
      x.push_back(lam);
      u.push_back(r->U_M);
      lambda_opt = r->lambda_opt;
    }
    if (!ok || x.size() < 3) continue;
    ++trials;
    bool concave = true;
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
      if (x[i - 1] <= tau) continue;
      const double d2 = u[i + 1] - 2.0 * u[i] + u[i - 1];
      const double scale = std::max({1.0, std::abs(u[i - 1]), std::abs(u[i]), std::abs(u[i + 1])});
      worst_d2 = std::max(worst_d2, d2 / scale);
      if (d2 > 1e-9 * scale) concave = false;
    }
    if (!concave) ++concave_fail;
    const auto best = std::max_element(u.begin(), u.end()) - u.begin();
    if (lambda_opt >= x.front() && lambda_opt <= x.back() && std::abs(x[best] - lambda_opt) > step + 1e-9) {
      ++argmax_fail;
    }
  }
  Verdict concave{c.id + ": U_M concave in lambda once every beacon is active", trials > 0 && concave_fail == 0,
                  fmt("%.0f trials, %.0f non-concave, worst scaled second difference %.3g", trials, concave_fail,
                      worst_d2)};
  Verdict argmax{c.id + ": grid argmax within one grid step of lambda_opt", trials > 0 && argmax_fail == 0,
                 fmt("%.0f trials, %.0f misses, step %g", trials, argmax_fail, step)};
  return {concave, argmax};
}

// Mean over trials of the per-trial argmax (or max) of U_M along the sweep.
struct PeakStat {
  Stat at;
  Stat value;
  int n = 0;
};

PeakStat peaks(const std::vector<TrialRow>& rows, const std::string& scenario) {
  const Table t = table(rows, scenario, "game");
  std::vector<double> at, value;
  for (const auto& [seed, pts] : t) {
    double best = -std::numeric_limits<double>::infinity();
    double best_x = 0.0;
    bool ok = true;
    for (const auto& [x, r] : pts) {
      ok = ok && r->ok();
      if (r->U_M > best) {
        best = r->U_M;
        best_x = x;
      }
    }
    if (!ok) continue;
    at.push_back(best_x);
    value.push_back(best);
  }
  auto stat = [](const std::vector<double>& v) {
    Stat s;
    if (v.empty()) return s;
    for (double a : v) s.mean += a;
    s.mean /= v.size();
    double ss = 0.0;
    for (double a : v) ss += (a - s.mean) * (a - s.mean);
    s.std = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
    return s;
  };
  return {stat(at), stat(value), static_cast<int>(at.size())};
}

Verdict peak_trend(const std::string& claim, const std::vector<double>& x, const std::vector<PeakStat>& p,
                   bool use_location, Direction d, bool strict) {
  std::vector<Stat> s;
  std::vector<int> n;
  for (const auto& q : p) {
    s.push_back(use_location ? q.at : q.value);
    n.push_back(q.n);
  }
  return trend_verdict(claim, x, s, n, d, strict);
}

// Second differences of U_M(theta) per trial; mean must be <= its
// standard error at every interior grid point.
Verdict theta_concavity(const std::vector<TrialRow>& rows, const std::string& scenario) {
  const Table t = table(rows, scenario, "game");
  std::map<double, std::vector<double>> d2;
  for (const auto& [seed, pts] : t) {
    std::vector<const TrialRow*> r;
    for (const auto& [x, row] : pts) r.push_back(row);
    for (std::size_t i = 1; i + 1 < r.size(); ++i) {
      if (r[i - 1]->ok() && r[i]->ok() && r[i + 1]->ok()) {
        d2[r[i]->sweep_value].push_back(r[i + 1]->U_M - 2.0 * r[i]->U_M + r[i - 1]->U_M);
      }
    }
  }
  Verdict v{scenario + ": U_M concave in theta (mean second difference <= its standard error)", !d2.empty(), ""};
  double worst = -std::numeric_limits<double>::infinity();
  double worst_x = 0.0;
  for (const auto& [x, vals] : d2) {
    double m = 0.0;
    for (double a : vals) m += a;
    m /= vals.size();
    double ss = 0.0;
    for (double a : vals) ss += (a - m) * (a - m);
    const double err = vals.size() > 1 ? std::sqrt(ss / (vals.size() - 1) / vals.size()) : 0.0;
    if (m - err > worst) {
      worst = m - err;
      worst_x = x;
    }
    if (m > err) v.pass = false;
  }
  v.detail = fmt("largest mean-minus-error %.3g at theta=%g", worst, worst_x);
  return v;
}

const std::vector<std::string> kNames{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7",
                                      "fig8", "fig9", "fig10", "fig11", "fig12"};

}  // namespace

Verdict trend_verdict(const std::string& claim, const std::vector<double>& x, const std::vector<Stat>& stats,
                      const std::vector<int>& counts, Direction direction, bool strict) {
  Verdict v{claim, x.size() >= 2 && x.size() == stats.size() && stats.size() == counts.size(), ""};
  if (!v.pass) {
    v.detail = "fewer than two sweep points";
    return v;
  }
  const double sign = direction == Direction::increasing ? 1.0 : -1.0;
  double worst = std::numeric_limits<double>::infinity();
  double worst_x = x[0];
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double step = sign * (stats[i + 1].mean - stats[i].mean);
    const double slack = std::hypot(se(stats[i], counts[i]), se(stats[i + 1], counts[i + 1]));
    if (step + slack < worst) {
      worst = step + slack;
      worst_x = x[i + 1];
    }
    if (!(strict ? step + slack > 0.0 : step + slack >= 0.0)) v.pass = false;
  }
  if (strict && !(sign * (stats.back().mean - stats.front().mean) > 0.0)) v.pass = false;
  v.detail = fmt("means %.6g -> %.6g, smallest step+slack %.3g", stats.front().mean, stats.back().mean, worst) +
             fmt(" at x=%g", worst_x);
  return v;
}

bool FigureReport::pass() const {
  return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::string FigureReport::report_text() const {
  std::string out = name + "\n";
  for (const auto& v : verdicts) out += std::string(v.pass ? "PASS " : "FAIL ") + v.claim + " [" + v.detail + "]\n";
  out += std::string("overall: ") + (pass() ? "PASS" : "FAIL") + "\n";
  return out;
}

std::vector<std::string> figure_names() { return kNames; }

std::vector<ScenarioConfig> figure_series(const std::string& name, int trials, std::uint64_t seed) {
  const std::vector<double> distances{4, 5, 6, 7};
  if (name == "fig2") {
    auto c = base("fig2", trials, seed);
    c.methods = {"sca", "sdp"};
    c.grid = distances;
    return {c};
  }
  if (name == "fig3") {
    auto c = base("fig3", trials, seed);
    c.system.K = 1;
    c.methods = {"socp", "sca", "sdp"};
    c.grid = distances;
    return {c};
  }
  if (name == "fig4") {
    auto c = base("fig4", trials, seed);
    c.methods = {"sca", "sca_fixed_theta"};
    c.grid = distances;
    return {c};
  }
  if (name == "fig5") {
    auto c = base("fig5", trials, seed);
    c.system.K = 1;
    c.system.L = 1;
    c.methods = {"closed_form", "socp", "sca"};
    c.grid = distances;
    return {c};
  }
  if (name == "fig7") {
    std::vector<ScenarioConfig> out;
    for (double theta : {0.3, 0.5, 0.7}) {
      auto c = game_series(fmt("fig7_theta%g", theta), trials, seed, 1.0, 5.0, 3, 5);
      c.game->theta = theta;
      c.sweep = SweepVar::lambda;
      c.grid = range(0.0, 12000.0, 200.0);
      out.push_back(c);
    }
    return out;
  }
  if (name == "fig8") {
    std::vector<ScenarioConfig> out;
    for (double mu : {0.5, 1.0, 2.0}) {
      auto c = game_series(fmt("fig8_mu%g", mu), trials, seed, mu, 5.0, 3, 5);
      c.sweep = SweepVar::theta;
      c.grid = range(0.05, 0.95, 0.05);
      out.push_back(c);
    }
    return out;
  }
  if (name == "fig9") {
    return {game_series("pb_K3_L5", trials, seed, 1.0, 5.0, 3, 5),
            game_series("pb_K4_L5", trials, seed, 1.0, 5.0, 4, 5),
            game_series("pb_K3_L6", trials, seed, 1.0, 5.0, 3, 6)};
  }
  if (name == "fig10" || name == "fig11" || name == "fig12") {
    return {game_series("pb_mu1_d5", trials, seed, 1.0, 5.0, 3, 5),
            game_series("pb_mu2_d5", trials, seed, 2.0, 5.0, 3, 5),
            game_series("pb_mu1_d6.5", trials, seed, 1.0, 6.5, 3, 5)};
  }
  if (name == "fig6") throw std::invalid_argument("fig6 is produced by benchmark_runtime");
  throw std::invalid_argument("unknown figure '" + name + "'");
}

std::vector<Verdict> figure_verdicts(const std::string& name, const std::vector<ScenarioConfig>& series,
                                     const std::vector<TrialRow>& rows) {
  const auto s = summarize(rows);
  std::vector<Verdict> v;
  auto add = [&](std::vector<Verdict> more) { v.insert(v.end(), more.begin(), more.end()); };
  if (name == "fig2") {
    add(power_trend(s, "fig2", {"sca", "sdp"}));
    v.push_back(sca_dominates(rows, "fig2"));
  } else if (name == "fig3") {
    add(power_trend(s, "fig3", {"socp", "sca", "sdp"}));
    v.push_back(agree("SOCP, SCA and SDP agree within 1e-4 relative", rows, "fig3", "socp", {"sca", "sdp"}, 1e-4));
  } else if (name == "fig4") {
    add(power_trend(s, "fig4", {"sca", "sca_fixed_theta"}));
    v.push_back(fixed_theta_dominates(rows, "fig4"));
  } else if (name == "fig5") {
    add(power_trend(s, "fig5", {"closed_form"}));
    v.push_back(agree("closed form matches SOCP and SCA within 1e-4 relative", rows, "fig5", "closed_form",
                      {"socp", "sca"}, 1e-4));
  } else if (name == "fig7") {
    std::vector<double> thetas;
    std::vector<PeakStat> p;
    std::vector<Stat> lam;
    std::vector<int> n;
    for (const auto& c : series) {
      add(lambda_curve_checks(c, rows));
      thetas.push_back(c.game->theta);
      p.push_back(peaks(rows, c.id));
      // lambda_opt is constant along a lambda sweep; read it at the first point.
      const Curve lc = curve(s, c.id, "game", &SummaryRow::lambda_opt);
      lam.push_back(lc.stat.empty() ? Stat{} : lc.stat.front());
      n.push_back(lc.n.empty() ? 0 : lc.n.front());
    }
    v.push_back(peak_trend("peak U_M decreases as theta grows", thetas, p, false, Direction::decreasing, true));
    v.push_back(trend_verdict("lambda_opt shifts left as theta grows", thetas, lam, n, Direction::decreasing, true));
  } else if (name == "fig8") {
    std::vector<double> mus;
    std::vector<PeakStat> p;
    for (const auto& c : series) {
      v.push_back(theta_concavity(rows, c.id));
      mus.push_back(c.game->mu);
      p.push_back(peaks(rows, c.id));
    }
    v.push_back(peak_trend("grid theta_opt moves left (weakly) as mu grows", mus, p, true, Direction::decreasing,
                           false));
  } else if (name == "fig9") {
    for (const auto& c : series) {
      v.push_back(trend(c.id + ": U_M increases with M", s, c.id, "game", &SummaryRow::U_M, Direction::increasing,
                        true));
    }
    v.push_back(ordered("one more eavesdropper lowers U_M more than one more user", s, "pb_K3_L6", "pb_K4_L5",
                        "game", &SummaryRow::U_M));
  } else if (name == "fig10") {
    for (const auto& c : series) {
      v.push_back(trend(c.id + ": U_M increases with M", s, c.id, "game", &SummaryRow::U_M, Direction::increasing,
                        true));
    }
    v.push_back(ordered("U_M increases with mu", s, "pb_mu1_d5", "pb_mu2_d5", "game", &SummaryRow::U_M));
    v.push_back(ordered("U_M falls as d_PB grows from 5 m to 6.5 m", s, "pb_mu1_d6.5", "pb_mu1_d5", "game",
                        &SummaryRow::U_M));
  } else if (name == "fig11") {
    for (const auto& c : series) {
      v.push_back(trend(c.id + ": theta_opt decreases with M", s, c.id, "game", &SummaryRow::theta_opt,
                        Direction::decreasing, true));
    }
    v.push_back(ordered("theta_opt decreases with mu", s, "pb_mu2_d5", "pb_mu1_d5", "game", &SummaryRow::theta_opt));
    v.push_back(ordered("theta_opt decreases as d_PB shrinks", s, "pb_mu1_d5", "pb_mu1_d6.5", "game",
                        &SummaryRow::theta_opt));
  } else if (name == "fig12") {
    for (const auto& c : series) {
      v.push_back(trend(c.id + ": lambda_opt decreases with M", s, c.id, "game", &SummaryRow::lambda_opt,
                        Direction::decreasing, true));
    }
    v.push_back(ordered("lambda_opt increases with mu", s, "pb_mu1_d5", "pb_mu2_d5", "game",
                        &SummaryRow::lambda_opt));
    v.push_back(ordered("lambda_opt decreases as d_PB shrinks", s, "pb_mu1_d5", "pb_mu1_d6.5", "game",
                        &SummaryRow::lambda_opt));
  } else {
    throw std::invalid_argument("no verdicts for '" + name + "'");
  }
  return v;
}

FigureReport reproduce_figure(const std::string& name, int trials, std::uint64_t seed, const RunOptions& options) {
  FigureReport r;
  r.name = name;
  r.series = figure_series(name, trials, seed);
  RunOptions opts = options;
  if (!opts.store) opts.store = std::make_shared<DirectionStore>();
  for (const auto& c : r.series) {
    auto rows = run_scenario(c, opts);
    r.rows.insert(r.rows.end(), rows.begin(), rows.end());
  }
  sort_rows(r.rows);
  r.summary = summarize(r.rows);
  r.verdicts = figure_verdicts(name, r.series, r.rows);
  return r;
}

void write_figure(const std::filesystem::path& dir, const FigureReport& report) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (dir / file).string());
    out << text;
  };
  write(report.name + "_trials.csv", to_csv(report.rows));
  write(report.name + "_summary.csv", summary_csv(report.summary));
  write(report.name + "_verdict.txt", report.report_text());
}

}  // namespace wpsec

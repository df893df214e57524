#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "wpsec/experiments.hpp"

namespace wpsec {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

constexpr double kTheta = 0.5;
constexpr double kTimingSlack = 0.05;  // relative, for the monotone-in-N_T sanity check

}  // namespace

std::string BenchReport::csv() const {
  std::string out = "N_T,method,trials,ok,median_ms\n";
  for (const auto& r : table) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d,%s,%d,%d,%.6g\n", r.N_T, r.method.c_str(), r.trials, r.ok, r.median_ms);
    out += buf;
  }
  return out;
}

std::string BenchReport::report_text() const {
  std::string out = "fig6\n";
  for (const auto& r : table) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "N_T=%2d %-15s median %9.3f ms (%d/%d ok)\n", r.N_T, r.method.c_str(),
                  r.median_ms, r.ok, r.trials);
    out += buf;
  }
  for (const auto& v : verdicts) out += std::string(v.pass ? "PASS " : "FAIL ") + v.claim + " [" + v.detail + "]\n";
  return out;
}

BenchReport benchmark_runtime(const std::vector<int>& NT_grid, int trials, std::uint64_t seed) {
  if (NT_grid.empty()) throw std::invalid_argument("benchmark_runtime: empty N_T grid");
  for (int n : NT_grid) {
    if (n < 4 || n > 12) throw std::invalid_argument("benchmark_runtime: N_T outside [4, 12]");
  }
  if (trials < 1) throw std::invalid_argument("benchmark_runtime: trials must be >= 1");

  struct Method {
    std::string name;
    InnerMethod inner;
    int starts;
  };
  const std::vector<Method> methods{{"sca", InnerMethod::sca, 1},
                                    {"sca_multistart", InnerMethod::sca, InnerOptions{}.sca_starts},
                                    {"sdp", InnerMethod::sdp, 0}};
  BenchReport report;
  std::map<std::string, std::vector<double>> medians;
  for (int nt : NT_grid) {
    SystemParams sp;
    sp.N_T = nt;
    const PathLossModel pl;
    for (const auto& m : methods) {
      InnerOptions opts;
      opts.parallel = false;
      if (m.starts > 0) opts.sca_starts = m.starts;
      std::vector<double> times;
      int ok = 0;
      // Untimed warm-up keeps first-touch allocation out of the medians.
      solve_inner(sample_channels(sp, pl, seed), kTheta, sp.R_bar, m.inner, opts);
      for (int t = 0; t < trials; ++t) {
        const ChannelSet ch = sample_channels(sp, pl, seed + static_cast<std::uint64_t>(t));
        const auto t0 = std::chrono::steady_clock::now();
        const BeamformerResult r = solve_inner(ch, kTheta, sp.R_bar, m.inner, opts);
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        ok += r.ok() ? 1 : 0;
      }
      const double med = median(times);
      medians[m.name].push_back(med);
      report.table.push_back({nt, m.name, trials, med, ok});
    }
  }

  char buf[200];
  const auto at8 = std::find(NT_grid.begin(), NT_grid.end(), 8);
  if (at8 != NT_grid.end()) {
    const auto i = static_cast<std::size_t>(at8 - NT_grid.begin());
    const double sca = medians["sca"][i];
    const double sdp = medians["sdp"][i];
    std::snprintf(buf, sizeof buf, "sca %.3f ms, sdp %.3f ms, sca_multistart %.3f ms", sca, sdp,
                  medians["sca_multistart"][i]);
    report.verdicts.push_back({"SCA median <= SDP+randomisation median at N_T = 8", sca <= sdp, buf});
  }
  for (const auto& m : methods) {
    const auto& v = medians[m.name];
    bool mono = true;
    for (std::size_t i = 1; i < v.size(); ++i) mono = mono && v[i] >= v[i - 1] * (1.0 - kTimingSlack);
    std::snprintf(buf, sizeof buf, "medians %.3f -> %.3f ms", v.front(), v.back());
    report.verdicts.push_back({m.name + ": runtime nondecreasing in N_T (5% timing slack)", mono, buf});
  }
  const bool shape = report.table.size() == NT_grid.size() * methods.size();
  report.verdicts.push_back({"one table row per (N_T, method)", shape, std::to_string(report.table.size()) + " rows"});
  return report;
}

}  // namespace wpsec

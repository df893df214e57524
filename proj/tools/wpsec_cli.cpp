#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

#include <CLI11.hpp>

#include "wpsec/experiments.hpp"

namespace {

// "4..12", "4..12:2" or "4,6,8".
std::vector<int> parse_nt(const std::string& spec) {
  std::vector<int> out;
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    int step = 1;
    std::string tail = spec.substr(dots + 2);
    if (const auto colon = tail.find(':'); colon != std::string::npos) {
      step = std::stoi(tail.substr(colon + 1));
      tail = tail.substr(0, colon);
    }
    const int lo = std::stoi(spec.substr(0, dots));
    const int hi = std::stoi(tail);
    if (step < 1 || lo > hi) throw std::invalid_argument("bad N_T range '" + spec + "'");
    for (int n = lo; n <= hi; n += step) out.push_back(n);
  } else {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  }
  return out;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Secure wireless-powered multicast: power minimisation and energy-trading game"};
  app.require_subcommand(1);

  int threads = 0;
  std::optional<double> tol;
  app.add_option("--threads", threads, "OpenMP worker count (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--tol", tol, "Conic solver tolerance")->check(CLI::PositiveNumber);

  std::string config_file;
  std::string out_dir = "out";
  auto* run = app.add_subcommand("run", "Run a scenario config and write trials.csv, summary.csv, manifest.json");
  run->add_option("--config", config_file, "YAML scenario file")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory");

  std::string figure;
  int trials = 200;
  std::uint64_t seed = 1;
  auto* fig = app.add_subcommand("figure", "Reproduce a figure sweep and its trend verdicts");
  fig->add_option("name", figure, "fig2 .. fig12")->required();
  fig->add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
  fig->add_option("--seed", seed, "Base seed");
  fig->add_option("--out", out_dir, "Output directory");

  std::string nt = "4..12";
  int bench_trials = 20;
  auto* bench = app.add_subcommand("bench", "Inner-solver runtime versus N_T (single worker)");
  bench->add_option("--nt", nt, "N_T grid: lo..hi[:step] or a comma list");
  bench->add_option("--trials", bench_trials, "Timed solves per (N_T, method)")->check(CLI::PositiveNumber);
  bench->add_option("--seed", seed, "Base seed");
  bench->add_option("--out", out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);
    wpsec::RunOptions options;
    options.solver_tol = tol;

    if (*run) {
      const auto config = wpsec::load_config(config_file);
      const auto rows = wpsec::run_scenario(config, options);
      wpsec::write_outputs(out_dir, config, rows);
      const auto summary = wpsec::summarize(rows);
      std::cout << wpsec::summary_csv(summary);
      std::cout << "wrote " << rows.size() << " rows to " << out_dir << "\n";
    } else if (*fig) {
      if (figure == "fig6") {
        // The runtime figure comes from the benchmark.
        const auto report = wpsec::benchmark_runtime(parse_nt(nt), bench_trials, seed);
        std::filesystem::create_directories(out_dir);
        write_text(std::filesystem::path(out_dir) / "fig6_runtime.csv", report.csv());
        write_text(std::filesystem::path(out_dir) / "fig6_verdict.txt", report.report_text());
        std::cout << report.report_text();
        return 0;
      }
      const auto report = wpsec::reproduce_figure(figure, trials, seed, options);
      wpsec::write_figure(out_dir, report);
      std::cout << report.report_text();
      return report.pass() ? 0 : 2;
    } else if (*bench) {
      omp_set_num_threads(1);
      const auto report = wpsec::benchmark_runtime(parse_nt(nt), bench_trials, seed);
      std::filesystem::create_directories(out_dir);
      write_text(std::filesystem::path(out_dir) / "runtime.csv", report.csv());
      write_text(std::filesystem::path(out_dir) / "runtime_verdict.txt", report.report_text());
      std::cout << report.report_text();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

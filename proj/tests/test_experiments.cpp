#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "wpsec/experiments.hpp"

using namespace wpsec;

namespace {

ScenarioConfig small_power() {
  ScenarioConfig c;
  c.id = "small";
  c.trials = 3;
  c.seed = 10;
  c.system.K = 1;
  c.system.L = 2;
  c.system.N_T = 4;
  c.sweep = SweepVar::d_PB;
  c.grid = {4.0, 6.0};
  c.methods = {"socp", "sca"};
  c.solver.theta_tol = 1e-3;
  return c;
}

ScenarioConfig small_game() {
  ScenarioConfig c;
  c.id = "game";
  c.trials = 2;
  c.system.M = 2;
  c.game = GameScalars{};
  c.sweep = SweepVar::M;
  c.grid = {1.0, 3.0};
  c.methods = {"game"};
  c.solver.theta_grid = 20;
  c.solver.game_theta_tol = 1e-4;
  return c;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string mask_time(const std::vector<TrialRow>& rows) {
  auto copy = rows;
  for (auto& r : copy) r.wall_time_ms = 0.0;
  return to_csv(copy);
}

}  // namespace

TEST_CASE("config parsing fills defaults and round-trips") {
  const auto c = parse_config("id: x\nsweep: {variable: d_PB, grid: [5]}\n");
  CHECK(c.system.N_T == 8);
  CHECK(c.system.L == 5);
  CHECK(c.pathloss.alpha == 3.0);
  CHECK(c.trials == 200);
  const auto shipped = load_config(std::filesystem::path(WPSEC_SOURCE_DIR) / "configs/power_vs_distance.yaml");
  CHECK(shipped.grid == std::vector<double>{4, 5, 6, 7});
  const auto again = parse_config(to_yaml(shipped));
  CHECK(to_yaml(again) == to_yaml(shipped));
  const auto game = load_config(std::filesystem::path(WPSEC_SOURCE_DIR) / "configs/game_vs_beacons.yaml");
  REQUIRE(game.game.has_value());
  CHECK(to_yaml(parse_config(to_yaml(game))) == to_yaml(game));
  CHECK(to_yaml(shipped).find("0.050000000000000003") == std::string::npos);
}

TEST_CASE("config validation errors") {
  const std::string base = "id: x\nsweep: {variable: d_PB, grid: [5]}\n";
  CHECK_THROWS_AS(parse_config(base + "bogus: 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(base + "system: {NT: 8}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("id: x\nsweep: {variable: d_PB, grid: []}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("id: x\nsweep: {variable: d_PB, grid: [5, 4]}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("id: x\nsweep: {variable: d_PB, grid: [0]}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("id: x\nsweep: {variable: distance, grid: [5]}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(base + "methods: [newton]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(base + "trials: 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(base + "methods: [game]\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("id: x\nsweep: {variable: lambda, grid: [1]}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("id: x\nsweep: {variable: M, grid: [1.5]}\nmethods: [game]\ngame: {}\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(base + "system: {xi: 2}\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(base + "solver: {fixed_theta: 1}\n"), std::invalid_argument);
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), std::runtime_error);
}

TEST_CASE("one row per trial, sweep value and method") {
  auto c = small_power();
  c.trials = 2;
  c.grid = {5.0};
  c.methods = {"socp"};
  const auto rows = run_scenario(c);
  CHECK(rows.size() == 2);
  const auto big = run_scenario(small_power());
  CHECK(big.size() == 3 * 2 * 2);
  for (const auto& r : big) {
    CHECK(r.ok());
    CHECK(r.wall_time_ms > 0.0);
  }
}

TEST_CASE("runs are deterministic and order independent") {
  const auto c = small_power();
  RunOptions serial;
  serial.parallel = false;
  const auto a = run_scenario(c);
  const auto b = run_scenario(c);
  const auto s = run_scenario(c, serial);
  CHECK(mask_time(a) == mask_time(b));
  CHECK(mask_time(a) == mask_time(s));
  const auto g = small_game();
  CHECK(mask_time(run_scenario(g)) == mask_time(run_scenario(g, serial)));
}

TEST_CASE("power rows grow with beacon distance") {
  const auto rows = run_scenario(small_power());
  std::map<std::pair<std::uint64_t, std::string>, std::map<double, double>> by;
  for (const auto& r : rows) by[{r.seed, r.method}][r.sweep_value] = r.P_opt;
  for (const auto& [k, pts] : by) {
    CHECK(pts.at(6.0) / pts.at(4.0) == doctest::Approx(std::pow(1.5, 3.0)).epsilon(1e-3));
  }
}

TEST_CASE("game rows carry the equilibrium fields") {
  for (const auto& r : run_scenario(small_game())) {
    REQUIRE(r.ok());
    CHECK(r.theta_opt > 0.0);
    CHECK(r.theta_opt < 1.0);
    CHECK(r.lambda_opt >= 0.0);
    CHECK(r.P_opt >= 0.0);
    CHECK(r.U_PB_total >= 0.0);
  }
}

TEST_CASE("failed trials are recorded and the run continues") {
  auto c = small_power();
  c.system.K = 3;
  c.methods = {"closed_form", "sca"};
  const auto rows = run_scenario(c);
  int errors = 0, ok = 0;
  for (const auto& r : rows) {
    if (r.method == "closed_form") {
      CHECK(r.status == "error");
      ++errors;
    } else {
      CHECK(r.ok());
      ++ok;
    }
  }
  CHECK(errors == 6);
  CHECK(ok == 6);
  const auto summary = summarize(rows);
  for (const auto& s : summary) {
    if (s.method == "closed_form") CHECK(s.n_ok == 0);
  }
}

TEST_CASE("CSV round trip") {
  const auto rows = run_scenario(small_power());
  const auto text = to_csv(rows);
  CHECK(text.substr(0, text.find('\n')) == csv_header());
  const auto back = parse_trial_csv(text);
  REQUIRE(back.size() == rows.size());
  CHECK(to_csv(back) == text);
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i].P_opt == rows[i].P_opt);

  TrialRow odd;
  odd.scenario = "a,\"b\"";
  odd.method = "sca";
  odd.status = "ok";
  const auto one = parse_trial_csv(to_csv({odd}));
  REQUIRE(one.size() == 1);
  CHECK(one[0].scenario == odd.scenario);
  CHECK_THROWS_AS(parse_trial_csv("scenario,seed\nx,1\n"), std::runtime_error);
}

TEST_CASE("summary matches an independent two-pass aggregation") {
  auto rows = run_scenario(small_power());
  rows[0].status = "failed";
  const auto summary = summarize(rows);
  std::map<std::tuple<std::string, double, std::string>, std::vector<double>> groups;
  std::map<std::tuple<std::string, double, std::string>, int> counts;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.scenario, r.sweep_value, r.method);
    ++counts[key];
    if (r.ok()) groups[key].push_back(r.P_opt);
  }
  REQUIRE(summary.size() == counts.size());
  for (const auto& s : summary) {
    const auto key = std::make_tuple(s.scenario, s.sweep_value, s.method);
    const auto& v = groups[key];
    CHECK(s.n == counts[key]);
    CHECK(s.n_ok == static_cast<int>(v.size()));
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    CHECK(s.P_opt.mean == doctest::Approx(mean).epsilon(1e-12));
    if (v.size() > 1) CHECK(s.P_opt.std == doctest::Approx(std::sqrt(ss / (v.size() - 1))).epsilon(1e-9));
  }
  const auto text = summary_csv(summary);
  CHECK(text.rfind("scenario,sweep_value,method,n,n_ok,objective_mean,objective_std", 0) == 0);
}

TEST_CASE("outputs on disk") {
  const auto dir = std::filesystem::temp_directory_path() / "wpsec_test_outputs";
  std::filesystem::remove_all(dir);
  const auto c = small_power();
  const auto rows = run_scenario(c);
  write_outputs(dir, c, rows);
  CHECK(read_file(dir / "trials.csv") == to_csv(rows));
  CHECK(read_file(dir / "summary.csv") == summary_csv(summarize(rows)));
  const auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
  CHECK(m.at("trial_schema") == kTrialSchema);
  CHECK(m.at("summary_schema") == kSummarySchema);
  CHECK(m.at("rows") == rows.size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("trend verdicts") {
  const std::vector<double> x{1, 2, 3};
  const std::vector<int> n{100, 100, 100};
  CHECK(trend_verdict("up", x, {{1, 1}, {2, 1}, {3, 1}}, n, Direction::increasing, true).pass);
  CHECK_FALSE(trend_verdict("up", x, {{1, 1}, {0, 1}, {3, 1}}, n, Direction::increasing, true).pass);
  // A dip smaller than the standard error of the difference is tolerated.
  CHECK(trend_verdict("up", x, {{1, 1}, {0.95, 1}, {3, 1}}, n, Direction::increasing, true).pass);
  CHECK(trend_verdict("down", x, {{3, 0}, {2, 0}, {1, 0}}, n, Direction::decreasing, true).pass);
  CHECK_FALSE(trend_verdict("flat", x, {{1, 0}, {1, 0}, {1, 0}}, n, Direction::increasing, true).pass);
  CHECK(trend_verdict("flat", x, {{1, 0}, {1, 0}, {1, 0}}, n, Direction::increasing, false).pass);
  CHECK_FALSE(trend_verdict("one", {1}, {{1, 0}}, {1}, Direction::increasing, false).pass);
}

TEST_CASE("figure catalogue") {
  const auto names = figure_names();
  CHECK(names.size() == 11);
  CHECK_THROWS_AS(figure_series("fig1", 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(reproduce_figure("fig13", 1, 1), std::invalid_argument);
  for (const auto& n : names) {
    if (n == "fig6") continue;
    for (const auto& c : figure_series(n, 2, 1)) CHECK_NOTHROW(c.validate());
  }
  const auto fig5 = reproduce_figure("fig5", 2, 1);
  CHECK(fig5.pass());
  CHECK(fig5.report_text().find("overall: PASS") != std::string::npos);
}

TEST_CASE("runtime benchmark table") {
  const auto r = benchmark_runtime({4, 5}, 2, 1);
  CHECK(r.table.size() == 2 * 3);
  for (const auto& row : r.table) {
    CHECK(row.trials == 2);
    CHECK(row.median_ms > 0.0);
  }
  CHECK(r.csv().rfind("N_T,method,trials,ok,median_ms", 0) == 0);
  CHECK_THROWS_AS(benchmark_runtime({3}, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(benchmark_runtime({13}, 1, 1), std::invalid_argument);
}

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <yaml-cpp/yaml.h>

#include "wpsec/experiments.hpp"

namespace wpsec {

namespace {

const std::set<std::string> kMethods{"socp", "sdp", "sca", "closed_form", "sca_fixed_theta", "game"};

void reject_unknown(const YAML::Node& node, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!node.IsMap()) throw std::invalid_argument(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
  }
}

// Shortest round-trip text, so 0.05 is written as 0.05.
std::string shortest(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

}  // namespace

const char* to_string(SweepVar v) {
  switch (v) {
    case SweepVar::d_PB: return "d_PB";
    case SweepVar::N_T: return "N_T";
    case SweepVar::M: return "M";
    case SweepVar::lambda: return "lambda";
    case SweepVar::theta: return "theta";
    case SweepVar::mu: return "mu";
  }
  return "unknown";
}

SweepVar parse_sweep_var(std::string_view name) {
  for (auto v : {SweepVar::d_PB, SweepVar::N_T, SweepVar::M, SweepVar::lambda, SweepVar::theta,
                 SweepVar::mu}) {
    if (name == to_string(v)) return v;
  }
  throw std::invalid_argument("unknown sweep variable '" + std::string(name) + "'");
}

void ScenarioConfig::validate() const {
  if (id.empty()) throw std::invalid_argument("config: empty id");
  system.validate();
  pathloss.validate();
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (grid.empty()) throw std::invalid_argument("config: sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i - 1] < grid[i])) throw std::invalid_argument("config: sweep grid must be strictly increasing");
  }
  if (methods.empty()) throw std::invalid_argument("config: no methods");
  bool uses_game = false;
  for (const auto& m : methods) {
    if (!kMethods.count(m)) throw std::invalid_argument("config: unknown method '" + m + "'");
    uses_game = uses_game || m == "game";
  }
  const bool game_sweep = sweep == SweepVar::lambda || sweep == SweepVar::theta || sweep == SweepVar::mu;
  if (game_sweep && !uses_game) {
    throw std::invalid_argument(std::string("config: sweeping ") + to_string(sweep) + " needs the game method");
  }
  if (uses_game) {
    if (!game) throw std::invalid_argument("config: the game method needs a game section");
    if (!(game->mu > 0.0 && game->A > 0.0 && game->B > 0.0)) {
      throw std::invalid_argument("config: game mu, A and B must be > 0");
    }
    if (!(game->theta > 0.0 && game->theta < 1.0)) throw std::invalid_argument("config: game theta outside (0,1)");
  }
  for (double v : grid) {
    switch (sweep) {
      case SweepVar::d_PB:
        if (!(v > 0.0)) throw std::invalid_argument("config: d_PB grid must be > 0");
        break;
      case SweepVar::N_T:
      case SweepVar::M:
        if (!(v >= 1.0) || v != static_cast<int>(v)) {
          throw std::invalid_argument("config: N_T and M grids must be positive integers");
        }
        break;
      case SweepVar::lambda:
        if (!(v >= 0.0)) throw std::invalid_argument("config: lambda grid must be >= 0");
        break;
      case SweepVar::theta:
        if (!(v > 0.0 && v < 1.0)) throw std::invalid_argument("config: theta grid outside (0,1)");
        break;
      case SweepVar::mu:
        if (!(v > 0.0)) throw std::invalid_argument("config: mu grid must be > 0");
        break;
    }
  }
  if (!(solver.theta_tol > 0.0 && solver.game_theta_tol > 0.0)) {
    throw std::invalid_argument("config: tolerances must be > 0");
  }
  if (solver.theta_grid < 3) throw std::invalid_argument("config: theta_grid must be >= 3");
  if (!(solver.fixed_theta > 0.0 && solver.fixed_theta < 1.0)) {
    throw std::invalid_argument("config: fixed_theta outside (0,1)");
  }
}

ScenarioConfig parse_config(const std::string& yaml_text) {
  const YAML::Node root = YAML::Load(yaml_text);
  reject_unknown(root, {"id", "seed", "trials", "methods", "system", "pathloss", "game", "sweep", "solver"},
                 "config");
  ScenarioConfig c;
  read(root, "id", c.id);
  read(root, "seed", c.seed);
  read(root, "trials", c.trials);
  if (root["methods"]) c.methods = root["methods"].as<std::vector<std::string>>();

  if (const auto s = root["system"]) {
    reject_unknown(s, {"N_T", "K", "L", "M", "xi", "T", "P_max", "R_bar", "sigma_s2", "sigma_e2"}, "system");
    read(s, "N_T", c.system.N_T);
    read(s, "K", c.system.K);
    read(s, "L", c.system.L);
    read(s, "M", c.system.M);
    read(s, "xi", c.system.xi);
    read(s, "T", c.system.T);
    read(s, "P_max", c.system.P_max);
    read(s, "R_bar", c.system.R_bar);
    read(s, "sigma_s2", c.system.sigma_s2);
    read(s, "sigma_e2", c.system.sigma_e2);
  }
  if (const auto p = root["pathloss"]) {
    reject_unknown(p, {"A", "alpha", "d_s", "d_e", "d_PB"}, "pathloss");
    read(p, "A", c.pathloss.A);
    read(p, "alpha", c.pathloss.alpha);
    read(p, "d_s", c.pathloss.d_s);
    read(p, "d_e", c.pathloss.d_e);
    read(p, "d_PB", c.pathloss.d_PB);
  }
  if (const auto g = root["game"]) {
    reject_unknown(g, {"mu", "A", "B", "theta"}, "game");
    GameScalars gs;
    read(g, "mu", gs.mu);
    read(g, "A", gs.A);
    read(g, "B", gs.B);
    read(g, "theta", gs.theta);
    c.game = gs;
  }
  if (const auto s = root["sweep"]) {
    reject_unknown(s, {"variable", "grid"}, "sweep");
    if (s["variable"]) c.sweep = parse_sweep_var(s["variable"].as<std::string>());
    if (s["grid"]) c.grid = s["grid"].as<std::vector<double>>();
  }
  if (const auto s = root["solver"]) {
    reject_unknown(s, {"theta_tol", "theta_grid", "game_theta_tol", "fixed_theta", "solver_tol",
                       "randomizations", "rank_threshold", "sca_max_iter", "sca_rel_tol", "sca_starts"},
                   "solver");
    read(s, "theta_tol", c.solver.theta_tol);
    read(s, "theta_grid", c.solver.theta_grid);
    read(s, "game_theta_tol", c.solver.game_theta_tol);
    read(s, "fixed_theta", c.solver.fixed_theta);
    read(s, "solver_tol", c.solver.inner.solver_tol);
    read(s, "randomizations", c.solver.inner.randomizations);
    read(s, "rank_threshold", c.solver.inner.rank_threshold);
    read(s, "sca_max_iter", c.solver.inner.sca_max_iter);
    read(s, "sca_rel_tol", c.solver.inner.sca_rel_tol);
    read(s, "sca_starts", c.solver.inner.sca_starts);
  }
  c.validate();
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "id" << YAML::Value << c.id;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::Key << "trials" << YAML::Value << c.trials;
  out << YAML::Key << "methods" << YAML::Value << YAML::Flow << c.methods;
  out << YAML::Key << "system" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "N_T" << YAML::Value << c.system.N_T;
  out << YAML::Key << "K" << YAML::Value << c.system.K;
  out << YAML::Key << "L" << YAML::Value << c.system.L;
  out << YAML::Key << "M" << YAML::Value << c.system.M;
  out << YAML::Key << "xi" << YAML::Value << shortest(c.system.xi);
  out << YAML::Key << "T" << YAML::Value << shortest(c.system.T);
  out << YAML::Key << "P_max" << YAML::Value << shortest(c.system.P_max);
  out << YAML::Key << "R_bar" << YAML::Value << shortest(c.system.R_bar);
  out << YAML::Key << "sigma_s2" << YAML::Value << shortest(c.system.sigma_s2);
  out << YAML::Key << "sigma_e2" << YAML::Value << shortest(c.system.sigma_e2);
  out << YAML::EndMap;
  out << YAML::Key << "pathloss" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "A" << YAML::Value << shortest(c.pathloss.A);
  out << YAML::Key << "alpha" << YAML::Value << shortest(c.pathloss.alpha);
  out << YAML::Key << "d_s" << YAML::Value << shortest(c.pathloss.d_s);
  out << YAML::Key << "d_e" << YAML::Value << shortest(c.pathloss.d_e);
  out << YAML::Key << "d_PB" << YAML::Value << shortest(c.pathloss.d_PB);
  out << YAML::EndMap;
  if (c.game) {
    out << YAML::Key << "game" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "mu" << YAML::Value << shortest(c.game->mu);
    out << YAML::Key << "A" << YAML::Value << shortest(c.game->A);
    out << YAML::Key << "B" << YAML::Value << shortest(c.game->B);
    out << YAML::Key << "theta" << YAML::Value << shortest(c.game->theta);
    out << YAML::EndMap;
  }
  std::vector<std::string> grid_text;
  for (double v : c.grid) grid_text.push_back(shortest(v));
  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "variable" << YAML::Value << to_string(c.sweep);
  out << YAML::Key << "grid" << YAML::Value << YAML::Flow << grid_text;
  out << YAML::EndMap;
  out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta_tol" << YAML::Value << shortest(c.solver.theta_tol);
  out << YAML::Key << "theta_grid" << YAML::Value << c.solver.theta_grid;
  out << YAML::Key << "game_theta_tol" << YAML::Value << shortest(c.solver.game_theta_tol);
  out << YAML::Key << "fixed_theta" << YAML::Value << shortest(c.solver.fixed_theta);
  out << YAML::Key << "solver_tol" << YAML::Value << shortest(c.solver.inner.solver_tol);
  out << YAML::Key << "randomizations" << YAML::Value << c.solver.inner.randomizations;
  out << YAML::Key << "rank_threshold" << YAML::Value << shortest(c.solver.inner.rank_threshold);
  out << YAML::Key << "sca_max_iter" << YAML::Value << c.solver.inner.sca_max_iter;
  out << YAML::Key << "sca_rel_tol" << YAML::Value << shortest(c.solver.inner.sca_rel_tol);
  out << YAML::Key << "sca_starts" << YAML::Value << c.solver.inner.sca_starts;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace wpsec

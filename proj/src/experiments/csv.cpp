#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "wpsec/experiments.hpp"

namespace wpsec {

namespace {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::runtime_error("csv: bad number '" + s + "'");
  }
  return v;
}

struct Welford {
  int n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  Stat stat() const { return {mean, n > 1 ? std::sqrt(m2 / (n - 1)) : 0.0}; }
};

}  // namespace

std::vector<std::string> trial_fields() {
  return {"scenario", "seed",  "sweep_value", "method",        "objective",  "P_opt",        "theta_opt",
          "lambda_opt", "U_M", "U_PB_total",  "achieved_rate", "iterations", "wall_time_ms", "status"};
}

std::string csv_header() {
  std::string h;
  for (const auto& f : trial_fields()) h += (h.empty() ? "" : ",") + f;
  return h;
}

std::string to_csv_line(const TrialRow& r) {
  std::string s;
  s += quote(r.scenario) + ',' + std::to_string(r.seed) + ',' + num(r.sweep_value) + ',' + quote(r.method);
  for (double v : {r.objective, r.P_opt, r.theta_opt, r.lambda_opt, r.U_M, r.U_PB_total, r.achieved_rate}) {
    s += ',' + num(v);
  }
  s += ',' + std::to_string(r.iterations) + ',' + num(r.wall_time_ms) + ',' + quote(r.status);
  return s;
}

std::string to_csv(const std::vector<TrialRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += to_csv_line(r) + "\n";
  return out;
}

std::vector<TrialRow> parse_trial_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != csv_header()) throw std::runtime_error("csv: header mismatch");
  std::vector<TrialRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_line(line);
    if (f.size() != trial_fields().size()) throw std::runtime_error("csv: wrong field count");
    TrialRow r;
    r.scenario = f[0];
    r.seed = parse_number<std::uint64_t>(f[1]);
    r.sweep_value = parse_number<double>(f[2]);
    r.method = f[3];
    r.objective = parse_number<double>(f[4]);
    r.P_opt = parse_number<double>(f[5]);
    r.theta_opt = parse_number<double>(f[6]);
    r.lambda_opt = parse_number<double>(f[7]);
    r.U_M = parse_number<double>(f[8]);
    r.U_PB_total = parse_number<double>(f[9]);
    r.achieved_rate = parse_number<double>(f[10]);
    r.iterations = parse_number<int>(f[11]);
    r.wall_time_ms = parse_number<double>(f[12]);
    r.status = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

void sort_rows(std::vector<TrialRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const TrialRow& a, const TrialRow& b) {
    return std::tie(a.scenario, a.sweep_value, a.method, a.seed) <
           std::tie(b.scenario, b.sweep_value, b.method, b.seed);
  });
}

std::vector<SummaryRow> summarize(const std::vector<TrialRow>& rows) {
  struct Acc {
    int n = 0;
    Welford objective, P_opt, theta_opt, lambda_opt, U_M, U_PB_total, achieved_rate, wall_time_ms;
  };
  std::map<std::tuple<std::string, double, std::string>, Acc> groups;
  for (const auto& r : rows) {
    auto& a = groups[{r.scenario, r.sweep_value, r.method}];
    ++a.n;
    if (!r.ok()) continue;
    a.objective.add(r.objective);
    a.P_opt.add(r.P_opt);
    a.theta_opt.add(r.theta_opt);
    a.lambda_opt.add(r.lambda_opt);
    a.U_M.add(r.U_M);
    a.U_PB_total.add(r.U_PB_total);
    a.achieved_rate.add(r.achieved_rate);
    a.wall_time_ms.add(r.wall_time_ms);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, a] : groups) {
    SummaryRow s;
    std::tie(s.scenario, s.sweep_value, s.method) = key;
    s.n = a.n;
    s.n_ok = a.objective.n;
    s.objective = a.objective.stat();
    s.P_opt = a.P_opt.stat();
    s.theta_opt = a.theta_opt.stat();
    s.lambda_opt = a.lambda_opt.stat();
    s.U_M = a.U_M.stat();
    s.U_PB_total = a.U_PB_total.stat();
    s.achieved_rate = a.achieved_rate.stat();
    s.wall_time_ms = a.wall_time_ms.stat();
    out.push_back(std::move(s));
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& summary) {
  std::string out = "scenario,sweep_value,method,n,n_ok";
  for (const char* f : {"objective", "P_opt", "theta_opt", "lambda_opt", "U_M", "U_PB_total", "achieved_rate",
                        "wall_time_ms"}) {
    out += std::string(",") + f + "_mean," + f + "_std";
  }
  out += "\n";
  for (const auto& s : summary) {
    out += quote(s.scenario) + ',' + num(s.sweep_value) + ',' + quote(s.method) + ',' + std::to_string(s.n) +
           ',' + std::to_string(s.n_ok);
    for (const Stat& st : {s.objective, s.P_opt, s.theta_opt, s.lambda_opt, s.U_M, s.U_PB_total,
                           s.achieved_rate, s.wall_time_ms}) {
      out += ',' + num(st.mean) + ',' + num(st.std);
    }
    out += "\n";
  }
  return out;
}

}  // namespace wpsec

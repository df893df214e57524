// Serial reference vs OpenMP kernels. Arg 0 runs the serial path, 1 the
// parallel one.

#include <benchmark/benchmark.h>

#include "wpsec/channels.hpp"
#include "wpsec/game.hpp"
#include "wpsec/inner_problem.hpp"
#include "wpsec/powermin.hpp"

using namespace wpsec;

namespace {

ChannelSet channels(int N_T, int K, int L, std::uint64_t seed) {
  SystemParams p;
  p.N_T = N_T;
  p.K = K;
  p.L = L;
  return sample_channels(p, PathLossModel{}, seed);
}

void BM_GuidedRandomization(benchmark::State& state) {
  const auto ch = channels(8, 3, 5, 42);
  const double theta = 0.5;
  InnerOptions opts;
  opts.randomizations = 0;
  const auto sdp = solve_inner_sdp(ch, theta, 2.0, opts).first;
  const auto p = InnerProblem::make(ch, theta, 2.0);
  const Eigen::MatrixXcd Q = sdp.Q_s * (p.gamma * p.gamma);
  const bool parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(guided_randomization(p, Q, 2000, 7, parallel));
  }
}
BENCHMARK(BM_GuidedRandomization)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ScaMultistart(benchmark::State& state) {
  const auto ch = channels(8, 3, 5, 43);
  InnerOptions opts;
  opts.sca_starts = 8;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_inner_sca(ch, 0.5, 2.0, std::nullopt, opts));
  }
}
BENCHMARK(BM_ScaMultistart)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ThetaGrid(benchmark::State& state) {
  SystemParams sp;
  sp.M = 5;
  GameParams g;
  g.channels = sample_channels(sp, PathLossModel{}, 44);
  g.A = Eigen::VectorXd::Constant(5, 0.05);
  g.B = Eigen::VectorXd::Constant(5, 0.05);
  const Eigen::VectorXcd v = *zero_forcing_direction(g.channels.h_s, g.channels.h_e);
  ThetaSearchOptions opts;
  opts.parallel = state.range(0) != 0;
  const auto f = [&](double theta) { return price_equilibrium(g, theta, v).U_M; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(maximize_over_theta(f, opts));
  }
}
BENCHMARK(BM_ThetaGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

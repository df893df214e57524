#include <cmath>
#include <limits>
#include <string>

#include "wpsec/conic/model.hpp"
#include "wpsec/inner_problem.hpp"
#include "wpsec/powermin.hpp"
#include "wpsec/rng.hpp"

namespace wpsec {

using conic::AffineRow;
using conic::ComplexAffineRow;
using conic::ComplexVar;

namespace {

Eigen::Vector2d q_of(const InnerProblem& p, int k, const Eigen::VectorXcd& x) {
  const std::complex<double> v = x.dot(p.a[static_cast<std::size_t>(k)]);  // x^H a_k
  return {v.real(), v.imag()};
}

std::optional<Eigen::VectorXcd> scaled(const InnerProblem& p, const Eigen::VectorXcd& dir) {
  const auto s = p.feasibility_scale(dir);
  if (!s) return std::nullopt;
  return Eigen::VectorXcd((*s) * dir);
}

struct Run {
  Eigen::VectorXcd x;
  SCAState state;
  std::string note;
  double power() const { return state.obj_history.back(); }
};

// Algorithm body from one feasible starting point x0 (x units).
Run run_sca(const InnerProblem& p, const Eigen::VectorXcd& x0, const InnerOptions& options) {
  const int N = p.N;
  const int K = p.K;
  const int nv = 1 + 2 * N + K;
  const ComplexVar xv{1, 1 + N, N, nv};
  const double sqrt_rf = std::sqrt(p.rate_factor);
  const AffineRow noise = AffineRow::constant_row(std::sqrt(p.c0), nv);
  const AffineRow one = AffineRow::constant_row(1.0, nv);
  const double g2 = p.gamma * p.gamma;

  Run run;
  run.x = x0;
  SCAState& state = run.state;
  state.obj_history.push_back(x0.squaredNorm() / g2);
  state.u.assign(static_cast<std::size_t>(K), Eigen::Vector2d::Zero());

  for (int n = 1; n <= options.sca_max_iter; ++n) {
    for (int k = 0; k < K; ++k) state.u[static_cast<std::size_t>(k)] = q_of(p, k, run.x);

    conic::ConeModel model(nv);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(nv);
    f(0) = 1.0;
    model.minimize(f);
    std::vector<ComplexAffineRow> entries;
    for (int i = 0; i < N; ++i) entries.push_back(xv.entry(i));
    model.add_second_order(conic::embed_complex_soc(AffineRow::variable(0, nv), entries));

    for (int k = 0; k < K; ++k) {
      const Eigen::Vector2d& u = state.u[static_cast<std::size_t>(k)];
      const ComplexAffineRow gain = xv.inner_with(p.a[static_cast<std::size_t>(k)]);
      const AffineRow bk = AffineRow::variable(1 + 2 * N + k, nv);
      // First-order lower bound of |x^H a_k|^2 at u, kept above b_k.
      const AffineRow lin = (2.0 * u(0)) * gain.real() + (2.0 * u(1)) * gain.imag() +
                            AffineRow::constant_row(-u.squaredNorm(), nv) + (-1.0) * bk;
      model.add_nonnegative({lin});
      // c0 + 2^Rbb |e_l^H x|^2 <= b_k as a rotated cone.
      const AffineRow head = 0.5 * (bk + one);
      const AffineRow tail = 0.5 * (bk + (-1.0) * one);
      for (const auto& el : p.e) {
        ComplexAffineRow leak = xv.inner_with(el);
        leak.coeffs *= sqrt_rf;
        model.add_second_order(conic::embed_complex_soc(head, {leak}, {noise, tail}));
      }
    }

    const auto res = model.solve({options.solver_tol, 100});
    if (!res.raw.usable()) {
      run.note = "subproblem " + std::to_string(n) + ": " + conic::to_string(res.raw.status);
      break;
    }
    // Iterates are feasible up to solver tolerance; the rescale makes them
    // exactly feasible.
    const auto polished = scaled(p, xv.extract(res.y));
    if (!polished) {
      run.note = "subproblem " + std::to_string(n) + " returned an infeasible point";
      break;
    }
    run.x = *polished;
    state.n = n;
    state.b.assign(static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) state.b[static_cast<std::size_t>(k)] = res.y(1 + 2 * N + k);
    const double prev = state.obj_history.back();
    const double obj = run.x.squaredNorm() / g2;
    state.obj_history.push_back(obj);
    if (std::abs(prev - obj) <= options.sca_rel_tol * prev) {
      state.converged = true;
      break;
    }
  }
  state.q.clear();
  for (int k = 0; k < K; ++k) state.q.push_back(q_of(p, k, run.x));
  return run;
}

std::vector<Eigen::VectorXcd> fallback_starts(const ChannelSet& channels, const InnerProblem& p,
                                              double theta, double R_bar,
                                              const InnerOptions& options,
                                              bool& relaxation_infeasible) {
  auto [sdp, r] = solve_inner_sdp(channels, theta, R_bar, options);
  if (r.ok()) return {Eigen::VectorXcd(p.gamma * r.w)};
  if (r.status == BeamStatus::infeasible) {
    relaxation_infeasible = true;
    return {};
  }
  std::optional<Eigen::VectorXcd> best;
  for (int i = 0; i < 20; ++i) {
    Philox4x32 rng(options.randomization_seed ^ 0x5ca0000ULL, static_cast<std::uint64_t>(i));
    Eigen::VectorXcd d(p.N);
    for (int j = 0; j < p.N; ++j) d(j) = rng.complex_normal();
    d.normalize();
    if (auto x = scaled(p, d)) {
      if (!best || x->squaredNorm() < best->squaredNorm()) best = x;
    }
  }
  if (best) return {*best};
  return {};
}

}  // namespace

std::pair<BeamformerResult, SCAState> solve_inner_sca(const ChannelSet& channels, double theta,
                                                      double R_bar,
                                                      const std::optional<Eigen::VectorXcd>& init,
                                                      const InnerOptions& options) {
  const InnerProblem p = InnerProblem::make(channels, theta, R_bar);
  if (!p.representable()) return {p.infeasible(InnerMethod::sca, "rate target overflows"), {}};

  std::vector<Eigen::VectorXcd> starts;
  if (init && init->size() == p.N) {
    if (auto x = scaled(p, *init)) starts.push_back(*x);
  }
  if (starts.empty()) {
    for (const auto& d : zero_forcing_candidates(p.a, p.e, std::max(1, options.sca_starts),
                                                 options.randomization_seed ^ 0x2f0ULL)) {
      if (auto x = scaled(p, d)) starts.push_back(*x);
    }
  }
  bool relaxation_infeasible = false;
  if (starts.empty()) {
    starts = fallback_starts(channels, p, theta, R_bar, options, relaxation_infeasible);
  }
  if (starts.empty()) {
    if (relaxation_infeasible) return {p.infeasible(InnerMethod::sca, "relaxation infeasible"), {}};
    BeamformerResult r;
    r.method = InnerMethod::sca;
    r.theta = theta;
    r.message = "no feasible initial point";
    return {r, {}};
  }

  const int S = static_cast<int>(starts.size());
  std::vector<Run> runs(static_cast<std::size_t>(S));
#pragma omp parallel for schedule(dynamic) if (options.parallel && S > 1)
  for (int i = 0; i < S; ++i) runs[static_cast<std::size_t>(i)] = run_sca(p, starts[static_cast<std::size_t>(i)], options);

  std::size_t best = 0;
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].power() < runs[best].power()) best = i;
  }
  Run& win = runs[best];
  BeamformerResult r = p.finalize(win.x, InnerMethod::sca, win.state.n, channels);
  if (!win.note.empty()) r.message = win.note;
  return {r, std::move(win.state)};
}

}  // namespace wpsec

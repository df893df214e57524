#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wpsec/conic/solver.hpp"
#include "wpsec/inner_problem.hpp"
#include "wpsec/powermin.hpp"
#include "wpsec/rng.hpp"

namespace wpsec {

namespace {

// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian H.
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& H) {
  const auto n = H.rows();
  Eigen::MatrixXd X(2 * n, 2 * n);
  X.topLeftCorner(n, n) = H.real();
  X.topRightCorner(n, n) = -H.imag();
  X.bottomLeftCorner(n, n) = H.imag();
  X.bottomRightCorner(n, n) = H.real();
  return X;
}

struct Candidate {
  double power = std::numeric_limits<double>::infinity();
  int index = std::numeric_limits<int>::max();
  int feasible = 0;
};

// Lower power wins; ties go to the lower index so the reduction order does
// not matter.
void merge(Candidate& into, const Candidate& other) {
  into.feasible += other.feasible;
  if (other.power < into.power || (other.power == into.power && other.index < into.index)) {
    into.power = other.power;
    into.index = other.index;
  }
}

Eigen::VectorXcd draw_candidate(const Eigen::MatrixXcd& factor, std::uint64_t seed, int i) {
  Philox4x32 rng(seed, static_cast<std::uint64_t>(i));
  Eigen::VectorXcd r(factor.cols());
  for (Eigen::Index j = 0; j < r.size(); ++j) r(j) = rng.complex_normal();
  return factor * r;
}

Candidate evaluate(const InnerProblem& p, const Eigen::MatrixXcd& factor, std::uint64_t seed,
                   int i) {
  Candidate c;
  const Eigen::VectorXcd d = draw_candidate(factor, seed, i);
  if (const auto s = p.feasibility_scale(d)) {
    c.power = (*s) * (*s) * d.squaredNorm();
    c.index = i;
    c.feasible = 1;
  }
  return c;
}

}  // namespace

RandomizationOutcome guided_randomization(const InnerProblem& problem, const Eigen::MatrixXcd& Q,
                                          int count, std::uint64_t seed, bool parallel) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Q);
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXcd factor = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  Candidate best;
  const Eigen::VectorXcd principal = eig.eigenvectors().col(Q.rows() - 1);
  if (const auto s = problem.feasibility_scale(principal)) {
    best.power = (*s) * (*s);
    best.index = -1;
    best.feasible = 1;
  }

  if (parallel) {
#pragma omp parallel
    {
      Candidate local;
#pragma omp for schedule(static) nowait
      for (int i = 0; i < count; ++i) merge(local, evaluate(problem, factor, seed, i));
#pragma omp critical(wpsec_randomization)
      merge(best, local);
    }
  } else {
    for (int i = 0; i < count; ++i) merge(best, evaluate(problem, factor, seed, i));
  }

  RandomizationOutcome out;
  out.feasible_count = best.feasible;
  if (!std::isfinite(best.power)) return out;
  out.best_index = best.index;
  const Eigen::VectorXcd d = best.index < 0 ? principal : draw_candidate(factor, seed, best.index);
  const double s = *problem.feasibility_scale(d);
  out.direction = s * d;
  out.power = best.power;
  return out;
}

std::pair<SdpSolution, BeamformerResult> solve_inner_sdp(const ChannelSet& channels,
                                                         double theta, double R_bar,
                                                         const InnerOptions& options) {
  const InnerProblem p = InnerProblem::make(channels, theta, R_bar);
  SdpSolution sdp;
  if (!p.representable()) return {sdp, p.infeasible(InnerMethod::sdp, "rate target overflows")};

  // Power of the best zero-forcing candidate, or c0 without one. The
  // optimum is then of order one in units of this scale.
  double q_scale = std::numeric_limits<double>::infinity();
  for (const auto& d : zero_forcing_candidates(p.a, p.e, 8, options.randomization_seed)) {
    if (const auto t = p.feasibility_scale(d)) q_scale = std::min(q_scale, *t * *t * d.squaredNorm());
  }
  if (!(q_scale > 0.0 && std::isfinite(q_scale))) q_scale = p.c0;

  // Primal standard form over X = real_embedding(Q / q_scale) and one slack
  // per pair:  min tr(Q)  s.t.  tr(A_kl Q) - s_kl = c0,  Q >= 0,  s >= 0.
  const int N = p.N;
  const int n = 2 * N;
  const int sv = conic::svec_size(n);
  const int m = p.K * p.L;
  conic::ConicProblem prob;
  prob.cones = {conic::ConeSpec::psd(n), conic::ConeSpec::nonnegative(m)};
  prob.c = Eigen::VectorXd::Zero(sv + m);
  prob.c.head(sv) = conic::svec(Eigen::MatrixXd::Identity(n, n)) / 2.0;
  prob.A = Eigen::MatrixXd::Zero(m, sv + m);
  prob.b = Eigen::VectorXd::Ones(m);
  int row = 0;
  for (const auto& ak : p.a) {
    for (const auto& el : p.e) {
      const Eigen::MatrixXcd Akl = ak * ak.adjoint() - p.rate_factor * (el * el.adjoint());
      // Rows are normalised; the rate factor can reach 1e4 and above.
      const Eigen::VectorXd arow = conic::svec(real_embedding(Akl)) / 2.0;
      const double scale = arow.norm();
      prob.A.row(row).head(sv) = arow.transpose() / scale;
      prob.A(row, sv + row) = -1.0 / scale;
      prob.b(row) = p.c0 / q_scale / scale;
      ++row;
    }
  }

  const auto sol = conic::solve(prob, {options.solver_tol, 100});
  if (sol.status == conic::SolveStatus::infeasible) {
    return {sdp, p.infeasible(InnerMethod::sdp, "relaxation infeasible")};
  }
  if (!sol.usable()) {
    BeamformerResult r;
    r.method = InnerMethod::sdp;
    r.theta = theta;
    r.iterations = sol.iterations;
    r.message = "conic solver: " + std::string(conic::to_string(sol.status)) + " " + sol.diagnostics;
    return {sdp, r};
  }

  Eigen::MatrixXd X = conic::smat(sol.x.head(sv), n);
  X = (X + X.transpose()) / 2.0;
  Eigen::MatrixXcd Q(N, N);
  Q.real() = (X.topLeftCorner(N, N) + X.bottomRightCorner(N, N)) / 2.0;
  Q.imag() = (X.bottomLeftCorner(N, N) - X.topRightCorner(N, N)) / 2.0;
  Q = (Q + Q.adjoint()).eval() * (q_scale / 2.0);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(Q);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double l1 = lam(N - 1);
  const double l2 = N > 1 ? std::max(0.0, lam(N - 2)) : 0.0;
  sdp.eiggap = l1 > 0.0 ? l2 / l1 : 0.0;
  for (int i = 0; i < N; ++i) {
    if (lam(i) > options.rank_threshold * l1) ++sdp.rank_est;
  }
  const double g2 = p.gamma * p.gamma;
  sdp.Q_s = Q / g2;
  sdp.relaxed_power = Q.trace().real() / g2;
  sdp.relaxed_objective = theta * p.gain_sum / (1.0 - theta) * sdp.relaxed_power;

  if (sdp.eiggap <= options.rank_threshold) {
    sdp.extraction = SdpSolution::Extraction::eigen;
    return {sdp, p.finalize(eig.eigenvectors().col(N - 1), InnerMethod::sdp, sol.iterations, channels)};
  }
  sdp.extraction = SdpSolution::Extraction::randomization;
  const auto rnd = guided_randomization(p, Q, options.randomizations, options.randomization_seed,
                                        options.parallel);
  if (!rnd.direction) {
    BeamformerResult r;
    r.method = InnerMethod::sdp;
    r.theta = theta;
    r.iterations = sol.iterations;
    r.message = "randomisation found no feasible candidate";
    return {sdp, r};
  }
  return {sdp, p.finalize(*rnd.direction, InnerMethod::sdp, sol.iterations, channels)};
}

}  // namespace wpsec

// Homogeneous self-dual primal-dual interior-point method with
// Nesterov-Todd scaling and a Mehrotra predictor-corrector.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "wpsec/conic/cone_ops.hpp"
#include "wpsec/conic/solver.hpp"

namespace wpsec::conic {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::max_iter: return "max_iter";
  }
  return "unknown";
}

bool ConicSolution::usable(double loose_tol) const {
  if (status == SolveStatus::optimal) return true;
  return status == SolveStatus::max_iter && x.size() > 0 && gap <= loose_tol &&
         primal_residual <= loose_tol && dual_residual <= loose_tol;
}

void ConicProblem::validate() const {
  if (cones.empty()) throw std::invalid_argument("ConicProblem: no cones");
  long n = 0;
  for (const auto& k : cones) {
    if (k.dim < 1) throw std::invalid_argument("ConicProblem: cone dim must be >= 1");
    if (k.kind == ConeKind::second_order && k.dim < 2) {
      throw std::invalid_argument("ConicProblem: second-order cone needs dim >= 2");
    }
    n += k.size();
  }
  if (c.size() != n) throw std::invalid_argument("ConicProblem: length of c != cone dimension");
  if (A.cols() != n) throw std::invalid_argument("ConicProblem: columns of A != cone dimension");
  if (A.rows() != b.size()) throw std::invalid_argument("ConicProblem: rows of A != length of b");
  if (!c.allFinite() || !A.allFinite() || !b.allFinite()) {
    throw std::invalid_argument("ConicProblem: non-finite data");
  }
}

namespace {

struct Presolved {
  Eigen::MatrixXd A;  // independent, row-scaled rows
  Eigen::VectorXd b;
  std::vector<int> rows;      // original index of each kept row
  Eigen::VectorXd row_scale;  // A = diag(row_scale) * A_orig(rows, :)
  bool inconsistent = false;
};

Presolved presolve(const ConicProblem& p) {
  Presolved out;
  const Eigen::Index m = p.A.rows();
  const Eigen::Index n = p.A.cols();
  if (m == 0) {
    out.A.resize(0, n);
    out.b.resize(0);
    out.row_scale.resize(0);
    return out;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(p.A.transpose());
  qr.setThreshold(1e-12);
  const Eigen::Index r = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < r; ++i) keep.push_back(perm(i));
  std::sort(keep.begin(), keep.end());
  if (r < m) {
    // Every dropped row is a combination of kept rows; its rhs must agree.
    Eigen::MatrixXd Ak(keep.size(), n);
    Eigen::VectorXd bk(keep.size());
    for (size_t i = 0; i < keep.size(); ++i) {
      Ak.row(static_cast<Eigen::Index>(i)) = p.A.row(keep[i]);
      bk(static_cast<Eigen::Index>(i)) = p.b(keep[i]);
    }
    const auto solver = Ak.transpose().colPivHouseholderQr();
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::binary_search(keep.begin(), keep.end(), static_cast<int>(i))) continue;
      const Eigen::VectorXd coef = solver.solve(p.A.row(i).transpose());
      const double mismatch = std::abs(coef.dot(bk) - p.b(i));
      if (mismatch > 1e-9 * (1.0 + std::abs(p.b(i)) + coef.cwiseAbs().dot(bk.cwiseAbs()))) {
        out.inconsistent = true;
      }
    }
  }
  out.rows = keep;
  out.A.resize(static_cast<Eigen::Index>(keep.size()), n);
  out.b.resize(static_cast<Eigen::Index>(keep.size()));
  out.row_scale.resize(static_cast<Eigen::Index>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double nrm = p.A.row(keep[i]).norm();
    const double s = nrm > 0.0 ? 1.0 / nrm : 1.0;
    out.row_scale(ii) = s;
    out.A.row(ii) = s * p.A.row(keep[i]);
    out.b(ii) = s * p.b(keep[i]);
  }
  return out;
}

// Factorisation of the normal matrix with a regularised fallback.
class NormalSolver {
 public:
  bool factor(const Eigen::MatrixXd& M) {
    m_ = M.rows();
    if (m_ == 0) return true;
    llt_.compute(M);
    use_ldlt_ = false;
    if (llt_.info() == Eigen::Success) return true;
    const double reg = 1e-13 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
    Eigen::MatrixXd Mr = M;
    Mr.diagonal().array() += reg;
    llt_.compute(Mr);
    if (llt_.info() == Eigen::Success) return true;
    ldlt_.compute(Mr);
    use_ldlt_ = true;
    return ldlt_.info() == Eigen::Success;
  }
  Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
    if (m_ == 0) return Eigen::VectorXd(0);
    return use_ldlt_ ? Eigen::VectorXd(ldlt_.solve(r)) : Eigen::VectorXd(llt_.solve(r));
  }

 private:
  Eigen::Index m_ = 0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  bool use_ldlt_ = false;
};

struct Direction {
  Eigen::VectorXd dx, dy, dz;
  Eigen::VectorXd ds_scaled, dz_scaled;  // W^{-T} dx and W dz
  double dtau = 0.0;
  double dkappa = 0.0;
};

}  // namespace

ConicSolution solve(const ConicProblem& problem, double tol, int max_iter) {
  return solve(problem, SolverOptions{tol, max_iter});
}

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options) {
  problem.validate();
  if (!(options.tol > 0.0 && options.tol <= 1e-2)) {
    throw std::invalid_argument("solve: tol must lie in (0, 1e-2]");
  }
  if (options.max_iter < 1) throw std::invalid_argument("solve: max_iter must be >= 1");

  const double tol = options.tol;
  const auto layout = detail::make_layout(problem.cones);
  const Eigen::Index n = problem.c.size();
  const Eigen::Index m_orig = problem.b.size();

  ConicSolution sol;
  const Presolved pre = presolve(problem);
  if (pre.inconsistent) {
    sol.status = SolveStatus::infeasible;
    sol.diagnostics = "presolve: inconsistent dependent equality rows";
    sol.x = Eigen::VectorXd::Zero(n);
    sol.y = Eigen::VectorXd::Zero(m_orig);
    sol.z = Eigen::VectorXd::Zero(n);
    return sol;
  }

  const Eigen::MatrixXd& A = pre.A;
  const Eigen::VectorXd& b = pre.b;
  const Eigen::VectorXd& c = problem.c;
  const Eigen::Index m = A.rows();

  auto to_original_y = [&](const Eigen::VectorXd& yi) {
    Eigen::VectorXd yo = Eigen::VectorXd::Zero(m_orig);
    for (Eigen::Index i = 0; i < m; ++i) yo(pre.rows[static_cast<size_t>(i)]) = pre.row_scale(i) * yi(i);
    return yo;
  };

  const double bnorm = problem.b.norm();
  const double cnorm = c.norm();
  int nu = 0;
  for (const auto& k : problem.cones) nu += k.degree();

  const Eigen::VectorXd e = detail::identity(layout);
  Eigen::VectorXd x = e;
  Eigen::VectorXd z = e;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  double tau = 1.0;
  double kappa = 1.0;

  detail::NtScaling scaling;
  NormalSolver normal;
  std::ostringstream diag;

  // Best iterate by max(residuals, gap); returned when the method stalls.
  struct Iterate {
    Eigen::VectorXd x, y, z;
    double tau = 1.0, kappa = 1.0;
    double merit = std::numeric_limits<double>::infinity();
  } best;

  auto finish = [&](SolveStatus status, int iters) {
    sol.status = status;
    if (status == SolveStatus::max_iter && best.x.size() > 0) {
      x = best.x;
      y = best.y;
      z = best.z;
      tau = best.tau;
      kappa = best.kappa;
    }
    sol.iterations = iters;
    const Eigen::VectorXd yo = to_original_y(y);
    if (status == SolveStatus::infeasible) {
      const double by = problem.b.dot(yo);
      sol.x = Eigen::VectorXd::Zero(n);
      sol.y = yo / by;
      sol.z = z / by;
    } else if (status == SolveStatus::unbounded) {
      const double cx = -c.dot(x);
      sol.x = x / cx;
      sol.y = Eigen::VectorXd::Zero(m_orig);
      sol.z = Eigen::VectorXd::Zero(n);
    } else {
      sol.x = x / tau;
      sol.y = yo / tau;
      sol.z = z / tau;
    }
    if (status == SolveStatus::optimal || status == SolveStatus::max_iter) {
      sol.primal_objective = c.dot(sol.x);
      sol.dual_objective = problem.b.dot(sol.y);
      sol.primal_residual = (problem.A * sol.x - problem.b).norm() / (1.0 + bnorm);
      sol.dual_residual = (problem.A.transpose() * sol.y + sol.z - c).norm() / (1.0 + cnorm);
      const double compl_gap = std::abs(sol.x.dot(sol.z));
      sol.gap = std::max(std::abs(sol.primal_objective - sol.dual_objective), compl_gap) /
                (1.0 + std::abs(sol.primal_objective));
    }
    sol.diagnostics = diag.str();
    return sol;
  };

  // Solves A (G A' dy + base) = target for dy through the normal matrix,
  // then refines twice against the unformed operator; forming A G A'
  // loses accuracy once W is badly conditioned.
  auto solve_primal = [&](const Eigen::VectorXd& target, const Eigen::VectorXd& base,
                          Eigen::VectorXd& dy, Eigen::VectorXd& dx) {
    dy = normal.solve(target - A * base);
    dx = scaling.apply_G(A.transpose() * dy) + base;
    for (int k = 0; k < 2; ++k) {
      const Eigen::VectorXd r = target - A * dx;
      const Eigen::VectorXd ddy = normal.solve(r);
      if (!ddy.allFinite()) break;
      const Eigen::VectorXd dy_new = dy + ddy;
      const Eigen::VectorXd dx_new = scaling.apply_G(A.transpose() * dy_new) + base;
      if ((target - A * dx_new).norm() >= r.norm()) break;
      dy = dy_new;
      dx = dx_new;
    }
  };

  auto solve_direction = [&](double gamma, const Eigen::VectorXd& rc, double rtau,
                             const Eigen::VectorXd& rp, const Eigen::VectorXd& rd, double rg,
                             const Eigen::VectorXd& dx2, const Eigen::VectorXd& dy2,
                             double denom) {
    Direction d;
    const Eigen::VectorXd rhat = scaling.divide(rc);
    const Eigen::VectorXd f = scaling.apply_Winv(rhat) + (1.0 - gamma) * rd;
    const Eigen::VectorXd Gf = scaling.apply_G(f);
    Eigen::VectorXd dy1, dx1;
    solve_primal(-(1.0 - gamma) * rp, Gf, dy1, dx1);
    d.dtau = (-(1.0 - gamma) * rg - c.dot(dx1) + b.dot(dy1) - rtau / tau) / denom;
    d.dx = dx1 + d.dtau * dx2;
    d.dy = dy1 + d.dtau * dy2;
    // dz from the dual equation keeps the dual residual update exact even
    // when W is badly conditioned near the boundary.
    d.dz = -(1.0 - gamma) * rd - A.transpose() * d.dy + c * d.dtau;
    d.ds_scaled = scaling.apply_WinvT(d.dx);
    d.dz_scaled = scaling.apply_W(d.dz);
    d.dkappa = (rtau - kappa * d.dtau) / tau;
    return d;
  };

  auto step_length = [&](const Direction& d) {
    const Eigen::VectorXd& lam = scaling.lambda();
    double alpha = std::min(detail::max_step(layout, lam, d.ds_scaled),
                            detail::max_step(layout, lam, d.dz_scaled));
    if (d.dtau < 0.0) alpha = std::min(alpha, -tau / d.dtau);
    if (d.dkappa < 0.0) alpha = std::min(alpha, -kappa / d.dkappa);
    return alpha;
  };

  int small_steps = 0;
  for (int it = 0;; ++it) {
    // Convergence checks on the original data.
    const Eigen::VectorXd yo = to_original_y(y);
    const double pobj = c.dot(x) / tau;
    const double dobj = problem.b.dot(yo) / tau;
    const double pres = (problem.A * x / tau - problem.b).norm() / (1.0 + bnorm);
    const double dres = (problem.A.transpose() * yo / tau + z / tau - c).norm() / (1.0 + cnorm);
    const double gap =
        std::max(std::abs(pobj - dobj), std::abs(x.dot(z)) / (tau * tau)) / (1.0 + std::abs(pobj));
    sol.iterations = it;
    if (pres <= tol && dres <= tol && gap <= tol) return finish(SolveStatus::optimal, it);
    if (const double merit = std::max({pres, dres, gap}); merit < best.merit) {
      best = {x, y, z, tau, kappa, merit};
    }

    const double by = problem.b.dot(yo);
    if (by > 0.0 && (problem.A.transpose() * yo + z).norm() / by <= tol) {
      return finish(SolveStatus::infeasible, it);
    }
    const double cx = c.dot(x);
    if (cx < 0.0 && (problem.A * x).norm() / (-cx) <= tol) {
      return finish(SolveStatus::unbounded, it);
    }
    if (it >= options.max_iter) {
      diag << "iteration limit reached; ";
      return finish(SolveStatus::max_iter, it);
    }

    if (!scaling.compute(layout, x, z)) {
      diag << "iterate left the cone interior at iteration " << it << "; ";
      return finish(SolveStatus::max_iter, it);
    }
    if (!normal.factor(scaling.normal_matrix(A))) {
      diag << "normal matrix factorisation failed at iteration " << it << "; ";
      return finish(SolveStatus::max_iter, it);
    }

    const Eigen::VectorXd rp = A * x - b * tau;
    const Eigen::VectorXd rd = A.transpose() * y + z - c * tau;
    const double rg = c.dot(x) - b.dot(y) + kappa;
    const double mu = (x.dot(z) + tau * kappa) / (nu + 1);

    const Eigen::VectorXd Gc = scaling.apply_G(c);
    Eigen::VectorXd dy2, dx2;
    solve_primal(b, -Gc, dy2, dx2);
    // Equals c'dx2 - b'dy2 - kappa/tau in exact arithmetic; this form keeps
    // the sign.
    const double denom = -scaling.apply_WinvT(dx2).squaredNorm() - kappa / tau;
    if (!(denom < 0.0) || !std::isfinite(denom)) {
      diag << "degenerate homogeneous direction at iteration " << it << "; ";
      return finish(SolveStatus::max_iter, it);
    }

    const Eigen::VectorXd& lam = scaling.lambda();
    const Eigen::VectorXd lam_sq = detail::jordan_product(layout, lam, lam);

    const Direction aff =
        solve_direction(0.0, -lam_sq, -tau * kappa, rp, rd, rg, dx2, dy2, denom);
    const double alpha_aff = std::min(1.0, step_length(aff));
    const double sigma = std::clamp(std::pow(1.0 - alpha_aff, 3), 0.0, 1.0);

    const Eigen::VectorXd rc = sigma * mu * e - lam_sq -
                               detail::jordan_product(layout, aff.ds_scaled, aff.dz_scaled);
    const double rtau = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
    const Direction dir = solve_direction(sigma, rc, rtau, rp, rd, rg, dx2, dy2, denom);
    // The scaled-space step can overshoot in the original space when W is
    // ill-conditioned, so both limits apply.
    const double alpha_orig =
        std::min(detail::max_step(layout, x, dir.dx), detail::max_step(layout, z, dir.dz));
    double alpha = std::min(1.0, 0.99 * std::min(step_length(dir), alpha_orig));
    // Rounding can still leave the cone; back off until strictly inside.
    for (int back = 0; back < 40 && std::isfinite(alpha); ++back) {
      if (detail::strictly_interior(layout, x + alpha * dir.dx) &&
          detail::strictly_interior(layout, z + alpha * dir.dz)) {
        break;
      }
      alpha *= 0.7;
    }

    if (!std::isfinite(alpha) || !dir.dx.allFinite() || !dir.dz.allFinite() ||
        !dir.dy.allFinite()) {
      diag << "non-finite search direction at iteration " << it << "; ";
      return finish(SolveStatus::max_iter, it);
    }
    small_steps = alpha < 1e-8 ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      diag << "step length stalled at iteration " << it << "; ";
      return finish(SolveStatus::max_iter, it);
    }

    x += alpha * dir.dx;
    y += alpha * dir.dy;
    z += alpha * dir.dz;
    tau += alpha * dir.dtau;
    kappa += alpha * dir.dkappa;
  }
}

}  // namespace wpsec::conic

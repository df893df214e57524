#include <stdexcept>

#include "wpsec/inner_problem.hpp"
#include "wpsec/powermin.hpp"

namespace wpsec {

std::pair<BeamformerResult, ClosedFormDiagnostics> closed_form_single_user(
    const ChannelSet& channels, double theta, double R_bar) {
  if (channels.K() != 1 || channels.L() != 1) {
    throw std::invalid_argument("closed_form_single_user: needs K = L = 1");
  }
  const InnerProblem p = InnerProblem::make(channels, theta, R_bar);
  ClosedFormDiagnostics diag;
  if (!p.representable()) {
    return {p.infeasible(InnerMethod::closed_form, "rate target overflows"), diag};
  }
  const Eigen::VectorXcd& a = p.a[0];
  const Eigen::VectorXcd& e = p.e[0];
  const Eigen::MatrixXcd B = a * a.adjoint() - p.rate_factor * (e * e.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(B);
  const Eigen::Index top = B.rows() - 1;
  const double rho = eig.eigenvalues()(top);
  // Report the diagnostics in the original (w) units: B_w = gamma^2 B.
  diag.rho_max = rho * p.gamma * p.gamma;
  diag.eigvec = eig.eigenvectors().col(top);
  // Rounding leaves a tiny positive eigenvalue for aligned channels.
  const double scale = a.squaredNorm() + p.rate_factor * e.squaredNorm();
  if (!(rho > 1e-12 * scale)) {
    return {p.infeasible(InnerMethod::closed_form, "pencil has no positive eigenvalue"), diag};
  }
  diag.alpha_opt = 1.0 / diag.rho_max;
  BeamformerResult r = p.finalize(diag.eigvec, InnerMethod::closed_form, 1, channels);
  return {r, diag};
}

}  // namespace wpsec

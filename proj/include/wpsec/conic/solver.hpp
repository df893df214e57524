#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wpsec::conic {

enum class ConeKind { nonnegative, second_order, psd };

/// One block of the cone partition. For psd blocks `dim` is the side length
/// of the matrix; the block occupies dim*(dim+1)/2 entries of the variable.
struct ConeSpec {
  ConeKind kind = ConeKind::nonnegative;
  int dim = 1;

  /// Number of variable entries covered by the block.
  int size() const;
  /// Barrier degree (contribution to the complementarity normalisation).
  int degree() const;

  static ConeSpec nonnegative(int n) { return {ConeKind::nonnegative, n}; }
  static ConeSpec second_order(int n) { return {ConeKind::second_order, n}; }
  static ConeSpec psd(int n) { return {ConeKind::psd, n}; }
};

/// Standard form: minimize c'x subject to A x = b, x in K.
/// The dual is: maximize b'y subject to A'y + z = c, z in K.
struct ConicProblem {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<ConeSpec> cones;

  /// Throws std::invalid_argument when dimensions are inconsistent or data
  /// is not finite.
  void validate() const;
};

enum class SolveStatus { optimal, infeasible, unbounded, max_iter };

const char* to_string(SolveStatus s);

struct ConicSolution {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd z;
  SolveStatus status = SolveStatus::max_iter;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  int iterations = 0;
  std::string diagnostics;

  /// True for `optimal`, or for `max_iter` stalls whose gap and residuals
  /// are already below `loose_tol`.
  bool usable(double loose_tol = 1e-6) const;
};

struct SolverOptions {
  double tol = 1e-8;
  int max_iter = 100;
};

ConicSolution solve(const ConicProblem& problem, const SolverOptions& options = {});
ConicSolution solve(const ConicProblem& problem, double tol, int max_iter);

// Symmetric vectorisation: lower triangle, column by column, off-diagonal
// entries scaled by sqrt(2) so that svec(X)'svec(Y) = trace(XY).
Eigen::VectorXd svec(const Eigen::MatrixXd& X);
Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n);
int svec_size(int n);

/// Smallest "distance to the boundary" over all blocks: minimum entry for
/// nonnegative blocks, head - ||tail|| for second-order blocks and the minimum
/// eigenvalue for psd blocks. Nonnegative exactly when v lies in the cone.
double cone_margin(const std::vector<ConeSpec>& cones, const Eigen::VectorXd& v);

}  // namespace wpsec::conic

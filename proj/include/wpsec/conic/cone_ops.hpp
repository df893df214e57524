#pragma once

// Jordan-algebra primitives and Nesterov-Todd scaling used by the
// interior-point solver. Exposed for unit testing.

#include <vector>

#include <Eigen/Dense>

#include "wpsec/conic/solver.hpp"

namespace wpsec::conic::detail {

struct Block {
  ConeKind kind;
  int dim;
  int offset;
  int size;
};

std::vector<Block> make_layout(const std::vector<ConeSpec>& cones);
int total_size(const std::vector<Block>& layout);

/// Identity element e of the product cone.
Eigen::VectorXd identity(const std::vector<Block>& layout);

/// Jordan product u o v, block by block.
Eigen::VectorXd jordan_product(const std::vector<Block>& layout, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v);

/// True when v is strictly inside every block (psd blocks must admit a
/// Cholesky factor).
bool strictly_interior(const std::vector<Block>& layout, const Eigen::VectorXd& v);

/// Largest alpha >= 0 with point + alpha*dir in the cone. The point must be
/// interior. Returns +infinity when the ray never leaves the cone.
double max_step(const std::vector<Block>& layout, const Eigen::VectorXd& point,
                const Eigen::VectorXd& dir);

/// Nesterov-Todd scaling W for an interior pair (x, z): W z = W^{-T} x = lambda.
class NtScaling {
 public:
  /// Returns false when x or z is not strictly interior.
  bool compute(const std::vector<Block>& layout, const Eigen::VectorXd& x,
               const Eigen::VectorXd& z);

  const Eigen::VectorXd& lambda() const { return lambda_; }

  Eigen::VectorXd apply_W(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_Winv(const Eigen::VectorXd& v) const;
  Eigen::VectorXd apply_WinvT(const Eigen::VectorXd& v) const;
  /// G v with G = W' W.
  Eigen::VectorXd apply_G(const Eigen::VectorXd& v) const;
  /// A G A'.
  Eigen::MatrixXd normal_matrix(const Eigen::MatrixXd& A) const;
  /// Solves lambda o u = r for u.
  Eigen::VectorXd divide(const Eigen::VectorXd& r) const;

  /// Dense W for one block (diagonal expanded); test helper.
  Eigen::MatrixXd block_W(int i) const;
  Eigen::MatrixXd block_Winv(int i) const;

 private:
  struct BlockData {
    Block blk;
    Eigen::VectorXd w;     // nonnegative: diagonal of W
    Eigen::MatrixXd W;     // second_order, psd
    Eigen::MatrixXd Winv;  // second_order, psd
    Eigen::VectorXd eig;   // psd: diagonal of the scaled point
    Eigen::VectorXd v;     // second_order: W = beta (2 v v' - J)
    double beta = 1.0;
  };
  std::vector<BlockData> data_;
  Eigen::VectorXd lambda_;
};

}  // namespace wpsec::conic::detail

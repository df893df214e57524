#pragma once

// Modeling layer: affine expressions in a real decision vector y, cone
// constraints of the form "expression in K", and the embedding of complex
// beamforming expressions into real second-order cones.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "wpsec/conic/solver.hpp"

namespace wpsec::conic {

/// constant + coeffs . y
struct AffineRow {
  double constant = 0.0;
  Eigen::VectorXd coeffs;

  static AffineRow constant_row(double value, int num_vars);
  static AffineRow variable(int index, int num_vars, double scale = 1.0);
  double eval(const Eigen::VectorXd& y) const { return constant + coeffs.dot(y); }
};

AffineRow operator+(const AffineRow& a, const AffineRow& b);
AffineRow operator*(double s, const AffineRow& a);

/// constant + coeffs . y with complex constant and coefficients; y stays real
/// (it stacks real and imaginary parts of the complex unknowns).
struct ComplexAffineRow {
  std::complex<double> constant{0.0, 0.0};
  Eigen::VectorXcd coeffs;

  AffineRow real() const;
  AffineRow imag() const;
  std::complex<double> eval(const Eigen::VectorXd& y) const;
};

/// Layout of a complex vector w in the real decision vector: Re(w_i) at
/// re_offset + i and Im(w_i) at im_offset + i.
struct ComplexVar {
  int re_offset = 0;
  int im_offset = 0;
  int length = 0;
  int num_vars = 0;

  /// The expression w^H h.
  ComplexAffineRow inner_with(const Eigen::VectorXcd& h) const;
  /// The entry w_i.
  ComplexAffineRow entry(int i) const;
  Eigen::VectorXcd extract(const Eigen::VectorXd& y) const;
};

/// Rows of the real second-order cone { head >= ||tail|| } obtained from a
/// real head and complex tail expressions (real and imaginary parts
/// interleaved) followed by optional real tail rows. An empty tail yields
/// the single row "head >= 0". Throws std::invalid_argument when the
/// expressions are not all affine in the same number of variables or hold
/// non-finite data.
std::vector<AffineRow> embed_complex_soc(const AffineRow& head,
                                         const std::vector<ComplexAffineRow>& tail,
                                         const std::vector<AffineRow>& real_tail = {});

/// Builds  min f.y  s.t. (rows of each block) in K  and maps it to the dual
/// side of the standard form: the cone rows become the slack z = c - A'y.
class ConeModel {
 public:
  explicit ConeModel(int num_vars);

  int num_vars() const { return num_vars_; }
  void minimize(const Eigen::VectorXd& f);
  void add_nonnegative(const std::vector<AffineRow>& rows);
  /// rows[0] is the head. A single row is stored as a nonnegative constraint.
  void add_second_order(const std::vector<AffineRow>& rows);

  ConicProblem build() const;

  struct Result {
    SolveStatus status = SolveStatus::max_iter;  // in terms of this model
    Eigen::VectorXd y;
    double objective = 0.0;
    ConicSolution raw;
  };
  /// Solves and reports the status of the model: an infeasible model shows
  /// up as an unbounded standard-form primal and is mapped back.
  Result solve(const SolverOptions& options = {}) const;

 private:
  void check(const AffineRow& r) const;
  int num_vars_;
  Eigen::VectorXd f_;
  std::vector<ConeSpec> cones_;
  std::vector<AffineRow> rows_;
};

}  // namespace wpsec::conic

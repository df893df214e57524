#include "wpsec/conic/model.hpp"

#include <stdexcept>

namespace wpsec::conic {

AffineRow AffineRow::constant_row(double value, int num_vars) {
  return {value, Eigen::VectorXd::Zero(num_vars)};
}

AffineRow AffineRow::variable(int index, int num_vars, double scale) {
  AffineRow r{0.0, Eigen::VectorXd::Zero(num_vars)};
  r.coeffs(index) = scale;
  return r;
}

AffineRow operator+(const AffineRow& a, const AffineRow& b) {
  if (a.coeffs.size() != b.coeffs.size()) throw std::invalid_argument("AffineRow: size mismatch");
  return {a.constant + b.constant, a.coeffs + b.coeffs};
}

AffineRow operator*(double s, const AffineRow& a) { return {s * a.constant, s * a.coeffs}; }

AffineRow ComplexAffineRow::real() const { return {constant.real(), coeffs.real()}; }
AffineRow ComplexAffineRow::imag() const { return {constant.imag(), coeffs.imag()}; }

std::complex<double> ComplexAffineRow::eval(const Eigen::VectorXd& y) const {
  return constant + (coeffs.array() * y.cast<std::complex<double>>().array()).sum();
}

ComplexAffineRow ComplexVar::inner_with(const Eigen::VectorXcd& h) const {
  if (h.size() != length) throw std::invalid_argument("ComplexVar: channel length mismatch");
  // w^H h = sum (re_i - j im_i) h_i
  ComplexAffineRow r{{0.0, 0.0}, Eigen::VectorXcd::Zero(num_vars)};
  const std::complex<double> j(0.0, 1.0);
  for (int i = 0; i < length; ++i) {
    r.coeffs(re_offset + i) = h(i);
    r.coeffs(im_offset + i) = -j * h(i);
  }
  return r;
}

ComplexAffineRow ComplexVar::entry(int i) const {
  ComplexAffineRow r{{0.0, 0.0}, Eigen::VectorXcd::Zero(num_vars)};
  r.coeffs(re_offset + i) = 1.0;
  r.coeffs(im_offset + i) = std::complex<double>(0.0, 1.0);
  return r;
}

Eigen::VectorXcd ComplexVar::extract(const Eigen::VectorXd& y) const {
  Eigen::VectorXcd w(length);
  for (int i = 0; i < length; ++i) w(i) = {y(re_offset + i), y(im_offset + i)};
  return w;
}

std::vector<AffineRow> embed_complex_soc(const AffineRow& head,
                                         const std::vector<ComplexAffineRow>& tail,
                                         const std::vector<AffineRow>& real_tail) {
  const Eigen::Index nv = head.coeffs.size();
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(head.constant) || !head.coeffs.allFinite()) {
    throw std::invalid_argument("embed_complex_soc: non-finite head");
  }
  std::vector<AffineRow> rows;
  rows.reserve(1 + 2 * tail.size() + real_tail.size());
  rows.push_back(head);
  for (const auto& t : tail) {
    if (t.coeffs.size() != nv) {
      throw std::invalid_argument("embed_complex_soc: tail expression has wrong variable count");
    }
    if (!finite(t.constant.real()) || !finite(t.constant.imag()) || !t.coeffs.allFinite()) {
      throw std::invalid_argument("embed_complex_soc: non-finite tail expression");
    }
    rows.push_back(t.real());
    rows.push_back(t.imag());
  }
  for (const auto& r : real_tail) {
    if (r.coeffs.size() != nv) {
      throw std::invalid_argument("embed_complex_soc: real tail expression has wrong variable count");
    }
    if (!finite(r.constant) || !r.coeffs.allFinite()) {
      throw std::invalid_argument("embed_complex_soc: non-finite tail expression");
    }
    rows.push_back(r);
  }
  return rows;
}

ConeModel::ConeModel(int num_vars) : num_vars_(num_vars), f_(Eigen::VectorXd::Zero(num_vars)) {
  if (num_vars < 1) throw std::invalid_argument("ConeModel: need at least one variable");
}

void ConeModel::minimize(const Eigen::VectorXd& f) {
  if (f.size() != num_vars_) throw std::invalid_argument("ConeModel: objective size mismatch");
  f_ = f;
}

void ConeModel::check(const AffineRow& r) const {
  if (r.coeffs.size() != num_vars_) throw std::invalid_argument("ConeModel: row size mismatch");
}

void ConeModel::add_nonnegative(const std::vector<AffineRow>& rows) {
  if (rows.empty()) return;
  for (const auto& r : rows) check(r);
  cones_.push_back(ConeSpec::nonnegative(static_cast<int>(rows.size())));
  rows_.insert(rows_.end(), rows.begin(), rows.end());
}

void ConeModel::add_second_order(const std::vector<AffineRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("ConeModel: empty cone");
  if (rows.size() == 1) {
    add_nonnegative(rows);
    return;
  }
  for (const auto& r : rows) check(r);
  cones_.push_back(ConeSpec::second_order(static_cast<int>(rows.size())));
  rows_.insert(rows_.end(), rows.begin(), rows.end());
}

ConicProblem ConeModel::build() const {
  // Cone row r reads  h_r + g_r . y  =  z_r ; with z = c - A'y this gives
  // c_r = h_r and column r of A equal to -g_r. Maximising b'y with b = -f.
  const auto n = static_cast<Eigen::Index>(rows_.size());
  ConicProblem p;
  p.c.resize(n);
  p.A.resize(num_vars_, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    p.c(r) = rows_[static_cast<size_t>(r)].constant;
    p.A.col(r) = -rows_[static_cast<size_t>(r)].coeffs;
  }
  p.b = -f_;
  p.cones = cones_;
  return p;
}

ConeModel::Result ConeModel::solve(const SolverOptions& options) const {
  Result res;
  res.raw = conic::solve(build(), options);
  switch (res.raw.status) {
    case SolveStatus::optimal: res.status = SolveStatus::optimal; break;
    case SolveStatus::unbounded: res.status = SolveStatus::infeasible; break;
    case SolveStatus::infeasible: res.status = SolveStatus::unbounded; break;
    case SolveStatus::max_iter: res.status = SolveStatus::max_iter; break;
  }
  res.y = res.raw.y;
  res.objective = f_.dot(res.y);
  return res;
}

}  // namespace wpsec::conic

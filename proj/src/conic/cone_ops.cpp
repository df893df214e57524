#include "wpsec/conic/cone_ops.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace wpsec::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

int svec_size(int n) { return n * (n + 1) / 2; }

int ConeSpec::size() const { return kind == ConeKind::psd ? svec_size(dim) : dim; }

int ConeSpec::degree() const {
  switch (kind) {
    case ConeKind::nonnegative: return dim;
    case ConeKind::second_order: return 1;
    case ConeKind::psd: return dim;
  }
  return dim;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  Eigen::VectorXd v(svec_size(n));
  int k = 0;
  for (int j = 0; j < n; ++j) {
    v(k++) = X(j, j);
    for (int i = j + 1; i < n; ++i) v(k++) = kSqrt2 * 0.5 * (X(i, j) + X(j, i));
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::Ref<const Eigen::VectorXd>& v, int n) {
  if (v.size() != svec_size(n)) throw std::invalid_argument("smat: length does not match side");
  Eigen::MatrixXd X(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j) {
    X(j, j) = v(k++);
    for (int i = j + 1; i < n; ++i) {
      X(i, j) = X(j, i) = v(k++) / kSqrt2;
    }
  }
  return X;
}

double cone_margin(const std::vector<ConeSpec>& cones, const Eigen::VectorXd& v) {
  double margin = kInf;
  int off = 0;
  for (const auto& c : cones) {
    const int sz = c.size();
    auto seg = v.segment(off, sz);
    switch (c.kind) {
      case ConeKind::nonnegative: margin = std::min(margin, seg.minCoeff()); break;
      case ConeKind::second_order:
        margin = std::min(margin, seg(0) - seg.tail(sz - 1).norm());
        break;
      case ConeKind::psd: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat(seg, c.dim), Eigen::EigenvaluesOnly);
        margin = std::min(margin, es.eigenvalues()(0));
        break;
      }
    }
    off += sz;
  }
  return margin;
}

namespace detail {

std::vector<Block> make_layout(const std::vector<ConeSpec>& cones) {
  std::vector<Block> out;
  out.reserve(cones.size());
  int off = 0;
  for (const auto& c : cones) {
    out.push_back({c.kind, c.dim, off, c.size()});
    off += c.size();
  }
  return out;
}

int total_size(const std::vector<Block>& layout) {
  return layout.empty() ? 0 : layout.back().offset + layout.back().size;
}

Eigen::VectorXd identity(const std::vector<Block>& layout) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(total_size(layout));
  for (const auto& b : layout) {
    switch (b.kind) {
      case ConeKind::nonnegative: e.segment(b.offset, b.size).setOnes(); break;
      case ConeKind::second_order: e(b.offset) = 1.0; break;
      case ConeKind::psd: {
        int k = b.offset;
        for (int j = 0; j < b.dim; ++j) {
          e(k) = 1.0;
          k += b.dim - j;
        }
        break;
      }
    }
  }
  return e;
}

Eigen::VectorXd jordan_product(const std::vector<Block>& layout, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v) {
  Eigen::VectorXd out(u.size());
  for (const auto& b : layout) {
    auto us = u.segment(b.offset, b.size);
    auto vs = v.segment(b.offset, b.size);
    auto os = out.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::nonnegative: os = us.cwiseProduct(vs); break;
      case ConeKind::second_order:
        os(0) = us.dot(vs);
        os.tail(b.size - 1) = us(0) * vs.tail(b.size - 1) + vs(0) * us.tail(b.size - 1);
        break;
      case ConeKind::psd: {
        const Eigen::MatrixXd U = smat(us, b.dim);
        const Eigen::MatrixXd V = smat(vs, b.dim);
        const Eigen::MatrixXd P = U * V;
        os = svec(0.5 * (P + P.transpose()));
        break;
      }
    }
  }
  return out;
}

namespace {

// Smallest positive root of a*t^2 + 2*bh*t + c with c > 0; +inf if none.
double smallest_positive_root(double a, double bh, double c) {
  if (a == 0.0) return bh < 0.0 ? -c / (2.0 * bh) : kInf;
  const double disc = bh * bh - a * c;
  if (disc < 0.0) return kInf;
  const double s = std::sqrt(disc);
  const double q = -(bh + std::copysign(s, bh));
  double best = kInf;
  if (q != 0.0) {
    const double r1 = q / a;
    const double r2 = c / q;
    if (r1 > 0.0) best = std::min(best, r1);
    if (r2 > 0.0) best = std::min(best, r2);
  }
  return best;
}

double soc_det(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const double t = v.tail(v.size() - 1).norm();
  return (v(0) - t) * (v(0) + t);
}

}  // namespace

bool strictly_interior(const std::vector<Block>& layout, const Eigen::VectorXd& v) {
  for (const auto& b : layout) {
    auto vs = v.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::nonnegative:
        if (!(vs.array() > 0.0).all()) return false;
        break;
      case ConeKind::second_order:
        if (!(vs(0) > 0.0 && soc_det(vs) > 0.0)) return false;
        break;
      case ConeKind::psd:
        if (Eigen::LLT<Eigen::MatrixXd>(smat(vs, b.dim)).info() != Eigen::Success) return false;
        break;
    }
  }
  return true;
}

double max_step(const std::vector<Block>& layout, const Eigen::VectorXd& point,
                const Eigen::VectorXd& dir) {
  double alpha = kInf;
  for (const auto& b : layout) {
    auto ps = point.segment(b.offset, b.size);
    auto ds = dir.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::nonnegative:
        for (int i = 0; i < b.size; ++i) {
          if (ds(i) < 0.0) alpha = std::min(alpha, -ps(i) / ds(i));
        }
        break;
      case ConeKind::second_order: {
        const int t = b.size - 1;
        const double a = ds(0) * ds(0) - ds.tail(t).squaredNorm();
        const double bh = ps(0) * ds(0) - ps.tail(t).dot(ds.tail(t));
        alpha = std::min(alpha, smallest_positive_root(a, bh, soc_det(ps)));
        break;
      }
      case ConeKind::psd: {
        const Eigen::LLT<Eigen::MatrixXd> llt(smat(ps, b.dim));
        Eigen::MatrixXd D = smat(ds, b.dim);
        const auto L = llt.matrixL();
        D = L.solve(D);
        D = L.solve(D.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D, Eigen::EigenvaluesOnly);
        const double emin = es.eigenvalues()(0);
        if (emin < 0.0) alpha = std::min(alpha, -1.0 / emin);
        break;
      }
    }
  }
  return alpha;
}

bool NtScaling::compute(const std::vector<Block>& layout, const Eigen::VectorXd& x,
                        const Eigen::VectorXd& z) {
  data_.clear();
  data_.reserve(layout.size());
  lambda_.resize(x.size());
  for (const auto& b : layout) {
    BlockData d;
    d.blk = b;
    auto xs = x.segment(b.offset, b.size);
    auto zs = z.segment(b.offset, b.size);
    auto ls = lambda_.segment(b.offset, b.size);
    switch (b.kind) {
      case ConeKind::nonnegative: {
        if ((xs.array() <= 0.0).any() || (zs.array() <= 0.0).any()) return false;
        d.w = (xs.array() / zs.array()).sqrt();
        ls = (xs.array() * zs.array()).sqrt();
        break;
      }
      case ConeKind::second_order: {
        const int n = b.size;
        const double sdet = soc_det(xs);
        const double zdet = soc_det(zs);
        if (!(xs(0) > 0.0 && zs(0) > 0.0 && sdet > 0.0 && zdet > 0.0)) return false;
        const double aa = std::sqrt(sdet);
        const double bb = std::sqrt(zdet);
        const double beta = std::sqrt(aa / bb);
        const Eigen::VectorXd sn = xs / aa;
        const Eigen::VectorXd zn = zs / bb;
        const double cc = std::sqrt(0.5 * (1.0 + sn.dot(zn)));
        Eigen::VectorXd wbar(n);
        wbar(0) = (sn(0) + zn(0)) / (2.0 * cc);
        wbar.tail(n - 1) = (sn.tail(n - 1) - zn.tail(n - 1)) / (2.0 * cc);
        Eigen::VectorXd v = wbar;
        v(0) += 1.0;
        v /= std::sqrt(2.0 * (wbar(0) + 1.0));
        Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n);
        J.bottomRightCorner(n - 1, n - 1) *= -1.0;
        const Eigen::MatrixXd vvT = v * v.transpose();
        d.W = beta * (2.0 * vvT - J);
        d.v = v;
        d.beta = beta;
        d.Winv = (1.0 / beta) * (2.0 * J * vvT * J - J);
        ls = d.W * zs;
        break;
      }
      case ConeKind::psd: {
        const int n = b.dim;
        const Eigen::LLT<Eigen::MatrixXd> l1(smat(xs, n));
        const Eigen::LLT<Eigen::MatrixXd> l2(smat(zs, n));
        if (l1.info() != Eigen::Success || l2.info() != Eigen::Success) return false;
        const Eigen::MatrixXd L1 = l1.matrixL();
        const Eigen::MatrixXd L2 = l2.matrixL();
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(L2.transpose() * L1,
                                              Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd sig = svd.singularValues();
        if (!(sig.minCoeff() > 0.0)) return false;
        const Eigen::VectorXd isq = sig.cwiseSqrt().cwiseInverse();
        const Eigen::MatrixXd R = L1 * svd.matrixV() * isq.asDiagonal();
        const Eigen::MatrixXd Rinv = isq.asDiagonal() * svd.matrixU().transpose() * L2.transpose();
        // Column j of W is svec(R' E_j R) for the j-th svec basis matrix E_j.
        const int m = b.size;
        d.W.resize(m, m);
        d.Winv.resize(m, m);
        int col = 0;
        for (int j = 0; j < n; ++j) {
          for (int i = j; i < n; ++i) {
            Eigen::MatrixXd E;
            Eigen::MatrixXd Einv;
            if (i == j) {
              E = R.row(i).transpose() * R.row(i);
              Einv = Rinv.row(i).transpose() * Rinv.row(i);
            } else {
              E = (R.row(i).transpose() * R.row(j) + R.row(j).transpose() * R.row(i)) / kSqrt2;
              Einv = (Rinv.row(i).transpose() * Rinv.row(j) +
                      Rinv.row(j).transpose() * Rinv.row(i)) /
                     kSqrt2;
            }
            d.W.col(col) = svec(E);
            d.Winv.col(col) = svec(Einv);
            ++col;
          }
        }
        d.eig = sig;
        ls = svec(Eigen::MatrixXd(sig.asDiagonal()));
        break;
      }
    }
    data_.push_back(std::move(d));
  }
  return true;
}

Eigen::VectorXd NtScaling::apply_W(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (const auto& d : data_) {
    auto vs = v.segment(d.blk.offset, d.blk.size);
    if (d.blk.kind == ConeKind::nonnegative) {
      out.segment(d.blk.offset, d.blk.size) = d.w.cwiseProduct(vs);
    } else {
      out.segment(d.blk.offset, d.blk.size).noalias() = d.W * vs;
    }
  }
  return out;
}

Eigen::VectorXd NtScaling::apply_Winv(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (const auto& d : data_) {
    auto vs = v.segment(d.blk.offset, d.blk.size);
    if (d.blk.kind == ConeKind::nonnegative) {
      out.segment(d.blk.offset, d.blk.size) = vs.cwiseQuotient(d.w);
    } else {
      out.segment(d.blk.offset, d.blk.size).noalias() = d.Winv * vs;
    }
  }
  return out;
}

Eigen::VectorXd NtScaling::apply_WinvT(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (const auto& d : data_) {
    auto vs = v.segment(d.blk.offset, d.blk.size);
    if (d.blk.kind == ConeKind::nonnegative) {
      out.segment(d.blk.offset, d.blk.size) = vs.cwiseQuotient(d.w);
    } else {
      out.segment(d.blk.offset, d.blk.size).noalias() = d.Winv.transpose() * vs;
    }
  }
  return out;
}

Eigen::VectorXd NtScaling::apply_G(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out(v.size());
  for (const auto& d : data_) {
    auto vs = v.segment(d.blk.offset, d.blk.size);
    if (d.blk.kind == ConeKind::nonnegative) {
      out.segment(d.blk.offset, d.blk.size) = d.w.cwiseAbs2().cwiseProduct(vs);
    } else {
      out.segment(d.blk.offset, d.blk.size).noalias() = d.W.transpose() * (d.W * vs);
    }
  }
  return out;
}

Eigen::MatrixXd NtScaling::normal_matrix(const Eigen::MatrixXd& A) const {
  const Eigen::Index m = A.rows();
  // B = A W' block by block, then A G A' = B B'.
  Eigen::MatrixXd B(m, A.cols());
  for (const auto& d : data_) {
    const auto Ab = A.middleCols(d.blk.offset, d.blk.size);
    auto Bb = B.middleCols(d.blk.offset, d.blk.size);
    switch (d.blk.kind) {
      case ConeKind::nonnegative: Bb = Ab * d.w.asDiagonal(); break;
      case ConeKind::second_order: {
        // W = beta (2 v v' - J) is symmetric.
        const Eigen::VectorXd Av = Ab * d.v;
        Bb = Ab;  // A J
        Bb.rightCols(d.blk.size - 1) *= -1.0;
        Bb = d.beta * (2.0 * Av * d.v.transpose() - Bb);
        break;
      }
      case ConeKind::psd: Bb.noalias() = Ab * d.W.transpose(); break;
    }
  }
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  M.selfadjointView<Eigen::Lower>().rankUpdate(B);
  M.triangularView<Eigen::StrictlyUpper>() = M.transpose();
  return M;
}

Eigen::VectorXd NtScaling::divide(const Eigen::VectorXd& r) const {
  Eigen::VectorXd out(r.size());
  for (const auto& d : data_) {
    auto rs = r.segment(d.blk.offset, d.blk.size);
    auto ls = lambda_.segment(d.blk.offset, d.blk.size);
    auto os = out.segment(d.blk.offset, d.blk.size);
    switch (d.blk.kind) {
      case ConeKind::nonnegative: os = rs.cwiseQuotient(ls); break;
      case ConeKind::second_order: {
        const int t = d.blk.size - 1;
        const double det = soc_det(ls);
        const double x0 = (ls(0) * rs(0) - ls.tail(t).dot(rs.tail(t))) / det;
        os(0) = x0;
        os.tail(t) = (rs.tail(t) - x0 * ls.tail(t)) / ls(0);
        break;
      }
      case ConeKind::psd: {
        const int n = d.blk.dim;
        int k = 0;
        for (int j = 0; j < n; ++j) {
          for (int i = j; i < n; ++i) {
            os(k) = 2.0 * rs(k) / (d.eig(i) + d.eig(j));
            ++k;
          }
        }
        break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd NtScaling::block_W(int i) const {
  const auto& d = data_.at(static_cast<size_t>(i));
  if (d.blk.kind == ConeKind::nonnegative) return d.w.asDiagonal();
  return d.W;
}

Eigen::MatrixXd NtScaling::block_Winv(int i) const {
  const auto& d = data_.at(static_cast<size_t>(i));
  if (d.blk.kind == ConeKind::nonnegative) return d.w.cwiseInverse().asDiagonal();
  return d.Winv;
}

}  // namespace detail
}  // namespace wpsec::conic

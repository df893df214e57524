#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "wpsec/inner_problem.hpp"
#include "wpsec/powermin.hpp"
#include "wpsec/rng.hpp"

namespace wpsec {

namespace {

// Orthonormal basis of span(vectors), with rank decided relative to the
// largest column norm.
Eigen::MatrixXcd span_basis(const std::vector<Eigen::VectorXcd>& vectors, int n) {
  if (vectors.empty()) return Eigen::MatrixXcd(n, 0);
  Eigen::MatrixXcd E(n, static_cast<Eigen::Index>(vectors.size()));
  double scale = 0.0;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    E.col(static_cast<Eigen::Index>(i)) = vectors[i];
    scale = std::max(scale, vectors[i].norm());
  }
  if (scale == 0.0) return Eigen::MatrixXcd(n, 0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(E / scale);
  qr.setThreshold(1e-10);
  const auto r = qr.rank();
  Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, n);
  return Q.leftCols(r);
}

}  // namespace

namespace {

std::optional<std::vector<Eigen::VectorXcd>> projected_users(const std::vector<Eigen::VectorXcd>& users,
                                                             const std::vector<Eigen::VectorXcd>& eves) {
  if (users.empty()) return std::nullopt;
  const auto n = users.front().size();
  const Eigen::MatrixXcd Q = span_basis(eves, static_cast<int>(n));
  if (Q.cols() >= n) return std::nullopt;
  std::vector<Eigen::VectorXcd> proj;
  for (const auto& h : users) {
    Eigen::VectorXcd p = h - Q * (Q.adjoint() * h);
    const double pn = p.norm();
    if (pn == 0.0 || !(pn > 1e-10 * h.norm())) return std::nullopt;
    proj.push_back(p / pn);
  }
  return proj;
}

bool reaches_every_user(const std::vector<Eigen::VectorXcd>& users, const Eigen::VectorXcd& w) {
  for (const auto& h : users) {
    if (!(std::abs(h.dot(w)) > 1e-8 * h.norm())) return false;
  }
  return true;
}

}  // namespace

std::optional<Eigen::VectorXcd> zero_forcing_direction(const std::vector<Eigen::VectorXcd>& users,
                                                       const std::vector<Eigen::VectorXcd>& eves) {
  const auto proj = projected_users(users, eves);
  if (!proj) return std::nullopt;
  // A generic combination of the projections avoids every hyperplane
  // h_k^H w = 0; a few deterministic phase patterns are tried in turn.
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(proj->front().size());
    for (std::size_t k = 0; k < proj->size(); ++k) {
      const double phi = attempt * (k + 1) * std::numbers::pi * (3.0 - std::sqrt(5.0));
      w += std::polar(1.0, phi) * (*proj)[k];
    }
    const double wn = w.norm();
    if (!(wn > 0.0)) continue;
    w /= wn;
    if (reaches_every_user(users, w)) return w;
  }
  return std::nullopt;
}

std::vector<Eigen::VectorXcd> zero_forcing_candidates(const std::vector<Eigen::VectorXcd>& users,
                                                      const std::vector<Eigen::VectorXcd>& eves,
                                                      int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXcd> out;
  const auto first = zero_forcing_direction(users, eves);
  if (!first || count < 1) return out;
  out.push_back(*first);
  const auto proj = projected_users(users, eves);
  for (int i = 1; i < count; ++i) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(i));
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(first->size());
    for (const auto& pk : *proj) w += rng.complex_normal() * pk;
    const double wn = w.norm();
    if (wn > 0.0 && reaches_every_user(users, w / wn)) out.push_back(w / wn);
  }
  return out;
}

Feasibility check_feasibility(const ChannelSet& channels, const SystemParams& params) {
  channels.validate();
  Feasibility out;
  if (auto zf = zero_forcing_direction(channels.h_s, channels.h_e)) {
    out.verdict = Feasibility::Verdict::feasible;
    out.zf_direction = *zf;
    out.reason = channels.num_antennas() >= channels.K() + channels.L()
                     ? "zero-forcing direction exists (N_T >= K + L)"
                     : "zero-forcing direction exists";
    return out;
  }
  for (const auto& h : channels.h_s) {
    if (h.norm() == 0.0 && params.R_bar > 0.0) {
      out.verdict = Feasibility::Verdict::infeasible;
      out.reason = "a user channel is zero";
      return out;
    }
  }
  // An eavesdropper aligned with a user sees the same beamforming gain, so
  // the pair is feasible only if the SNR ratio beats 2^R_bar (the theta -> 0
  // limit of 2^Rbb).
  const double need = std::exp2(params.R_bar);
  for (const auto& hs : channels.h_s) {
    for (const auto& he : channels.h_e) {
      const double ns = hs.squaredNorm();
      const double ne = he.squaredNorm();
      if (ne == 0.0) continue;
      const double c = std::norm(hs.dot(he));
      if (c < (1.0 - 1e-12) * ns * ne) continue;
      const double ratio = (ns / channels.sigma_s2) / (ne / channels.sigma_e2);
      if (ratio <= need) {
        out.verdict = Feasibility::Verdict::infeasible;
        out.reason = "an eavesdropper channel is aligned with a user channel and at least as strong";
        return out;
      }
    }
  }
  out.verdict = Feasibility::Verdict::undetermined;
  out.reason = "no zero-forcing direction; feasibility depends on the rate target";
  return out;
}

}  // namespace wpsec

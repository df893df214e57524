#include "wpsec/channels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wpsec/rng.hpp"

namespace wpsec {

// ---------------------------------------------------------------- Philox

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}
}  // namespace

Philox4x32::Philox4x32(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

Philox4x32::Block Philox4x32::next_block() {
  const Block ctr{static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32),
                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  ++index_;
  return encrypt(ctr, key_);
}

Philox4x32::result_type Philox4x32::operator()() {
  if (used_ == 4) {
    buffer_ = next_block();
    used_ = 0;
  }
  return buffer_[static_cast<size_t>(used_++)];
}

namespace {
inline double to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return static_cast<double>(bits) * 0x1.0p-53;
}
}  // namespace

double Philox4x32::uniform() {
  const std::uint32_t a = (*this)();
  const std::uint32_t b = (*this)();
  return to_unit(a, b);
}

std::complex<double> Philox4x32::complex_normal() {
  const Block blk = next_block();
  const double u1 = 1.0 - to_unit(blk[0], blk[1]);  // (0, 1]
  const double u2 = to_unit(blk[2], blk[3]);
  const double r = std::sqrt(-std::log(u1));  // variance 1/2 per component
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

double Philox4x32::normal() { return std::numbers::sqrt2 * complex_normal().real(); }

// -------------------------------------------------------------- channels

void SystemParams::validate() const {
  if (N_T < 1 || K < 1 || L < 1 || M < 1) {
    throw std::invalid_argument("SystemParams: N_T, K, L and M must be >= 1");
  }
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("SystemParams: xi must lie in (0, 1]");
  if (!(T > 0.0)) throw std::invalid_argument("SystemParams: T must be > 0");
  if (!(P_max > 0.0)) throw std::invalid_argument("SystemParams: P_max must be > 0");
  if (!(R_bar >= 0.0) || !std::isfinite(R_bar)) {
    throw std::invalid_argument("SystemParams: R_bar must be >= 0");
  }
  if (!(sigma_s2 > 0.0 && sigma_e2 > 0.0)) {
    throw std::invalid_argument("SystemParams: noise powers must be > 0");
  }
}

void PathLossModel::validate() const {
  if (!(A > 0.0 && alpha > 0.0)) throw std::invalid_argument("PathLossModel: A, alpha must be > 0");
  if (!(d_s > 0.0 && d_e > 0.0 && d_PB > 0.0)) {
    throw std::invalid_argument("PathLossModel: distances must be > 0");
  }
}

int ChannelSet::num_antennas() const {
  return h_s.empty() ? 0 : static_cast<int>(h_s.front().size());
}

double ChannelSet::beacon_gain_sum() const {
  double s = 0.0;
  for (const auto& gm : g) s += gm.squaredNorm();
  return s;
}

void ChannelSet::validate() const {
  if (h_s.empty() || h_e.empty() || g.empty()) {
    throw std::invalid_argument("ChannelSet: every channel group needs at least one vector");
  }
  const auto n = h_s.front().size();
  if (n < 1) throw std::invalid_argument("ChannelSet: empty channel vector");
  for (const auto* group : {&h_s, &h_e, &g}) {
    for (const auto& v : *group) {
      if (v.size() != n) throw std::invalid_argument("ChannelSet: inconsistent antenna count");
      if (!v.allFinite()) throw std::invalid_argument("ChannelSet: non-finite channel entry");
    }
  }
  if (!(sigma_s2 > 0.0 && sigma_e2 > 0.0)) {
    throw std::invalid_argument("ChannelSet: noise powers must be > 0");
  }
}

double path_loss_gain(double d, const PathLossModel& model) {
  if (!(d > 0.0)) throw std::domain_error("path_loss_gain: distance must be > 0");
  return std::sqrt(model.A * std::pow(d, -model.alpha));
}

namespace {

enum class Group : std::uint64_t { user = 1, eavesdropper = 2, beacon = 3 };

Eigen::VectorXcd draw(std::uint64_t seed, Group group, int index, int n, double scale) {
  Philox4x32 rng(seed, (static_cast<std::uint64_t>(group) << 32) | static_cast<std::uint32_t>(index));
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v(i) = scale * rng.complex_normal();
  return v;
}

}  // namespace

ChannelSet sample_channels(const SystemParams& params, const PathLossModel& model,
                           std::uint64_t seed) {
  params.validate();
  model.validate();
  ChannelSet ch;
  ch.sigma_s2 = params.sigma_s2;
  ch.sigma_e2 = params.sigma_e2;
  const double as = path_loss_gain(model.d_s, model);
  const double ae = path_loss_gain(model.d_e, model);
  const double ag = path_loss_gain(model.d_PB, model);
  for (int k = 0; k < params.K; ++k) ch.h_s.push_back(draw(seed, Group::user, k, params.N_T, as));
  for (int l = 0; l < params.L; ++l) {
    ch.h_e.push_back(draw(seed, Group::eavesdropper, l, params.N_T, ae));
  }
  for (int m = 0; m < params.M; ++m) ch.g.push_back(draw(seed, Group::beacon, m, params.N_T, ag));
  return ch;
}

double harvested_energy(const Eigen::VectorXd& p, const ChannelSet& channels, double theta,
                        const SystemParams& params) {
  if (p.size() != channels.M()) {
    throw std::invalid_argument("harvested_energy: power vector length must equal M");
  }
  if ((p.array() < 0.0).any()) throw std::domain_error("harvested_energy: negative beacon power");
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("harvested_energy: theta outside (0,1)");
  double s = 0.0;
  for (int m = 0; m < channels.M(); ++m) s += p(m) * channels.g[static_cast<size_t>(m)].squaredNorm();
  return params.xi * s * theta * params.T;
}

}  // namespace wpsec

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "wpsec/channels.hpp"
#include "wpsec/rng.hpp"
#include "wpsec/secrecy.hpp"

using namespace wpsec;

namespace {

Eigen::VectorXcd random_vec(Philox4x32& r, int n) {
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = r.complex_normal();
  return v;
}

ChannelSet random_set(std::uint64_t seed, int n, int K, int L, int M) {
  Philox4x32 r(seed, 77);
  ChannelSet ch;
  for (int k = 0; k < K; ++k) ch.h_s.push_back(random_vec(r, n));
  for (int l = 0; l < L; ++l) ch.h_e.push_back(random_vec(r, n));
  for (int m = 0; m < M; ++m) ch.g.push_back(random_vec(r, n));
  ch.sigma_s2 = 0.7;
  ch.sigma_e2 = 1.3;
  return ch;
}

}  // namespace

TEST_CASE("link rate examples") {
  const Eigen::Vector2cd h(1.0, 0.0);
  CHECK(link_rate(h, Eigen::Vector2cd(0.0, 3.0), 0.3, 1.0, 1.0) == 0.0);
  const double sigma2 = 0.25;
  const Eigen::Vector2cd w(std::sqrt(sigma2), 0.0);
  CHECK(link_rate(h, w, 0.5, 1.0, sigma2) == doctest::Approx(0.5).epsilon(1e-14));
  Philox4x32 r(1);
  const auto hh = random_vec(r, 4);
  const auto ww = random_vec(r, 4);
  const auto rot = std::polar(1.0, 0.77);
  CHECK(link_rate(hh, rot * ww, 0.4, 2.0, 0.1) == doctest::Approx(link_rate(hh, ww, 0.4, 2.0, 0.1)).epsilon(1e-13));
  CHECK_THROWS_AS(link_rate(h, w, 0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(link_rate(h, w, 0.5, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(link_rate(h, Eigen::Vector3cd::Zero(), 0.5, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("secrecy rate examples") {
  Philox4x32 r(2);
  ChannelSet ch;
  ch.h_s = {random_vec(r, 3)};
  ch.h_e = {ch.h_s[0]};
  ch.g = {random_vec(r, 3)};
  ch.sigma_s2 = ch.sigma_e2 = 0.5;
  const auto w = random_vec(r, 3);
  CHECK(multicast_secrecy_rate(ch, w, 0.4) == 0.0);

  ch.h_s.push_back(random_vec(r, 3));
  ch.h_e = {Eigen::VectorXcd::Zero(3), Eigen::VectorXcd::Zero(3)};
  const double G = ch.beacon_gain_sum();
  const double worst = std::min(link_rate(ch.h_s[0], w, 0.4, G, 0.5), link_rate(ch.h_s[1], w, 0.4, G, 0.5));
  CHECK(multicast_secrecy_rate(ch, w, 0.4) == doctest::Approx(worst).epsilon(1e-14));
}

TEST_CASE("secrecy rate matches a scalar recomputation") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto ch = random_set(seed, 2, 2, 2, 3);
    Philox4x32 r(seed, 1);
    const Eigen::VectorXcd w = 3.0 * random_vec(r, 2);
    const double theta = 0.1 + 0.8 * r.uniform();
    double G = 0.0;
    for (const auto& g : ch.g)
      for (int i = 0; i < 2; ++i) G += std::norm(g[i]);
    auto rate = [&](const Eigen::VectorXcd& h, double s2) {
      const std::complex<double> ip = std::conj(h[0]) * w[0] + std::conj(h[1]) * w[1];
      const double snr = theta * G * std::norm(ip) / ((1.0 - theta) * s2);
      return (1.0 - theta) * std::log(1.0 + snr) / std::numbers::ln2;
    };
    const double rs = std::min(rate(ch.h_s[0], ch.sigma_s2), rate(ch.h_s[1], ch.sigma_s2));
    const double re = std::max(rate(ch.h_e[0], ch.sigma_e2), rate(ch.h_e[1], ch.sigma_e2));
    CHECK(multicast_secrecy_rate(ch, w, theta) == doctest::Approx(std::max(0.0, rs - re)).epsilon(1e-12));
  }
}

TEST_CASE("secrecy rate is nonnegative and phase invariant") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto ch = random_set(seed, 4, 3, 5, 2);
    Philox4x32 r(seed, 2);
    const auto w = random_vec(r, 4);
    const double a = multicast_secrecy_rate(ch, w, 0.3);
    CHECK(a >= 0.0);
    CHECK(multicast_secrecy_rate(ch, std::polar(1.0, 2.1) * w, 0.3) == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("link rate grows with beam power") {
  Philox4x32 r(3);
  const auto h = random_vec(r, 4);
  const auto w = random_vec(r, 4);
  double prev = -1.0;
  for (double s : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double v = link_rate(h, s * w, 0.5, 1.0, 1.0);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("effective parameters") {
  auto ch = random_set(4, 3, 1, 1, 2);
  const double G = ch.beacon_gain_sum();
  const auto e = effective_params(ch, 0.5, 2.0);
  CHECK(e.sigma_s2_bar == doctest::Approx(ch.sigma_s2 / G).epsilon(1e-14));
  CHECK(e.sigma_e2_bar == doctest::Approx(ch.sigma_e2 / G).epsilon(1e-14));
  CHECK(e.R_bar_bar == doctest::Approx(4.0));
  CHECK(effective_params(ch, 1.0 - 1e-9, 2.0).R_bar_bar > 1e9);
  CHECK_THROWS_AS(effective_params(ch, 0.0, 2.0), std::domain_error);
  CHECK_THROWS_AS(effective_params(ch, 1.0, 2.0), std::domain_error);
  for (auto& g : ch.g) g.setZero();
  CHECK_THROWS_AS(effective_params(ch, 0.5, 2.0), std::domain_error);
}

TEST_CASE("pair slack agrees with the rate constraint") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto ch = random_set(seed, 4, 1, 1, 2);
    Philox4x32 r(seed, 5);
    const auto w = random_vec(r, 4);
    const double theta = 0.05 + 0.9 * r.uniform();
    const double R_bar = 2.0 * r.uniform();
    const auto eff = effective_params(ch, theta, R_bar);
    const double slack = pair_rate_slack(ch.h_s[0], ch.h_e[0], w, eff);
    // Equivalent quadratic form: |a^H w|^2 - 2^Rbb |e^H w|^2 >= 2^Rbb - 1.
    const double f = std::exp2(eff.R_bar_bar);
    const double q = std::norm(ch.h_s[0].dot(w)) / eff.sigma_s2_bar -
                     f * std::norm(ch.h_e[0].dot(w)) / eff.sigma_e2_bar - (f - 1.0);
    if (std::abs(q) > 1e-9 * f) CHECK((slack >= 0.0) == (q >= 0.0));
    // The raw rate difference equals (1-theta) times the effective slack plus R_bar.
    const double raw = link_rate(ch.h_s[0], w, theta, ch.beacon_gain_sum(), ch.sigma_s2) -
                       link_rate(ch.h_e[0], w, theta, ch.beacon_gain_sum(), ch.sigma_e2);
    CHECK(raw == doctest::Approx((1.0 - theta) * slack + R_bar).epsilon(1e-10));
  }
}

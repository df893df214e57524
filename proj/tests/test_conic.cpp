#include <doctest.h>

#include <cmath>
#include <complex>

#include "support.hpp"
#include "wpsec/conic/model.hpp"
#include "wpsec/conic/solver.hpp"

using namespace wpsec;
using namespace wpsec::conic;

namespace {

void check_certificate(const ConicProblem& p, const ConicSolution& s, double tol) {
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.gap <= tol);
  CHECK(s.primal_residual <= tol);
  CHECK(s.dual_residual <= tol);
  CHECK(cone_margin(p.cones, s.x) >= -tol);
  CHECK(cone_margin(p.cones, s.z) >= -tol);
  const double cx = p.c.dot(s.x);
  CHECK(cx - p.b.dot(s.y) <= tol * (1.0 + std::abs(cx)));
}

}  // namespace

TEST_CASE("second-order cone: norm of (3,4)") {
  ConeModel m(1);
  m.minimize(Eigen::VectorXd::Ones(1));
  m.add_second_order({AffineRow::variable(0, 1), AffineRow::constant_row(3.0, 1), AffineRow::constant_row(4.0, 1)});
  const auto r = m.solve();
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.y[0] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("nonnegative cone: shifted bound x >= 1") {
  ConeModel m(1);
  m.minimize(Eigen::VectorXd::Ones(1));
  m.add_nonnegative({AffineRow::variable(0, 1) + AffineRow::constant_row(-1.0, 1)});
  const auto r = m.solve();
  REQUIRE(r.status == SolveStatus::optimal);
  CHECK(r.y[0] == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("psd cone: min trace X with X11 = 1") {
  ConicProblem p;
  p.cones = {ConeSpec::psd(2)};
  p.c = svec(Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd E11 = Eigen::MatrixXd::Zero(2, 2);
  E11(0, 0) = 1.0;
  p.A = svec(E11).transpose();
  p.b = Eigen::VectorXd::Ones(1);
  const auto s = solve(p);
  check_certificate(p, s, 1e-7);
  const Eigen::MatrixXd X = smat(s.x, 2);
  CHECK(p.c.dot(s.x) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(X(0, 0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(X(1, 1)) < 1e-6);
  CHECK(std::abs(X(0, 1)) < 1e-6);
}

TEST_CASE("svec preserves the trace inner product") {
  Philox4x32 r(3, 1);
  for (int n : {1, 2, 5}) {
    Eigen::MatrixXd A(n, n), B(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        A(i, j) = r.normal();
        B(i, j) = r.normal();
      }
    A = (A + A.transpose()).eval();
    B = (B + B.transpose()).eval();
    CHECK(svec(A).dot(svec(B)) == doctest::Approx((A * B).trace()).epsilon(1e-12));
    CHECK((smat(svec(A), n) - A).norm() < 1e-12);
    CHECK(svec_size(n) == n * (n + 1) / 2);
  }
}

TEST_CASE("embed_complex_soc keeps the modulus") {
  SUBCASE("constant 1+1i") {
    ComplexAffineRow t;
    t.constant = {1.0, 1.0};
    t.coeffs = Eigen::VectorXcd::Zero(1);
    const auto rows = embed_complex_soc(AffineRow::constant_row(2.0, 1), {t});
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].constant == 1.0);
    CHECK(rows[2].constant == 1.0);
    CHECK(std::hypot(rows[1].constant, rows[2].constant) == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("empty tail is head >= 0") {
    const auto rows = embed_complex_soc(AffineRow::variable(0, 2), {});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].coeffs[0] == 1.0);
  }
  SUBCASE("random tail") {
    Philox4x32 r(11, 2);
    std::vector<ComplexAffineRow> tail;
    double norm2 = 0.0;
    for (int i = 0; i < 6; ++i) {
      ComplexAffineRow t;
      t.constant = r.complex_normal();
      t.coeffs = Eigen::VectorXcd::Zero(3);
      norm2 += std::norm(t.constant);
      tail.push_back(t);
    }
    const auto rows = embed_complex_soc(AffineRow::constant_row(0.0, 3), tail);
    REQUIRE(rows.size() == 13);
    double emb = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) emb += rows[i].constant * rows[i].constant;
    CHECK(std::abs(std::sqrt(emb) - std::sqrt(norm2)) < 1e-12);
  }
  SUBCASE("variable count mismatch is rejected") {
    ComplexAffineRow t;
    t.coeffs = Eigen::VectorXcd::Zero(2);
    CHECK_THROWS_AS(embed_complex_soc(AffineRow::variable(0, 3), {t}), std::invalid_argument);
  }
}

TEST_CASE("planted SOCPs recover the planted optimum") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    CAPTURE(seed);
    const auto pl = testing::planted_socp(seed);
    const auto s = solve(pl.problem);
    check_certificate(pl.problem, s, 1e-7);
    CHECK(std::abs(pl.problem.c.dot(s.x) - pl.optimum) <= 1e-6 * std::max(1.0, std::abs(pl.optimum)));
  }
}

TEST_CASE("planted SDPs recover the planted optimum") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CAPTURE(seed);
    const auto pl = testing::planted_sdp(seed, 2 + static_cast<int>(seed % 4));
    const auto s = solve(pl.problem);
    check_certificate(pl.problem, s, 1e-7);
    CHECK(std::abs(pl.problem.c.dot(s.x) - pl.optimum) <= 1e-6 * std::max(1.0, std::abs(pl.optimum)));
  }
}

// Boundary optima of curved cones are located to O(sqrt(gap)), so the
// argmin moves by up to about sqrt(tol) between the two solves.
TEST_CASE("argmin is invariant to scaling c") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    auto pl = testing::planted_socp(seed);
    const auto s1 = solve(pl.problem);
    pl.problem.c *= 7.25;
    const auto s2 = solve(pl.problem);
    REQUIRE(s1.status == SolveStatus::optimal);
    REQUIRE(s2.status == SolveStatus::optimal);
    CHECK(std::abs(pl.problem.c.dot(s2.x) - pl.problem.c.dot(s1.x)) <=
          1e-7 * 7.25 * std::max(1.0, std::abs(pl.optimum)));
    CHECK((s1.x - s2.x).norm() <= 10.0 * std::sqrt(1e-8) * std::max(1.0, s1.x.norm()));
  }
}

TEST_CASE("solver is deterministic") {
  const auto pl = testing::planted_socp(7);
  const auto a = solve(pl.problem);
  const auto b = solve(pl.problem);
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("infeasible and unbounded programs are reported") {
  SUBCASE("x >= 0, x1 + x2 = -1") {
    ConicProblem p;
    p.cones = {ConeSpec::nonnegative(2)};
    p.c = Eigen::VectorXd::Ones(2);
    p.A = Eigen::MatrixXd::Ones(1, 2);
    p.b = -Eigen::VectorXd::Ones(1);
    CHECK(solve(p).status == SolveStatus::infeasible);
  }
  SUBCASE("min -x1, x1 = x2, x >= 0") {
    ConicProblem p;
    p.cones = {ConeSpec::nonnegative(2)};
    p.c = Eigen::Vector2d(-1.0, 0.0);
    p.A = Eigen::RowVector2d(1.0, -1.0);
    p.b = Eigen::VectorXd::Zero(1);
    CHECK(solve(p).status == SolveStatus::unbounded);
  }
  SUBCASE("infeasible model: t >= ||(1)|| and t <= 0") {
    ConeModel m(1);
    m.minimize(Eigen::VectorXd::Ones(1));
    m.add_second_order({AffineRow::variable(0, 1), AffineRow::constant_row(1.0, 1)});
    m.add_nonnegative({AffineRow::variable(0, 1, -1.0)});
    CHECK(m.solve().status == SolveStatus::infeasible);
  }
}

TEST_CASE("malformed problems are structural errors") {
  ConicProblem p;
  p.cones = {ConeSpec::nonnegative(2)};
  p.c = Eigen::VectorXd::Ones(3);
  p.A = Eigen::MatrixXd::Ones(1, 2);
  p.b = Eigen::VectorXd::Ones(1);
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
  p.c = Eigen::VectorXd::Ones(2);
  p.cones = {ConeSpec::second_order(1), ConeSpec::nonnegative(1)};
  CHECK_THROWS_AS(solve(p), std::invalid_argument);
  p.cones = {ConeSpec::nonnegative(2)};
  CHECK_THROWS_AS(solve(p, {0.5, 100}), std::invalid_argument);
}

TEST_CASE("dependent equality rows are removed") {
  auto pl = testing::planted_socp(21);
  auto& p = pl.problem;
  Eigen::MatrixXd A2(p.A.rows() + 1, p.A.cols());
  A2 << p.A, p.A.row(0) + 2.0 * p.A.row(p.A.rows() - 1);
  Eigen::VectorXd b2(p.b.size() + 1);
  b2 << p.b, p.b[0] + 2.0 * p.b[p.b.size() - 1];
  p.A = A2;
  p.b = b2;
  const auto s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(std::abs(p.c.dot(s.x) - pl.optimum) <= 1e-6 * std::max(1.0, std::abs(pl.optimum)));
}

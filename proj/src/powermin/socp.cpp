#include <cmath>
#include <stdexcept>

#include "wpsec/conic/model.hpp"
#include "wpsec/inner_problem.hpp"
#include "wpsec/powermin.hpp"

namespace wpsec {

using conic::AffineRow;
using conic::ComplexAffineRow;
using conic::ComplexVar;

BeamformerResult solve_inner_socp(const ChannelSet& channels, double theta, double R_bar,
                                  const InnerOptions& options) {
  const int K = channels.K();
  const int L = channels.L();
  if (!(K == 1 || (K > 1 && K <= 3 && L == 1))) {
    throw std::invalid_argument(
        "solve_inner_socp: the rank-one guarantee needs K = 1, or 1 < K <= 3 with L = 1; "
        "use solve_inner_sca for this instance");
  }
  const InnerProblem p = InnerProblem::make(channels, theta, R_bar);
  if (!p.representable()) return p.infeasible(InnerMethod::socp, "rate target overflows");

  const int N = p.N;
  const int nv = 1 + 2 * N;
  const ComplexVar x{1, 1 + N, N, nv};
  conic::ConeModel model(nv);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nv);
  f(0) = 1.0;
  model.minimize(f);

  std::vector<ComplexAffineRow> entries;
  for (int i = 0; i < N; ++i) entries.push_back(x.entry(i));
  model.add_second_order(conic::embed_complex_soc(AffineRow::variable(0, nv), entries));

  const double sqrt_rf = std::sqrt(p.rate_factor);
  const AffineRow noise = AffineRow::constant_row(std::sqrt(p.c0), nv);
  for (const auto& ak : p.a) {
    const AffineRow head = x.inner_with(ak).real();
    for (const auto& el : p.e) {
      ComplexAffineRow leak = x.inner_with(el);
      leak.coeffs *= sqrt_rf;
      model.add_second_order(conic::embed_complex_soc(head, {leak}, {noise}));
    }
  }

  const auto res = model.solve({options.solver_tol, 100});
  if (res.status == conic::SolveStatus::infeasible) {
    return p.infeasible(InnerMethod::socp, "cone program infeasible");
  }
  if (!res.raw.usable()) {
    BeamformerResult r;
    r.method = InnerMethod::socp;
    r.theta = theta;
    r.iterations = res.raw.iterations;
    r.message = "conic solver: " + std::string(conic::to_string(res.raw.status)) + " " +
                res.raw.diagnostics;
    return r;
  }
  return p.finalize(x.extract(res.y), InnerMethod::socp, res.raw.iterations, channels);
}

}  // namespace wpsec

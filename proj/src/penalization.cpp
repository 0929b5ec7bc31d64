#include "halfspace/penalization.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace halfspace {

PenaltyBasis penalty_basis(const KernelBasis& kb) {
  return {kb.phi_plus(), kb.psi, kb.aux, kb.alpha};
}

Projections build_projections(const PenaltyBasis& pb) {
  Projections p;
  const int n = static_cast<int>(pb.plus.rows());
  p.plus = pb.plus * pb.plus.transpose();
  if (pb.psi.cols() == 0) {
    p.zero = Mat::Zero(n, n);
    p.zero_tilde = Mat::Zero(n, n);
    return p;
  }
  p.zero_tilde = pb.psi * pb.psi.transpose();
  const Vec inv = pb.alpha.array().square().inverse();
  p.zero = pb.aux * inv.asDiagonal() * pb.aux.transpose();
  return p;
}

PenaltyConfig penalty_constants(const KernelBasis& kb, const Vec& b, double gamma,
                                PenaltyOptions opt) {
  if (!(gamma > 0)) throw validation_error("penalty: gamma must be positive");
  if (!(opt.eps1 > 0 && opt.eps1 < 1 && opt.eps2 > 0 && opt.eps2 < 1))
    throw usage_error("penalty: eps1 and eps2 must lie in (0, 1)");
  if (!(kb.beta_min > 0))
    throw validation_error(
        "penalty: beta_min = 0 (u is degenerate); use the frozen-basis extra-condition scheme");
  PenaltyConfig c;
  c.eps1 = opt.eps1;
  c.eps2 = opt.eps2;
  c.gamma = gamma;
  c.gamma1 = kb.gamma1;
  c.beta_min = kb.beta_min;
  c.beta_hat_max = kb.beta_hat_max;
  const int km = kb.sig.k_minus;
  c.eps = km > 0 ? 1.0 / (2.0 * std::sqrt(kb.beta_hat_max - 0.5)) : 1.0;
  const double e1 = c.eps1 * c.eps1, e2 = c.eps2 * c.eps2;
  const double bg = c.beta_min + 2.0 * c.gamma1 * e1;
  double sum = 0.0;
  for (int r = 0; r < kb.sig.l; ++r)
    sum += b.cwiseProduct(kb.aux.col(r)).squaredNorm() / (kb.alpha(r) * kb.alpha(r));
  c.arg1 = 1.0 + km / (c.eps * c.eps);
  c.arg2 = 2.0 / e1 + bg / e2 * sum;
  c.arg3 = kb.sig.l > 0 ? 2.0 * gamma * (1.0 - e2) * kb.alpha.maxCoeff() / bg : 0.0;
  c.sigma_rule = gamma / std::max({c.arg1, c.arg2, c.arg3});
  c.sigma = opt.sigma_override > 0 ? opt.sigma_override : c.sigma_rule;
  c.alpha = 2.0 * c.sigma;
  c.beta = c.sigma * bg / (2.0 * (1.0 - e2));
  c.mu = 0.5 * std::min(gamma, c.sigma * c.beta_min);
  return c;
}

PenalizedOperator build_penalized_operator(const LinearizedOperator& op,
                                           const PenaltyConfig& config,
                                           const Projections& proj) {
  PenalizedOperator p;
  p.config = config;
  p.proj = proj;
  const Vec& b = op.b;
  const auto B = b.asDiagonal();
  Mat base = op.L();
  base.diagonal() -= config.sigma * b;
  const Mat zero_term = config.beta * (B * proj.zero * B);
  p.Lambda = base + config.alpha * (proj.plus * B) + zero_term;
  p.Lambda_adj = base + config.alpha * (B * proj.plus) + zero_term;
  return p;
}

CoercivityReport coercivity_check(const PenalizedOperator& pen) {
  CoercivityReport r;
  const Mat S = 0.5 * (pen.Lambda + pen.Lambda.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  r.min_eig = es.eigenvalues()(0);
  r.mu = pen.config.mu;
  r.sigma = pen.config.sigma;
  r.alpha = pen.config.alpha;
  r.beta = pen.config.beta;
  r.pass = r.min_eig >= r.mu - 1e-10;
  return r;
}

}  // namespace halfspace

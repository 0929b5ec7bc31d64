#include <cmath>

#include <doctest.h>

#include "halfspace/penalization.hpp"

using namespace halfspace;

namespace {

struct Point {
  LinearizedOperator op;
  KernelBasis kb;
  AssumptionReport rep;
};

Point point(int d, int nodes, double u) {
  ModelSpec m;
  m.dimension = d;
  GridSpec g;
  g.dimension = d;
  g.nodes = nodes;
  const DiscreteSpace s = build_space(m, g);
  Point p;
  p.op = build_bgk_operator(m, s, equilibrium(m, s), NuProfile{}, u);
  p.kb = build_kernel_basis(p.op);
  p.rep = validate_assumptions(p.op);
  return p;
}

}  // namespace

TEST_CASE("projections are symmetric and idempotent") {
  const Point p = point(3, 6, 0.6);
  const Projections pr = build_projections(p.kb);
  CHECK((pr.plus - pr.plus.transpose()).norm() < 1e-13);
  CHECK((pr.plus * pr.plus - pr.plus).norm() < 1e-12);
  CHECK(pr.plus.trace() == doctest::Approx(p.kb.sig.k_plus));
  CHECK(pr.zero.norm() == 0.0);  // l = 0
}

TEST_CASE("penalty constants follow the sigma rule") {
  const Point p = point(3, 6, 0.6);
  const PenaltyConfig c = penalty_constants(p.kb, p.op.b, p.rep.gamma);
  CHECK(c.sigma > 0);
  CHECK(c.mu == doctest::Approx(0.5 * std::min(c.gamma, c.sigma * c.beta_min)));
  CHECK(c.sigma <= c.sigma_rule * (1 + 1e-12));
  PenaltyOptions o;
  o.sigma_override = 0.01;
  CHECK(penalty_constants(p.kb, p.op.b, p.rep.gamma, o).sigma == 0.01);
}

TEST_CASE("coercivity holds with the rule constants and fails when sigma is inflated") {
  for (double u : {-2.0, -0.6, 0.6, 2.0}) {
    const Point p = point(2, 6, u);
    const Projections pr = build_projections(p.kb);
    const PenaltyConfig c = penalty_constants(p.kb, p.op.b, p.rep.gamma);
    const CoercivityReport cr = coercivity_check(build_penalized_operator(p.op, c, pr));
    CHECK(cr.pass);
    CHECK(cr.min_eig >= cr.mu - 1e-10);

    PenaltyOptions big;
    big.sigma_override = 100.0 * c.sigma;
    const PenaltyConfig cb = penalty_constants(p.kb, p.op.b, p.rep.gamma, big);
    const CoercivityReport rb = coercivity_check(build_penalized_operator(p.op, cb, pr));
    CHECK(rb.min_eig < cr.mu);
  }
}

TEST_CASE("adjoint of the penalized operator is its transpose") {
  const Point p = point(2, 4, 0.4);
  const PenaltyConfig c = penalty_constants(p.kb, p.op.b, p.rep.gamma);
  const PenalizedOperator pen = build_penalized_operator(p.op, c, build_projections(p.kb));
  CHECK((pen.Lambda_adj - pen.Lambda.transpose()).norm() < 1e-13 * pen.Lambda.norm());
}

TEST_CASE("zero-block projections at u = 0") {
  const Point p = point(3, 6, 0.0);
  KernelBasis kb = build_kernel_basis(p.op, SignatureOptions{-1.0, 3});
  const Projections pr = build_projections(kb);
  // Pi0 aux_r = aux_r / alpha_r^2 scaled by |aux_r|^2.
  for (int r = 0; r < kb.sig.l; ++r) {
    const Vec a = kb.aux.col(r);
    Vec want = Vec::Zero(a.size());
    for (int s = 0; s < kb.sig.l; ++s)
      want += kb.aux.col(s) * (kb.aux.col(s).dot(a) / (kb.alpha(s) * kb.alpha(s)));
    CHECK((pr.zero * a - want).norm() < 1e-10 * want.norm());
  }
  CHECK(pr.zero_tilde.trace() == doctest::Approx(3.0));
}

#include <cmath>
#include <random>

#include <doctest.h>

#include "halfspace/kernel_spectral.hpp"

using namespace halfspace;

namespace {

struct Setup {
  ModelSpec model;
  DiscreteSpace space;
  LinearizedOperator op0;
};

Setup setup(const ModelSpec& m, int nodes) {
  Setup s;
  s.model = m;
  GridSpec g;
  g.dimension = m.dimension;
  g.nodes = nodes;
  s.space = build_space(m, g);
  s.op0 = build_bgk_operator(m, s.space, equilibrium(m, s.space), NuProfile{}, 0.0);
  return s;
}

ModelSpec mono(int d) {
  ModelSpec m;
  m.dimension = d;
  return m;
}

}  // namespace

TEST_CASE("monatomic degenerate speeds with multiplicities") {
  const Setup s = setup(mono(3), 6);
  const DegenerateSpeeds ds = degenerate_speeds(s.model, s.space);
  REQUIRE(ds.distinct.size() == 3);
  CHECK(ds.distinct[0].first == doctest::Approx(-std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(ds.distinct[0].second == 1);
  CHECK(ds.distinct[1].first == 0.0);
  CHECK(ds.distinct[1].second == 3);
  CHECK(ds.distinct[2].first == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));
  CHECK(ds.max_mismatch < 1e-12);
}

TEST_CASE("signatures in the monatomic regimes") {
  const Setup s = setup(mono(3), 6);
  const Vec v1 = s.space.velocity.col(0);
  const Mat& K = s.op0.kernel();
  auto sig_at = [&](double u, int forced = -1) {
    SignatureOptions o;
    o.forced_l = forced;
    return signature(K, (v1.array() + u).matrix(), u, o);
  };
  CHECK(sig_at(0.0, 3) == Signature{1, 1, 3});
  CHECK(sig_at(0.6) == Signature{4, 1, 0});
  CHECK(sig_at(2.0) == Signature{5, 0, 0});
  CHECK(sig_at(-0.6) == Signature{1, 4, 0});
  CHECK(sig_at(-2.0) == Signature{0, 5, 0});
  CHECK(sig_at(std::sqrt(5.0 / 3.0), 1) == Signature{4, 0, 1});
}

TEST_CASE("signature does not depend on the kernel basis") {
  const Setup s = setup(mono(2), 6);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  const Mat& K = s.op0.kernel();
  for (double u : {-1.7, -0.4, 0.3, 1.2, 2.5}) {
    const Vec b = (s.space.velocity.col(0).array() + u).matrix();
    const Signature ref = signature(K, b, u);
    for (int t = 0; t < 5; ++t) {
      Mat A(K.cols(), K.cols());
      for (int i = 0; i < A.size(); ++i) A(i) = nd(rng);
      A += 3.0 * Mat::Identity(K.cols(), K.cols());
      CHECK(signature(K * A, b, u) == ref);
    }
    CHECK(ref.k_plus + ref.k_minus + ref.l == K.cols());
  }
}

TEST_CASE("mixture supersonic signature") {
  ModelSpec m;
  m.family = Family::monatomic_mixture;
  m.species = {Species{}, Species{}};
  m.species[1].mass = 2.0;
  m.species[1].density = 0.5;
  const Setup s = setup(m, 4);
  const double u = 1.5 * closed_form_speeds(m).u_plus;
  const Vec b = (s.space.velocity.col(0).array() + u).matrix();
  CHECK(signature(s.op0.kernel(), b, u) == Signature{6, 0, 0});
}

TEST_CASE("kernel basis identities at regular and degenerate points") {
  const Setup s = setup(mono(3), 6);
  const double up = std::sqrt(5.0 / 3.0);
  for (auto [u, forced] : {std::pair{0.0, 3}, {0.5 * up, -1}, {up, 1}, {1.5 * up, -1}}) {
    const LinearizedOperator op = with_flow(s.op0, s.space, u);
    SignatureOptions o;
    o.forced_l = forced;
    const KernelBasis kb = build_kernel_basis(op, o);
    CHECK(basis_residuals(op, kb).max() < 1e-10);
    const int n = kb.sig.k_plus + kb.sig.k_minus;
    CHECK(kb.phi.cols() == n);
    CHECK(kb.psi.cols() == kb.sig.l);
    CHECK((kb.phi.transpose() * kb.phi - Mat::Identity(n, n)).norm() < 1e-12);
    for (int i = 0; i < kb.sig.k_plus; ++i) CHECK(kb.beta(i) > 0);
    for (int i = kb.sig.k_plus; i < n; ++i) CHECK(kb.beta(i) < 0);
    for (int i = 1; i < kb.alpha.size(); ++i) CHECK(kb.alpha(i - 1) >= kb.alpha(i));
    for (int i = 1; i < kb.gamma.size(); ++i) CHECK(kb.gamma(i - 1) >= kb.gamma(i));
  }
}

TEST_CASE("psi block at u = 0 spans transverse momentum and a |v|^2 combination") {
  const Setup s = setup(mono(3), 6);
  const KernelBasis kb = build_kernel_basis(s.op0, SignatureOptions{-1.0, 3});
  REQUIRE(kb.psi.cols() == 3);
  // Transverse momenta sqrt(M) v2, sqrt(M) v3 in weighted coordinates lie in span(psi).
  const EquilibriumState eq = equilibrium(s.model, s.space);
  const Mat P = kb.psi * kb.psi.transpose();
  for (int c : {1, 2}) {
    Vec t = s.space.to_weighted(eq.root.cwiseProduct(s.space.velocity.col(c)));
    t.normalize();
    CHECK((P * t - t).norm() < 1e-10);
  }
}

TEST_CASE("generic speeds follow the grid when the closed forms are off") {
  const Setup s = setup(mono(1), 6);
  const DegenerateSpeeds ds = degenerate_speeds(s.op0.kernel(), s.space.velocity.col(0));
  REQUIRE(ds.values.size() == 3);
  CHECK(ds.values[2] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK_FALSE(ds.closed.has_value());
}

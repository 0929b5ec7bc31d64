#include "halfspace/collision_operator.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace halfspace {

KernelSpan kernel_span(const Mat& invariants_nodal, const DiscreteSpace& space) {
  KernelSpan ks;
  ks.invariants = space.sqrt_weight().asDiagonal() * invariants_nodal;
  Eigen::JacobiSVD<Mat> svd(ks.invariants, Eigen::ComputeThinU);
  const Vec& sv = svd.singularValues();
  const int n = static_cast<int>(ks.invariants.cols());
  if (n == 0 || !(sv(0) > 0) || sv(n - 1) < 1e-10 * sv(0)) {
    std::ostringstream os;
    os << "kernel span is rank deficient (sigma_min/sigma_max = "
       << (n ? sv(n - 1) / sv(0) : 0.0) << "); refine the grid";
    throw numeric_error(os.str());
  }
  // Gram-Schmidt order keeps the basis tied to the invariant ordering.
  Eigen::HouseholderQR<Mat> qr(ks.invariants);
  ks.basis = qr.householderQ() * Mat::Identity(ks.invariants.rows(), n);
  return ks;
}

Vec collision_frequency(const DiscreteSpace& space, const NuProfile& profile) {
  const int N = space.size();
  Vec nu(N);
  const Vec sp = space.speed();
  for (int k = 0; k < N; ++k) {
    const int a = space.species_of(k);
    const double s = a < static_cast<int>(profile.species_scale.size()) ? profile.species_scale[a] : 1.0;
    nu(k) = s * (1.0 + sp(k));
  }
  return nu;
}

Mat OperatorSpectrum::pinv_apply(const Mat& rhs) const {
  const int N = static_cast<int>(values.size());
  const Mat Vr = vectors.rightCols(N - kernel_dim);
  const Vec inv = values.tail(N - kernel_dim).cwiseInverse();
  return Vr * (inv.asDiagonal() * (Vr.transpose() * rhs));
}

const OperatorSpectrum& OperatorCore::spectrum() const {
  std::call_once(once_, [this] {
    Eigen::SelfAdjointEigenSolver<Mat> es(L);
    spectrum_.values = es.eigenvalues();
    spectrum_.vectors = es.eigenvectors();
    const double vmax = spectrum_.values.cwiseAbs().maxCoeff();
    spectrum_.threshold = 1e-10 * vmax;
    int kd = 0;
    for (int i = 0; i < spectrum_.values.size(); ++i)
      if (std::abs(spectrum_.values(i)) <= spectrum_.threshold) ++kd;
    spectrum_.kernel_dim = kd;
  });
  return spectrum_;
}

LinearizedOperator build_bgk_operator(const ModelSpec& model, const DiscreteSpace& space,
                                      const EquilibriumState& eq, const NuProfile& profile,
                                      double u, Execution ex) {
  auto core = std::make_shared<OperatorCore>();
  core->kernel = kernel_span(collision_invariants(model, space, eq), space);
  core->nu = collision_frequency(space, profile);
  core->speed = space.speed();
  core->nu_minus = profile.nu_minus;
  core->nu_plus = profile.nu_plus;
  // nu-orthonormalize: Phi = X G^{-1/2} with G = X^T diag(nu) X.
  const Mat& X = core->kernel.invariants;
  const Mat G = weighted_gram(X, core->nu, X, ex);
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  if (es.eigenvalues().minCoeff() <= 1e-20 * es.eigenvalues().maxCoeff())
    throw numeric_error("nu-orthonormalization failed: invariants rank deficient on this grid");
  const Mat phi = X * es.operatorInverseSqrt();
  core->L = assemble_bgk(core->nu, phi, ex);
  LinearizedOperator op;
  op.core = core;
  op.u = u;
  op.b = space.velocity.col(0).array() + u;
  return op;
}

LinearizedOperator with_transport(const LinearizedOperator& op, const Vec& b, double u) {
  LinearizedOperator r = op;
  r.b = b;
  r.u = u;
  return r;
}

LinearizedOperator with_flow(const LinearizedOperator& op, const DiscreteSpace& space, double u) {
  return with_transport(op, space.velocity.col(0).array() + u, u);
}

AssumptionReport validate_assumptions(const LinearizedOperator& op) {
  AssumptionReport r;
  const Mat& L = op.L();
  const int N = op.size();
  r.symmetry_residual = (L - L.transpose()).cwiseAbs().maxCoeff();
  const OperatorSpectrum& sp = op.core->spectrum();
  r.min_eigenvalue = sp.values(0);
  const Mat& X = op.core->kernel.invariants;
  for (int i = 0; i < X.cols(); ++i)
    r.kernel_residual = std::max(r.kernel_residual, (L * X.col(i)).norm() / X.col(i).norm());
  r.kernel_dim_expected = op.kernel_dim();
  r.kernel_dim_measured = sp.kernel_dim;
  r.min_abs_b = op.b.cwiseAbs().minCoeff();
  r.ker_b_trivial = r.min_abs_b > 1e-10 * (1.0 + op.b.cwiseAbs().maxCoeff());
  r.nu_band_ok = true;
  for (int k = 0; k < N; ++k) {
    const double ratio = op.core->nu(k) / (1.0 + op.core->speed(k));
    if (ratio < op.core->nu_minus * (1 - 1e-12) || ratio > op.core->nu_plus * (1 + 1e-12))
      r.nu_band_ok = false;
  }

  const int m = N - sp.kernel_dim;
  if (m > 0) {
    const Mat Q = sp.range();
    const Mat A = sp.values.tail(m).asDiagonal();
    r.reduced_min_modulus = sp.values(sp.kernel_dim);
    Mat Bm = Q.transpose() * op.b.cwiseAbs().asDiagonal() * Q;
    Bm.diagonal().array() += 1.0;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> g1(A, Bm, Eigen::EigenvaluesOnly);
    r.gamma = g1.eigenvalues().minCoeff();
    const Mat Nm = Q.transpose() * op.core->nu.asDiagonal() * Q;
    Eigen::GeneralizedSelfAdjointEigenSolver<Mat> g2(A, Nm, Eigen::EigenvaluesOnly);
    r.lambda_nu = g2.eigenvalues().minCoeff();
  }

  auto fail = [&](const std::string& s) { r.failures.push_back(s); };
  const double scale = L.cwiseAbs().maxCoeff();
  if (r.symmetry_residual > 1e-12 * scale) fail("L is not symmetric");
  if (r.min_eigenvalue < -1e-10 * scale) fail("L is not positive semidefinite");
  if (r.kernel_residual > 1e-12 * std::max(1.0, scale)) fail("L does not annihilate the kernel span");
  if (r.kernel_dim_measured != r.kernel_dim_expected) fail("dim ker L differs from the kernel span");
  if (!r.ker_b_trivial) {
    std::ostringstream os;
    os << "ker B != {0}: min |v + u| = " << r.min_abs_b;
    fail(os.str());
  }
  if (!r.nu_band_ok) fail("collision frequency outside the nu band");
  if (!(r.gamma > 1e-12)) {
    std::ostringstream os;
    os << "L >= gamma (1 + |B|) fails: gamma = " << r.gamma;
    fail(os.str());
  }
  r.pass = r.failures.empty();
  return r;
}

}  // namespace halfspace

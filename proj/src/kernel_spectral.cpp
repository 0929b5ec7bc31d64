#include "halfspace/kernel_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace halfspace {

namespace {

Mat orthonormalize(const Mat& span) {
  Eigen::HouseholderQR<Mat> qr(span);
  return qr.householderQ() * Mat::Identity(span.rows(), span.cols());
}

// Flip each column so its largest-magnitude entry is positive.
void fix_signs(Mat& M) {
  for (int j = 0; j < M.cols(); ++j) {
    Eigen::Index i;
    M.col(j).cwiseAbs().maxCoeff(&i);
    if (M(i, j) < 0) M.col(j) *= -1.0;
  }
}

struct Classified {
  std::vector<int> pos, neg, zero;
};

Classified classify(const Vec& ev, double u, SignatureOptions opt) {
  const int n = static_cast<int>(ev.size());
  Classified c;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (opt.forced_l >= 0) {
    if (opt.forced_l > n) throw usage_error("signature: forced l exceeds kernel dimension");
    std::vector<int> byabs = order;
    std::stable_sort(byabs.begin(), byabs.end(),
                     [&](int a, int b) { return std::abs(ev(a)) < std::abs(ev(b)); });
    std::vector<bool> isz(n, false);
    for (int i = 0; i < opt.forced_l; ++i) isz[byabs[i]] = true;
    for (int i : order) (isz[i] ? c.zero : ev(i) > 0 ? c.pos : c.neg).push_back(i);
  } else {
    const double knorm = n ? ev.cwiseAbs().maxCoeff() : 0.0;
    const double tol = opt.zero_tol >= 0 ? opt.zero_tol : 1e-8 * (1.0 + std::abs(u)) * knorm;
    for (int i : order) {
      if (std::abs(ev(i)) <= tol) c.zero.push_back(i);
      else if (ev(i) > 0) c.pos.push_back(i);
      else c.neg.push_back(i);
    }
  }
  // Eigenvalues arrive ascending: positives descending, negatives ascending.
  std::reverse(c.pos.begin(), c.pos.end());
  return c;
}

}  // namespace

Signature signature(const Mat& span, const Vec& b, double u, SignatureOptions opt) {
  const Mat Q = orthonormalize(span);
  const Mat K = Q.transpose() * b.asDiagonal() * Q;
  Eigen::SelfAdjointEigenSolver<Mat> es(K, Eigen::EigenvaluesOnly);
  const Classified c = classify(es.eigenvalues(), u, opt);
  return {static_cast<int>(c.pos.size()), static_cast<int>(c.neg.size()),
          static_cast<int>(c.zero.size())};
}

KernelBasis orthogonal_kernel_basis(const Mat& span, const Vec& b, double u,
                                    SignatureOptions opt) {
  const Mat Q = orthonormalize(span);
  const Mat K = Q.transpose() * b.asDiagonal() * Q;
  Eigen::SelfAdjointEigenSolver<Mat> es(K);
  const Vec& ev = es.eigenvalues();
  const Classified c = classify(ev, u, opt);

  KernelBasis kb;
  kb.u = u;
  kb.sig = {static_cast<int>(c.pos.size()), static_cast<int>(c.neg.size()),
            static_cast<int>(c.zero.size())};
  const int nb = kb.sig.k_plus + kb.sig.k_minus;
  kb.phi.resize(Q.rows(), nb);
  kb.beta.resize(nb);
  int j = 0;
  for (int i : c.pos) kb.phi.col(j++) = Q * es.eigenvectors().col(i);
  for (int i : c.neg) kb.phi.col(j++) = Q * es.eigenvectors().col(i);
  kb.psi.resize(Q.rows(), kb.sig.l);
  j = 0;
  for (int i : c.zero) kb.psi.col(j++) = Q * es.eigenvectors().col(i);
  fix_signs(kb.phi);
  fix_signs(kb.psi);

  const Vec bneg = (-b.array()).max(0.0);
  kb.beta_minus.resize(nb);
  for (int i = 0; i < nb; ++i) {
    kb.beta(i) = kb.phi.col(i).dot(b.cwiseProduct(kb.phi.col(i)));
    kb.beta_minus(i) = kb.phi.col(i).dot(bneg.cwiseProduct(kb.phi.col(i)));
  }
  kb.beta_min = nb ? kb.beta.cwiseAbs().minCoeff() : 0.0;
  kb.beta_hat_max = 0.0;
  for (int i = kb.sig.k_plus; i < nb; ++i)
    kb.beta_hat_max = std::max(kb.beta_hat_max, kb.beta_minus(i) / std::abs(kb.beta(i)));
  kb.alpha.resize(0);
  kb.gamma.resize(0);
  return kb;
}

void diagonalize_zero_block(const Vec& b, KernelBasis& kb) {
  const int l = kb.sig.l;
  if (l == 0) {
    kb.U.resize(0, 0);
    kb.gamma.resize(0);
    kb.psi_rot = kb.psi;
    kb.aux_rot = kb.aux;
    kb.gamma1 = 0.0;
    return;
  }
  const Mat Bpsi = b.asDiagonal() * kb.psi;
  Mat G = Bpsi.transpose() * Bpsi;
  G = 0.5 * (G + G.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  kb.U.resize(l, l);
  kb.gamma.resize(l);
  for (int r = 0; r < l; ++r) {
    kb.U.col(r) = es.eigenvectors().col(l - 1 - r);
    kb.gamma(r) = es.eigenvalues()(l - 1 - r);
  }
  kb.psi_rot = kb.psi * kb.U;
  kb.aux_rot = kb.aux.cols() == l ? Mat(kb.aux * kb.U) : Mat();
  kb.gamma1 = kb.gamma(0);
}

void auxiliary_basis(const LinearizedOperator& op, KernelBasis& kb) {
  const int l = kb.sig.l;
  const Vec& b = op.b;
  if (l == 0) {
    kb.aux.resize(op.size(), 0);
    kb.alpha.resize(0);
    diagonalize_zero_block(b, kb);
    return;
  }
  const Mat Bpsi = b.asDiagonal() * kb.psi;
  const Mat& Z = op.kernel();
  const double leak = (Z.transpose() * Bpsi).cwiseAbs().maxCoeff();
  if (leak > 1e-10 * std::max(1.0, Bpsi.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "B psi is not in Im L (kernel component " << leak << ")";
    throw numeric_error(os.str());
  }
  Mat aux = op.core->spectrum().pinv_apply(Bpsi);
  // Make B aux orthogonal to Z+ and Z- by adding kernel components.
  const int nb = static_cast<int>(kb.phi.cols());
  for (int i = 0; i < nb; ++i) {
    const Vec Bphi = b.cwiseProduct(kb.phi.col(i));
    for (int r = 0; r < l; ++r) aux.col(r) -= (Bphi.dot(aux.col(r)) / kb.beta(i)) * kb.phi.col(i);
  }
  // Rotate the zero block so (B psi_r | aux_s) is diagonal.
  Mat A = Bpsi.transpose() * aux;
  A = 0.5 * (A + A.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  Mat R(l, l);
  Vec alpha(l);
  for (int r = 0; r < l; ++r) {
    R.col(r) = es.eigenvectors().col(l - 1 - r);
    alpha(r) = es.eigenvalues()(l - 1 - r);
  }
  if (!(alpha.minCoeff() > 0)) throw numeric_error("auxiliary basis: alpha must be positive");
  Mat psi = kb.psi * R;
  aux = aux * R;
  for (int r = 0; r < l; ++r) {
    // Sign convention on psi; aux follows.
    Eigen::Index i;
    psi.col(r).cwiseAbs().maxCoeff(&i);
    if (psi(i, r) < 0) {
      psi.col(r) *= -1.0;
      aux.col(r) *= -1.0;
    }
  }
  // Add psi components so (B aux_r | aux_s) = 0.
  const Mat Baux = b.asDiagonal() * aux;
  const Mat C = Baux.transpose() * aux;
  Mat fixed = aux;
  for (int r = 0; r < l; ++r) {
    for (int s = r + 1; s < l; ++s) fixed.col(r) -= (C(r, s) / alpha(s)) * psi.col(s);
    fixed.col(r) -= (C(r, r) / (2.0 * alpha(r))) * psi.col(r);
  }
  kb.psi = psi;
  kb.aux = fixed;
  kb.alpha.resize(l);
  const Mat Laux = op.L() * kb.aux;
  for (int r = 0; r < l; ++r) kb.alpha(r) = Laux.col(r).dot(kb.aux.col(r));
  diagonalize_zero_block(b, kb);
}

KernelBasis build_kernel_basis(const LinearizedOperator& op, SignatureOptions opt) {
  KernelBasis kb = orthogonal_kernel_basis(op.kernel(), op.b, op.u, opt);
  auxiliary_basis(op, kb);
  return kb;
}

double BasisResiduals::max() const {
  return std::max({c2, aux_equation, c4, c5, alpha, e11, e12});
}

BasisResiduals basis_residuals(const LinearizedOperator& op, const KernelBasis& kb) {
  BasisResiduals r;
  const Vec& b = op.b;
  const int nb = static_cast<int>(kb.phi.cols());
  const int l = kb.sig.l;
  Mat Z(op.size(), nb + l);
  Z << kb.phi, kb.psi;
  Mat D = Mat::Zero(nb + l, nb + l);
  D.diagonal().head(nb) = kb.beta;
  r.c2 = std::max((Z.transpose() * Z - Mat::Identity(nb + l, nb + l)).cwiseAbs().maxCoeff(),
                  (Z.transpose() * b.asDiagonal() * Z - D).cwiseAbs().maxCoeff());
  if (l > 0) {
    const Mat Bpsi = b.asDiagonal() * kb.psi;
    const Mat Baux = b.asDiagonal() * kb.aux;
    r.aux_equation = (op.L() * kb.aux - Bpsi).cwiseAbs().maxCoeff();
    Mat A = Bpsi.transpose() * kb.aux;
    A.diagonal() -= kb.alpha;
    r.c4 = std::max(nb ? (kb.phi.transpose() * Baux).cwiseAbs().maxCoeff() : 0.0,
                    A.cwiseAbs().maxCoeff());
    r.c5 = (Baux.transpose() * kb.aux).cwiseAbs().maxCoeff();
    r.alpha = (A.diagonal()).cwiseAbs().maxCoeff();
    const Mat Bpr = b.asDiagonal() * kb.psi_rot;
    Mat G = Bpr.transpose() * Bpr;
    G.diagonal() -= kb.gamma;
    r.e11 = G.cwiseAbs().maxCoeff();
    r.e12 = std::max((kb.psi_rot.transpose() * kb.psi_rot - Mat::Identity(l, l)).cwiseAbs().maxCoeff(),
                     (kb.U.transpose() * kb.U - Mat::Identity(l, l)).cwiseAbs().maxCoeff());
  }
  return r;
}

DegenerateSpeeds degenerate_speeds(const Mat& kernel_basis, const Vec& v1) {
  const Mat Q = orthonormalize(kernel_basis);
  const Mat K0 = Q.transpose() * v1.asDiagonal() * Q;
  Eigen::SelfAdjointEigenSolver<Mat> es(K0, Eigen::EigenvaluesOnly);
  DegenerateSpeeds ds;
  const int n = static_cast<int>(K0.rows());
  for (int i = n - 1; i >= 0; --i) ds.values.push_back(-es.eigenvalues()(i));
  const double tol = 1e-8 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff());
  for (double v : ds.values) {
    if (!ds.distinct.empty() && std::abs(v - ds.distinct.back().first) <= tol) {
      auto& [val, mult] = ds.distinct.back();
      val = (val * mult + v) / (mult + 1);
      ++mult;
    } else {
      ds.distinct.push_back({v, 1});
    }
  }
  // A cluster at roundoff level is the zero speed.
  for (auto& [val, mult] : ds.distinct)
    if (std::abs(val) <= 1e-12 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff())) val = 0.0;
  return ds;
}

DegenerateSpeeds degenerate_speeds(const ModelSpec& model, const DiscreteSpace& space, double tol) {
  const EquilibriumState eq = equilibrium(model, space);
  const KernelSpan ks = kernel_span(collision_invariants(model, space, eq), space);
  DegenerateSpeeds ds = degenerate_speeds(ks.basis, space.velocity.col(0));
  ds.closed = closed_form_speeds(model);
  if (ds.distinct.size() != 3) {
    if (tol > 0) throw numeric_error("degenerate speeds: expected three distinct values");
    return ds;
  }
  ds.max_mismatch = std::max({std::abs(ds.distinct[0].first - ds.closed->u_minus),
                              std::abs(ds.distinct[1].first - ds.closed->u0),
                              std::abs(ds.distinct[2].first - ds.closed->u_plus)});
  if (tol > 0 && ds.max_mismatch > tol) {
    std::ostringstream os;
    os << "degenerate speeds: generic and closed form differ by " << ds.max_mismatch
       << " > " << tol;
    throw numeric_error(os.str());
  }
  return ds;
}

}  // namespace halfspace

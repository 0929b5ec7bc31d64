#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "halfspace/collision_operator.hpp"

namespace halfspace {

struct Signature {
  int k_plus = 0;
  int k_minus = 0;
  int l = 0;
  bool operator==(const Signature&) const = default;
};

/// zero_tol < 0 selects tau_l = 1e-8 (1 + |u|) ||K||. forced_l >= 0 declares the
/// point degenerate with that multiplicity: the forced_l eigenvalues closest to
/// zero are taken as zero.
struct SignatureOptions {
  double zero_tol = -1.0;
  int forced_l = -1;
};

/// Inertia of (B phi | phi) on the span of the columns of `span` (any basis).
Signature signature(const Mat& span, const Vec& b, double u, SignatureOptions opt = {});

/// Kernel basis adapted to B.
///
/// phi: columns with (B phi_i | phi_j) = beta_i delta_ij, positives first
/// (descending) then negatives (ascending). psi: the zero block. aux: vectors
/// with L aux_r = B psi_r, B aux_r orthogonal to Z+ + Z-, (B psi_r | aux_s) =
/// alpha_r delta_rs and (B aux_r | aux_s) = 0; psi is ordered by alpha
/// descending. psi_rot / aux_rot / gamma: rotation diagonalizing
/// (B psi_r | B psi_s), gamma descending.
struct KernelBasis {
  double u = 0.0;
  Signature sig;
  Mat phi;
  Vec beta;
  Vec beta_minus;  ///< (|B| phi_i | phi_i) restricted to h-
  Mat psi;
  Mat aux;
  Vec alpha;
  Mat U;
  Mat psi_rot;
  Mat aux_rot;
  Vec gamma;
  double gamma1 = 0.0;
  double beta_min = 0.0;
  double beta_hat_max = 0.0;

  Mat phi_plus() const { return phi.leftCols(sig.k_plus); }
  Mat phi_minus() const { return phi.rightCols(sig.k_minus); }
};

KernelBasis orthogonal_kernel_basis(const Mat& span, const Vec& b, double u,
                                    SignatureOptions opt = {});

/// Fills aux, alpha and the zero-block rotation. Throws if B psi_r is not in Im L.
void auxiliary_basis(const LinearizedOperator& op, KernelBasis& basis);

/// (gamma_r, U) rotation of the zero block; l = 0 gives gamma1 = 0.
void diagonalize_zero_block(const Vec& b, KernelBasis& basis);

KernelBasis build_kernel_basis(const LinearizedOperator& op, SignatureOptions opt = {});

struct BasisResiduals {
  double c2 = 0.0;
  double aux_equation = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double alpha = 0.0;
  double e11 = 0.0;
  double e12 = 0.0;
  double max() const;
};

BasisResiduals basis_residuals(const LinearizedOperator& op, const KernelBasis& basis);

struct DegenerateSpeeds {
  std::vector<double> values;                 ///< -eig(K0), ascending, with repeats
  std::vector<std::pair<double, int>> distinct;
  std::optional<ClosedFormSpeeds> closed;
  double max_mismatch = 0.0;                  ///< against the closed forms
};

/// Generic method: -eig(K0) with (K0)_ij = (v1 phi_i | phi_j) on an orthonormal
/// kernel basis (weighted coordinates).
DegenerateSpeeds degenerate_speeds(const Mat& kernel_basis, const Vec& v1);

/// Generic values on `space` plus the family closed forms; throws when they
/// differ by more than `tol` (tol <= 0 disables the check).
DegenerateSpeeds degenerate_speeds(const ModelSpec& model, const DiscreteSpace& space,
                                   double tol = 1e-6);

}  // namespace halfspace

#pragma once

#include "halfspace/kernel_spectral.hpp"

namespace halfspace {

/// Vectors entering the penalty terms. The standard choice takes phi_plus, psi,
/// aux and alpha from a KernelBasis at the same u; the frozen-basis regime
/// scheme supplies other blocks.
struct PenaltyBasis {
  Mat plus;
  Mat psi;
  Mat aux;
  Vec alpha;
};

PenaltyBasis penalty_basis(const KernelBasis& basis);

/// Pi_+ = sum phi_i phi_i^T (positive block), Pi_0 = sum aux_r aux_r^T / alpha_r^2,
/// Pi0~ = sum psi_s psi_s^T. Weighted coordinates.
struct Projections {
  Mat plus;
  Mat zero;
  Mat zero_tilde;
};

Projections build_projections(const PenaltyBasis& pb);
inline Projections build_projections(const KernelBasis& kb) {
  return build_projections(penalty_basis(kb));
}

struct PenaltyOptions {
  double eps1 = 0.5;
  double eps2 = 0.5;
  double sigma_override = -1.0;  ///< > 0 replaces the sigma rule (alpha, beta, mu follow)
};

struct PenaltyConfig {
  double sigma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double eps = 1.0;
  double eps1 = 0.5;
  double eps2 = 0.5;
  double mu = 0.0;
  double arg1 = 0.0, arg2 = 0.0, arg3 = 0.0;  ///< the three terms of the max
  double sigma_rule = 0.0;                      ///< gamma / max(arg1, arg2, arg3)
  double beta_min = 0.0;
  double beta_hat_max = 0.0;
  double gamma = 0.0;
  double gamma1 = 0.0;
};

/// Constants for Lambda from the basis and the coercivity constant gamma.
/// Throws when beta_min = 0 (a degenerate u: use the frozen-basis scheme).
PenaltyConfig penalty_constants(const KernelBasis& basis, const Vec& b, double gamma,
                                PenaltyOptions opt = {});

struct PenalizedOperator {
  Mat Lambda;
  Mat Lambda_adj;
  Projections proj;
  PenaltyConfig config;
};

/// Lambda = L - sigma B + alpha Pi_+ B + beta B Pi_0 B and its adjoint.
PenalizedOperator build_penalized_operator(const LinearizedOperator& op,
                                           const PenaltyConfig& config,
                                           const Projections& proj);

struct CoercivityReport {
  double min_eig = 0.0;
  double mu = 0.0;
  double sigma = 0.0, alpha = 0.0, beta = 0.0;
  bool pass = false;
};

/// Smallest eigenvalue of (Lambda + Lambda^T)/2 against mu.
CoercivityReport coercivity_check(const PenalizedOperator& pen);

}  // namespace halfspace

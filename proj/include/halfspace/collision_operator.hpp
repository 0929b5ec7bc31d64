#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "halfspace/model_catalog.hpp"
#include "halfspace/parallel.hpp"

namespace halfspace {

/// Kernel spanning set in weighted coordinates plus an orthonormal basis of it.
struct KernelSpan {
  Mat invariants;
  Mat basis;
};

/// Builds the span from nodal invariants; throws if they are rank deficient
/// (singular values below 1e-10 * max).
KernelSpan kernel_span(const Mat& invariants_nodal, const DiscreteSpace& space);

/// nu_k = scale(species) * (1 + |v_k|).
struct NuProfile {
  std::vector<double> species_scale;
  double nu_minus = 1.0;
  double nu_plus = 1.0;
};

Vec collision_frequency(const DiscreteSpace& space, const NuProfile& profile);

/// Eigendecomposition of L with the kernel identified by relative threshold.
struct OperatorSpectrum {
  Vec values;    ///< ascending
  Mat vectors;
  int kernel_dim = 0;
  double threshold = 0.0;

  /// Pseudo-inverse applied to a block of vectors.
  Mat pinv_apply(const Mat& rhs) const;
  /// Orthonormal basis of Im L.
  Mat range() const { return vectors.rightCols(values.size() - kernel_dim); }
};

/// Symmetric PSD operator L in weighted coordinates with its kernel span and
/// collision frequency. Shared and immutable; the spectrum is computed once.
struct OperatorCore {
  Mat L;
  Vec nu;
  KernelSpan kernel;
  double nu_minus = 1.0, nu_plus = 1.0;
  Vec speed;
  const OperatorSpectrum& spectrum() const;

 private:
  mutable std::once_flag once_;
  mutable OperatorSpectrum spectrum_;
};

/// L together with a diagonal transport matrix B = diag(b) (b = v1 + u).
struct LinearizedOperator {
  std::shared_ptr<const OperatorCore> core;
  Vec b;
  double u = 0.0;

  const Mat& L() const { return core->L; }
  const Mat& kernel() const { return core->kernel.basis; }
  int size() const { return static_cast<int>(b.size()); }
  int kernel_dim() const { return static_cast<int>(core->kernel.basis.cols()); }
};

LinearizedOperator build_bgk_operator(const ModelSpec& model, const DiscreteSpace& space,
                                      const EquilibriumState& eq, const NuProfile& profile,
                                      double u, Execution ex = Execution::parallel);

/// Same L, new transport vector.
LinearizedOperator with_transport(const LinearizedOperator& op, const Vec& b, double u = 0.0);
/// Same L, B = v1 + u on the given space.
LinearizedOperator with_flow(const LinearizedOperator& op, const DiscreteSpace& space, double u);

struct AssumptionReport {
  double symmetry_residual = 0.0;
  double min_eigenvalue = 0.0;
  double kernel_residual = 0.0;
  int kernel_dim_expected = 0;
  int kernel_dim_measured = 0;
  double min_abs_b = 0.0;
  bool ker_b_trivial = false;
  bool nu_band_ok = false;
  double gamma = 0.0;
  double reduced_min_modulus = 0.0;
  double lambda_nu = 0.0;
  bool pass = false;
  std::vector<std::string> failures;
};

AssumptionReport validate_assumptions(const LinearizedOperator& op);

}  // namespace halfspace

#pragma once

#include <optional>
#include <vector>

#include <Eigen/LU>

#include "halfspace/modal.hpp"
#include "halfspace/penalization.hpp"

namespace halfspace {

/// Eigenpairs of the pencil Lambda w = lambda B w; stable modes have Re lambda > 0.
struct ModeDecomposition {
  CVec lambda;
  CMat vectors;
  std::vector<int> stable;
  int dim_plus = 0;
  double min_abs_real = 0.0;
  bool inertia_ok() const { return static_cast<int>(stable.size()) == dim_plus; }
};

/// Throws when an eigenvalue lies within 1e-10 of the imaginary axis.
ModeDecomposition transport_modes(const Mat& Lambda, const Vec& b);

/// R~ = P+ - c P P- (rows on h+) and R~* = c P+ - P P-. c = 0 is complete
/// absorption; c != 0 needs an exact mirror pairing.
struct BoundaryOperator {
  double c = 0.0;
  std::vector<int> plus;
  Mat tilde;
  Mat tilde_adj;
};

BoundaryOperator make_boundary(const HalfSpaceSplit& split, double c);

/// Finite sum of exp(-a_k x) s_k.
struct SourceTerm {
  std::vector<double> rates;
  std::vector<Vec> vectors;

  bool empty() const { return rates.empty(); }
  void add(double a, const Vec& s) {
    rates.push_back(a);
    vectors.push_back(s);
  }
  double min_rate() const;
  ModalProfile profile(int n) const;
};

/// Rates positive and every s_k orthogonal to the kernel span (tolerance relative to |s_k|).
void check_source(const SourceTerm& S, const Mat& kernel_basis, double tol = 1e-10);

/// Geometric x samples: 0 plus points - 1 values from 1e-3/sigma to 10/sigma.
std::vector<double> x_grid(double sigma, int points = 64);

struct ContextOptions {
  double accommodation = 0.0;
  PenaltyOptions penalty;
  SignatureOptions signature;
};

/// Everything fixed by (L, B, R~, penalty): the pencil modes and the boundary
/// fit that maps data on h+ to g(0).
struct PenalizedContext {
  LinearizedOperator op;
  HalfSpaceSplit split;
  BoundaryOperator bc;
  KernelBasis basis;
  PenaltyBasis pb;
  PenaltyConfig config;
  PenalizedOperator pen;
  ModeDecomposition modes;
  CMat stable_vectors;
  Eigen::FullPivLU<CMat> fit_lu;  ///< R~ restricted to the stable modes
  CMat trace_map;  ///< N x |h+|: boundary data on h+ to g(0)
  double fit_condition = 0.0;
  double gamma = 0.0;
  bool square = true;  ///< stable-mode count equals dim h+

  int conditions() const { return static_cast<int>(pb.plus.cols() + pb.psi.cols()); }
  /// Rows: penalty block vectors (plus then psi), as functionals f -> (B f | y).
  Mat condition_functionals() const;
};

PenalizedContext make_context(const LinearizedOperator& op, const HalfSpaceSplit& split,
                              const ContextOptions& opt = {});
/// With require_square = false a pencil with more stable modes than dim h+ is
/// accepted; only admissible_boundary (joint solve) is then available.
PenalizedContext make_context(const LinearizedOperator& op, const HalfSpaceSplit& split,
                              const KernelBasis& basis, const PenaltyBasis& pb,
                              const PenaltyConfig& config, double accommodation,
                              bool require_square = true);

struct PenalizedSolution {
  ModalProfile g;
  double boundary_residual = 0.0;
  double equation_residual = 0.0;
};

/// B g' + Lambda g = S, R~ g(0) = g_b, g -> 0. Weighted coordinates throughout.
PenalizedSolution solve_penalized(const PenalizedContext& ctx, const Vec& g_b,
                                  const SourceTerm& S);

struct Prop1Check {
  double lhs = 0.0;          ///< mu |g|
  double rhs_printed = 0.0;  ///< |S| + |Lambda f_b| / sqrt(2 sigma) + sqrt(sigma/2) |B f_b|
  double rhs_lifted = 0.0;   ///< printed bound plus mu |f_b| / sqrt(2 sigma)
  bool printed_holds = false;
  bool lifted_holds = false;
};

Prop1Check proposition1_check(const PenalizedContext& ctx, const PenalizedSolution& sol,
                              const Vec& g_b, const SourceTerm& S);

struct NormalizedSource {
  SourceTerm shifted;       ///< rates a_k - sigma, psi-moment-free vectors
  Vec boundary_shift;       ///< added to f_b
  ModalProfile correction;  ///< -sum_r psi_r sum_k c_rk exp(-a_k x)
};

NormalizedSource source_normalize(const SourceTerm& S, const KernelBasis& basis,
                                  const Vec& b, const BoundaryOperator& bc, double sigma);

struct RemovalReport {
  Vec residual;                   ///< (B g(0) | y) over the plus block, then psi
  double phi_law = 0.0;           ///< worst relative deviation from exp(-sigma x)
  double psi_law = 0.0;           ///< same for exp((sigma - sqrt(beta/alpha_s)) x)
  bool psi_law_applicable = false;
  double undamped_residual = 0.0; ///< |B g' + (L - sigma B) g - S| on the x grid
  double max_abs() const { return residual.size() ? residual.cwiseAbs().maxCoeff() : 0.0; }
};

RemovalReport removal_conditions(const PenalizedContext& ctx, const PenalizedSolution& sol,
                                 const SourceTerm& S);

/// Columns: removal residuals of the homogeneous solutions with data d_j.
Mat condition_matrix(const PenalizedContext& ctx, const Mat& directions);

struct AdmissibleResult {
  Vec g_b;
  Vec t;
  Mat C;
  int rank = 0;
  int free_parameters = 0;
  PenalizedSolution solution;
  RemovalReport removal;
};

/// Corrects g_b0 along `directions` (columns supported on h+) so the removal
/// conditions vanish. Throws when the condition matrix has rank below the
/// number of conditions and `require_full_rank` is set.
AdmissibleResult admissible_boundary(const PenalizedContext& ctx, const Vec& g_b0,
                                     const Mat& directions, const SourceTerm& S,
                                     bool require_full_rank = true);

/// Unit vectors on h+.
Mat plus_unit_directions(const HalfSpaceSplit& split);

struct ProbeReport {
  double plus_error = 0.0;  ///< max |Pi+ B h_i(0) - beta_i phi_i|, |Pi0~ B h_i(0)|
  double zero_error = 0.0;  ///< max |Pi0~ B h~_r(0) - alpha_r psi_r|, |Pi+ B h~_r(0)|
  int codimension = 0;
  int expected = 0;
};

ProbeReport verify_probes(const PenalizedContext& ctx);

struct TransportSolution {
  Signature sig;
  PenaltyConfig config;
  ModeDecomposition modes;
  double sigma = 0.0;
  ModalProfile g;
  ModalProfile f;
  Vec f_b;
  Vec t;
  int conditions = 0;
  int free_parameters = 0;
  int condition_rank = 0;
  double boundary_residual = 0.0;
  double equation_residual = 0.0;
  double removal_residual = 0.0;
  double undamped_residual = 0.0;
  double phi_law = 0.0;
  double decay_rate = 0.0;
  std::optional<Vec> f_inf;
  std::optional<Vec> f_inf_slope;
  double kramer_residual = 0.0;
};

/// |B f' + L f - S| (max over the x grid).
double equation_residual(const LinearizedOperator& op, const ModalProfile& f,
                         const SourceTerm& S, double sigma);

struct HalfspaceOptions {
  double accommodation = 0.0;
  PenaltyOptions penalty;
  SignatureOptions signature;
};

/// End-to-end solve of B f' + L f = S, R~ f(0) = f_b (corrected along
/// `directions`), f -> 0.
TransportSolution solve_halfspace(const LinearizedOperator& op, const HalfSpaceSplit& split,
                                  const Vec& f_b, const Mat& directions, const SourceTerm& S,
                                  const HalfspaceOptions& opt = {});
/// Same with a prebuilt context (e.g. the frozen-basis scheme).
TransportSolution solve_with_context(const PenalizedContext& ctx, const Vec& f_b,
                                     const Mat& directions, const SourceTerm& S,
                                     bool require_full_rank = true);

enum class AsymptoticMode { milne, kramer };

/// Milne: f -> f_inf in ker L with (f_inf | phi_i) prescribed on the negative
/// block (k- values). Kramer (S = 0): f -> f~ + x f' with the negative block of
/// f~ and c_r = (f' | psi_r) prescribed (k- + l values).
TransportSolution solve_asymptotic(const LinearizedOperator& op, const HalfSpaceSplit& split,
                                   const Vec& f_b, const Vec& prescribed, AsymptoticMode mode,
                                   const SourceTerm& S, const HalfspaceOptions& opt = {});

struct CauchySolution {
  Vec values;   ///< eigenvalues of L
  Mat vectors;
  Vec coeff0;   ///< f0 in the eigenbasis
  SourceTerm source;
  int kernel_dim = 0;
  double mu0 = 0.0;  ///< smallest nonzero eigenvalue
  bool decays = false;
  double conservation_residual = 0.0;  ///< max over t in [0, 10]

  Vec value(double t) const;
};

/// df/dt + L f = S with f(0) = f0.
CauchySolution solve_cauchy(const LinearizedOperator& op, const Vec& f0,
                            const SourceTerm& S = {});

}  // namespace halfspace

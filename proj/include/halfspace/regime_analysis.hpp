#pragma once

#include <vector>

#include "halfspace/halfspace_solver.hpp"
#include "halfspace/model_catalog.hpp"
#include "halfspace/parallel.hpp"

namespace halfspace {

struct SweepRow {
  double u = 0.0;
  Signature sig;
  bool degenerate = false;  ///< inserted degenerate value (l forced to its multiplicity)
};

/// Signature at `samples` uniform points of [a, b] plus every degenerate value
/// inside the range, sorted by u.
std::vector<SweepRow> sweep_signature(const LinearizedOperator& op0, const DiscreteSpace& space,
                                      double a, double b, int samples,
                                      Execution ex = Execution::parallel);

/// Maximal runs of equal signature; degenerate points form their own entries.
struct Regime {
  double u_lo = 0.0;
  double u_hi = 0.0;
  bool point = false;
  Signature sig;
};

std::vector<Regime> compress_regimes(const std::vector<SweepRow>& rows);

struct DecayEstimate {
  double modal = 0.0;  ///< smallest Re rate among excited terms
  double fit = 0.0;    ///< minus the log-slope of |f(x)| over [3/modal, 8/modal]
};

/// Throws when the profile is numerically zero or does not decay.
DecayEstimate measure_decay(const ModalProfile& f, double rel = 1e-8);
inline DecayEstimate measure_decay(const TransportSolution& sol) { return measure_decay(sol.f); }

/// Re lambda > 0 of L w = lambda B w, ascending.
std::vector<double> decaying_rates(const LinearizedOperator& op);

struct StudyOptions {
  double delta = 0.0;  ///< <= 0 picks the default half-width
  int samples_per_side = 9;
  bool extra_conditions = true;
  Execution ex = Execution::parallel;
};

struct DecaySample {
  double u = 0.0;
  Signature sig;
  int conditions_off = 0;  ///< k+ + l at u
  int conditions_on = 0;   ///< k0+ + l0 (frozen basis)
  int free_off = 0;
  int free_on = 0;
  int rank_off = 0;
  int rank_on = 0;
  double sigma_off = 0.0;
  double sigma_on = 0.0;  ///< NaN without extra conditions
  double fit_off = 0.0;
  double fit_on = 0.0;
  double removal_on = 0.0;
  double residual_on = 0.0;
  double slowest = 0.0;  ///< smallest decaying rate of (L, B)
  bool slow_mode = false;
};

struct DegenerateValue {
  double u = 0.0;
  int l = 0;
};

struct RegimeReport {
  double u0 = 0.0;
  Signature sig0;
  int k0_plus = 0;
  int l0 = 0;
  double delta = 0.0;
  double sigma_star = 0.0;
  bool extra_conditions = false;
  int slow_side = -1;  ///< -1: u < u0
  std::vector<DegenerateValue> degenerate;
  std::vector<DecaySample> samples;  ///< ascending u, u0 excluded

  double min_sigma_on = 0.0;
  double edge_sigma_on = 0.0;  ///< larger of the two edge values
  bool uniform = false;        ///< min_sigma_on >= sigma_star and >= edge / 2
  double slow_ratio = 0.0;     ///< flag off: sample next to u0 over the edge sample
  bool slow_decreasing = false;
  bool slow_verdict = false;   ///< strictly decreasing and ratio < 0.2
  double fast_side_ratio = 0.0;  ///< flag off: min over the edge value on the other side
  double empirical_exponent = 0.0;  ///< slope of log sigma_off against log |u - u0|
  int max_conditions_on = 0;
  int min_free_on = 0;
};

/// Decay rates on [u0 - delta, u0 + delta] \ {u0} with and without the frozen
/// extra conditions. Boundary data: a perturbed wall Maxwellian corrected along
/// the wall-parameter directions.
RegimeReport uniform_decay_study(const ModelSpec& model, const DiscreteSpace& space,
                                 const LinearizedOperator& op0, double u0,
                                 const StudyOptions& opt = {});

}  // namespace halfspace

#pragma once

#include <vector>

#include "halfspace/types.hpp"

namespace halfspace {

/// Vector-valued profile sum_j c_j exp(-r_j x) + constant + x * linear with
/// complex rates and coefficients; values are real parts.
struct ModalProfile {
  int n = 0;
  std::vector<cplx> rates;
  std::vector<CVec> coeffs;
  Vec constant;
  Vec linear;

  ModalProfile() = default;
  explicit ModalProfile(int size);

  void add(cplx rate, const CVec& c);
  void add(double rate, const Vec& c) { add(cplx(rate, 0.0), c.cast<cplx>()); }

  Vec value(double x) const;
  Vec derivative(double x) const;

  /// M applied to every coefficient (and to the constant / linear parts).
  ModalProfile transformed(const Mat& M) const;
  /// exp(-s x) times the exponential part; throws if constant or linear parts are set.
  ModalProfile damped(double s) const;
  ModalProfile scaled(double a) const;
  ModalProfile& operator+=(const ModalProfile& other);

  /// Merges terms whose rates agree to 1e-12 and drops zero coefficients.
  void compress();

  /// Exact L2 norm on (0, inf) of the exponential part; requires Re r_j > 0.
  double l2_norm() const;
  /// Smallest Re r_j among terms with |c_j| > rel * max |c_k|; +inf if none.
  double min_rate(double rel = 1e-8) const;
  double max_coeff() const;
};

}  // namespace halfspace

#pragma once

#include "halfspace/types.hpp"

namespace halfspace {

/// Execution policy for the data-parallel kernels. The serial path is the
/// reference implementation; both paths perform identical arithmetic per entry.
enum class Execution { serial, parallel };

/// Runs f(i) for i in [0, n).
template <class F>
void for_each_index(int n, Execution ex, F&& f) {
  if (ex == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) f(i);
  } else {
    for (int i = 0; i < n; ++i) f(i);
  }
}

/// BGK matrix D - (D Phi)(D Phi)^T with D = diag(nu), in weighted coordinates.
Mat assemble_bgk(const Vec& nu, const Mat& phi, Execution ex);

/// X^T diag(d) Y.
Mat weighted_gram(const Mat& X, const Vec& d, const Mat& Y, Execution ex);

}  // namespace halfspace

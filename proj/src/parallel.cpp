#include "halfspace/parallel.hpp"

namespace halfspace {

Mat assemble_bgk(const Vec& nu, const Mat& phi, Execution ex) {
  const int N = static_cast<int>(nu.size());
  const int n = static_cast<int>(phi.cols());
  Mat dphi = nu.asDiagonal() * phi;
  Mat L(N, N);
  for_each_index(N, ex, [&](int i) {
    for (int j = 0; j < N; ++j) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) acc += dphi(i, a) * dphi(j, a);
      L(i, j) = (i == j ? nu(i) : 0.0) - acc;
    }
  });
  return L;
}

Mat weighted_gram(const Mat& X, const Vec& d, const Mat& Y, Execution ex) {
  const int N = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  const int q = static_cast<int>(Y.cols());
  Mat G(p, q);
  for_each_index(p * q, ex, [&](int idx) {
    const int i = idx / q, j = idx % q;
    double acc = 0.0;
    for (int k = 0; k < N; ++k) acc += X(k, i) * d(k) * Y(k, j);
    G(i, j) = acc;
  });
  return G;
}

}  // namespace halfspace

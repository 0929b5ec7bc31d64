#include "halfspace/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace halfspace {

namespace {

Vec jacobi_nodes(const Vec& diag, const Vec& off) {
  const int n = static_cast<int>(diag.size());
  Mat J = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) J(i, i) = diag(i);
  for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = off(i);
  Eigen::SelfAdjointEigenSolver<Mat> es(J, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Orthonormal Hermite functions h_k(x) exp(-x^2/2) up to degree n, plus the
// derivative of the degree-n polynomial part (unscaled by the Gaussian).
void hermite_functions(int n, double x, Vec& q, double& pn, double& dpn) {
  q.resize(n + 1);
  q(0) = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (n >= 1) q(1) = std::sqrt(2.0) * x * q(0);
  for (int k = 1; k < n; ++k)
    q(k + 1) = std::sqrt(2.0 / (k + 1)) * x * q(k) - std::sqrt(double(k) / (k + 1)) * q(k - 1);
  pn = q(n);
  dpn = std::sqrt(2.0 * n) * q(n - 1);
}

}  // namespace

GaussRule gauss_hermite(int n) {
  if (n < 1) throw usage_error("gauss_hermite: need at least one node");
  Vec diag = Vec::Zero(n);
  Vec off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k / 2.0);
  Vec x = jacobi_nodes(diag, off);

  // Newton polish on the Gaussian-scaled orthonormal polynomial; the scale
  // factor cancels in the ratio.
  Vec q;
  for (int k = 0; k < n; ++k) {
    for (int it = 0; it < 3; ++it) {
      double pn, dpn;
      hermite_functions(n, x(k), q, pn, dpn);
      // d/dx [p_n e^{-x^2/2}] = (dpn - x pn); at a root of p_n the step is pn/dpn.
      if (dpn != 0.0) x(k) -= pn / dpn;
    }
  }
  for (int k = 0; k < n / 2; ++k) {
    const double a = 0.5 * (x(n - 1 - k) - x(k));
    x(k) = -a;
    x(n - 1 - k) = a;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;

  GaussRule r;
  r.x = x;
  r.folded.resize(n);
  r.weight.resize(n);
  for (int k = 0; k < n; ++k) {
    double pn, dpn;
    hermite_functions(n, x(k), q, pn, dpn);
    const double s = q.head(n).squaredNorm();
    r.folded(k) = 1.0 / s;
    r.weight(k) = std::exp(-x(k) * x(k)) / s;
  }
  for (int k = 0; k < n / 2; ++k) {
    const double f = 0.5 * (r.folded(k) + r.folded(n - 1 - k));
    const double w = 0.5 * (r.weight(k) + r.weight(n - 1 - k));
    r.folded(k) = r.folded(n - 1 - k) = f;
    r.weight(k) = r.weight(n - 1 - k) = w;
  }
  return r;
}

GaussRule gauss_laguerre(int n, double alpha) {
  if (n < 1) throw usage_error("gauss_laguerre: need at least one node");
  if (!(alpha > -1.0)) throw usage_error("gauss_laguerre: alpha must exceed -1");
  Vec diag(n), off(std::max(n - 1, 0));
  for (int k = 0; k < n; ++k) diag(k) = 2.0 * k + alpha + 1.0;
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(k * (k + alpha));
  Vec x = jacobi_nodes(diag, off);

  auto eval = [&](double t, Vec& p, Vec& dp) {
    p.resize(n + 1);
    dp.resize(n + 1);
    p(0) = 1.0 / std::sqrt(std::tgamma(alpha + 1.0));
    dp(0) = 0.0;
    double prev = 0.0, dprev = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a = 2.0 * k + alpha + 1.0;
      const double b = k > 0 ? std::sqrt(k * (k + alpha)) : 0.0;
      const double bn = std::sqrt((k + 1) * (k + 1 + alpha));
      p(k + 1) = ((t - a) * p(k) - b * prev) / bn;
      dp(k + 1) = ((t - a) * dp(k) + p(k) - b * dprev) / bn;
      prev = p(k);
      dprev = dp(k);
    }
  };

  Vec p, dp;
  for (int k = 0; k < n; ++k) {
    for (int it = 0; it < 3; ++it) {
      eval(x(k), p, dp);
      if (dp(n) != 0.0) x(k) -= p(n) / dp(n);
    }
  }
  GaussRule r;
  r.x = x;
  r.folded.resize(n);
  r.weight.resize(n);
  for (int k = 0; k < n; ++k) {
    eval(x(k), p, dp);
    const double s = p.head(n).squaredNorm();
    r.weight(k) = 1.0 / s;
    r.folded(k) = std::exp(x(k) - alpha * std::log(x(k)) - std::log(s));
  }
  return r;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw usage_error("gauss_legendre: need at least one node");
  Vec diag = Vec::Zero(n), off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  Vec x = jacobi_nodes(diag, off);
  GaussRule r;
  r.x = x;
  r.weight.resize(n);
  for (int k = 0; k < n; ++k) {
    // Newton on P_n, then w = 2 / ((1 - x^2) P_n'(x)^2).
    double t = x(k), pn = 0, dpn = 0;
    for (int it = 0; it < 3; ++it) {
      double p0 = 1.0, p1 = t;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pn = n == 1 ? t : p1;
      const double pm = n == 1 ? 1.0 : p0;
      dpn = n * (t * pn - pm) / (t * t - 1.0);
      t -= pn / dpn;
    }
    x(k) = t;
    r.weight(k) = 2.0 / ((1.0 - t * t) * dpn * dpn);
  }
  for (int k = 0; k < n / 2; ++k) {
    const double a = 0.5 * (x(n - 1 - k) - x(k));
    x(k) = -a;
    x(n - 1 - k) = a;
    const double w = 0.5 * (r.weight(k) + r.weight(n - 1 - k));
    r.weight(k) = r.weight(n - 1 - k) = w;
  }
  if (n % 2 == 1) x(n / 2) = 0.0;
  r.x = x;
  r.folded = r.weight;
  return r;
}

}  // namespace halfspace

#include "halfspace/special.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "halfspace/types.hpp"

namespace halfspace {

double dirichlet_eta(double s) {
  if (s < 0) throw usage_error("dirichlet_eta: s must be nonnegative");
  const int n = 40;
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0, c = -d, sum = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    sum += c * std::pow(k + 1.0, -s);
    b *= (k + n) * (k - n) / ((k + 0.5) * (k + 1.0));
  }
  return sum / d;
}

namespace {

double integrate(const auto& f, double a, double b, double tol) {
  using boost::math::quadrature::gauss_kronrod;
  double err = 0.0;
  return gauss_kronrod<double, 31>::integrate(f, a, b, 25, tol, &err);
}

}  // namespace

double quantum_J(double s, int sign, double lambda, double tol) {
  if (s < 0) throw usage_error("quantum_J: s must be nonnegative");
  const double pref = 2.0 / std::tgamma(0.5 * s + 1.0);
  const double inf = std::numeric_limits<double>::infinity();
  if (sign == -1) {
    auto f = [s](double r) {
      const double e = std::exp(-r * r);
      return std::pow(r, s + 1.0) * e / ((1.0 + e) * (1.0 + e));
    };
    const double v = pref * (integrate(f, 0.0, 1.0, tol) + integrate(f, 1.0, inf, tol));
    const double eta = dirichlet_eta(0.5 * s);
    if (std::abs(v - eta) > 1e-8 * std::max(1.0, std::abs(eta)))
      throw numeric_error("quantum_J: fermion quadrature disagrees with eta series");
    return v;
  }
  if (sign != 1) throw usage_error("quantum_J: sign must be +1 or -1");
  if (lambda < 0) throw usage_error("quantum_J: cutoff must be nonnegative");
  if (lambda == 0.0 && s <= 2.0)
    throw numeric_error("quantum_J: boson integral diverges for lambda = 0 and s <= 2");
  auto f = [s](double r) {
    const double e = std::exp(-r * r);
    const double den = -std::expm1(-r * r);
    return std::pow(r, s + 1.0) * e / (den * den);
  };
  double v = 0.0;
  if (lambda < 1.0) {
    // Geometric panels resolve the r^{s-3} behaviour near a small cutoff.
    double a = lambda;
    if (a == 0.0) {
      v += integrate(f, 0.0, 1e-3, tol);
      a = 1e-3;
    }
    while (a < 1.0) {
      const double b = std::min(1.0, 2.0 * a);
      v += integrate(f, a, b, tol);
      a = b;
    }
    v += integrate(f, 1.0, inf, tol);
  } else {
    v = integrate(f, lambda, inf, tol);
  }
  return pref * v;
}

}  // namespace halfspace

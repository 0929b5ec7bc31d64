#include "halfspace/modal.hpp"

#include <cmath>
#include <limits>

namespace halfspace {

ModalProfile::ModalProfile(int size)
    : n(size), constant(Vec::Zero(size)), linear(Vec::Zero(size)) {}

void ModalProfile::add(cplx rate, const CVec& c) {
  if (c.size() != n) throw usage_error("modal profile: coefficient size mismatch");
  rates.push_back(rate);
  coeffs.push_back(c);
}

Vec ModalProfile::value(double x) const {
  CVec acc = CVec::Zero(n);
  for (size_t j = 0; j < rates.size(); ++j) acc += std::exp(-rates[j] * x) * coeffs[j];
  return acc.real() + constant + x * linear;
}

Vec ModalProfile::derivative(double x) const {
  CVec acc = CVec::Zero(n);
  for (size_t j = 0; j < rates.size(); ++j)
    acc -= rates[j] * std::exp(-rates[j] * x) * coeffs[j];
  return acc.real() + linear;
}

ModalProfile ModalProfile::transformed(const Mat& M) const {
  ModalProfile r(static_cast<int>(M.rows()));
  const CMat Mc = M.cast<cplx>();
  for (size_t j = 0; j < rates.size(); ++j) r.add(rates[j], Mc * coeffs[j]);
  r.constant = M * constant;
  r.linear = M * linear;
  return r;
}

ModalProfile ModalProfile::damped(double s) const {
  if (constant.cwiseAbs().maxCoeff() > 0 || linear.cwiseAbs().maxCoeff() > 0)
    throw usage_error("modal profile: cannot damp a profile with constant or linear part");
  ModalProfile r = *this;
  for (auto& q : r.rates) q += s;
  return r;
}

ModalProfile ModalProfile::scaled(double a) const {
  ModalProfile r = *this;
  for (auto& c : r.coeffs) c *= a;
  r.constant *= a;
  r.linear *= a;
  return r;
}

ModalProfile& ModalProfile::operator+=(const ModalProfile& o) {
  if (n == 0 && rates.empty()) *this = ModalProfile(o.n);
  if (o.n != n) throw usage_error("modal profile: size mismatch");
  for (size_t j = 0; j < o.rates.size(); ++j) add(o.rates[j], o.coeffs[j]);
  constant += o.constant;
  linear += o.linear;
  return *this;
}

void ModalProfile::compress() {
  std::vector<cplx> r;
  std::vector<CVec> c;
  for (size_t j = 0; j < rates.size(); ++j) {
    bool merged = false;
    for (size_t k = 0; k < r.size(); ++k) {
      if (std::abs(r[k] - rates[j]) <= 1e-12 * (1.0 + std::abs(rates[j]))) {
        c[k] += coeffs[j];
        merged = true;
        break;
      }
    }
    if (!merged) {
      r.push_back(rates[j]);
      c.push_back(coeffs[j]);
    }
  }
  rates.clear();
  coeffs.clear();
  for (size_t k = 0; k < r.size(); ++k) {
    if (c[k].cwiseAbs().maxCoeff() == 0.0) continue;
    rates.push_back(r[k]);
    coeffs.push_back(c[k]);
  }
}

double ModalProfile::l2_norm() const {
  cplx acc = 0.0;
  for (size_t j = 0; j < rates.size(); ++j) {
    if (!(rates[j].real() > 0)) throw numeric_error("modal profile: non-decaying term in L2 norm");
    for (size_t k = 0; k < rates.size(); ++k)
      acc += coeffs[j].dot(coeffs[k]) / (std::conj(rates[j]) + rates[k]);
  }
  return std::sqrt(std::max(0.0, acc.real()));
}

double ModalProfile::max_coeff() const {
  double m = 0.0;
  for (const auto& c : coeffs) m = std::max(m, c.norm());
  return m;
}

double ModalProfile::min_rate(double rel) const {
  const double cmax = max_coeff();
  double best = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < rates.size(); ++j)
    if (coeffs[j].norm() > rel * cmax) best = std::min(best, rates[j].real());
  return best;
}

}  // namespace halfspace

#include "halfspace/velocity_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace halfspace {

Vec DiscreteSpace::to_weighted(const Vec& nodal) const {
  if (nodal.size() != weight.size()) throw usage_error("to_weighted: dimension mismatch");
  return nodal.cwiseProduct(sqrt_weight());
}

Vec DiscreteSpace::from_weighted(const Vec& hat) const {
  if (hat.size() != weight.size()) throw usage_error("from_weighted: dimension mismatch");
  return hat.cwiseQuotient(sqrt_weight());
}

Vec DiscreteSpace::speed() const { return velocity.rowwise().norm(); }

namespace {

void reserve_more(DiscreteSpace& s, int extra) {
  const int n0 = s.size();
  s.velocity.conservativeResize(n0 + extra, s.dim);
  s.energy.conservativeResize(n0 + extra);
  s.weight.conservativeResize(n0 + extra);
  s.component.resize(n0 + extra);
  s.mirror.resize(n0 + extra);
}

}  // namespace

void append_hermite_component(DiscreteSpace& space, const Component& comp, int nodes,
                              double scale, const GaussRule* energy_rule,
                              double energy_scale) {
  if (nodes < 2) throw usage_error("grid: nodes per axis must be >= 2");
  if (!(scale > 0)) throw usage_error("grid: velocity scale must be positive");
  const int d = space.dim;
  const GaussRule gh = gauss_hermite(nodes);
  const int ne = energy_rule ? static_cast<int>(energy_rule->x.size()) : 1;
  int nv = 1;
  for (int a = 0; a < d; ++a) nv *= nodes;
  const int n0 = space.size();
  const int cidx = static_cast<int>(space.components.size());
  space.components.push_back(comp);
  reserve_more(space, nv * ne);

  std::vector<int> idx(d, 0);
  for (int lin = 0; lin < nv; ++lin) {
    int rem = lin;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = rem % nodes;
      rem /= nodes;
    }
    double w = 1.0;
    for (int a = 0; a < d; ++a) w *= scale * gh.folded(idx[a]);
    // Mirror partner: flip the axis-1 index, keep the rest.
    const int stride = nv / nodes;
    const int mirror_lin = (nodes - 1 - idx[0]) * stride + (lin % stride);
    for (int e = 0; e < ne; ++e) {
      const int k = n0 + lin * ne + e;
      for (int a = 0; a < d; ++a) space.velocity(k, a) = scale * gh.x(idx[a]);
      space.velocity(k, 0) -= space.center;
      space.energy(k) = energy_rule ? energy_scale * energy_rule->x(e) : 0.0;
      space.weight(k) = energy_rule ? w * energy_scale * energy_rule->folded(e) : w;
      space.component[k] = cidx;
      space.mirror[k] = n0 + mirror_lin * ne + e;
    }
  }
}

void append_spherical_component(DiscreteSpace& space, const Component& comp,
                                const Vec& r, const Vec& rw, int angular) {
  if (space.center != 0.0) throw usage_error("spherical grid requires center 0");
  const int d = space.dim;
  const int nr = static_cast<int>(r.size());
  const int cidx = static_cast<int>(space.components.size());
  space.components.push_back(comp);
  const int n0 = space.size();

  if (d == 1) {
    reserve_more(space, 2 * nr);
    for (int i = 0; i < nr; ++i) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        const int k = n0 + 2 * i + sgn;
        space.velocity(k, 0) = sgn == 0 ? -r(i) : r(i);
        space.energy(k) = 0.0;
        space.weight(k) = rw(i);
        space.component[k] = cidx;
        space.mirror[k] = n0 + 2 * i + (1 - sgn);
      }
    }
    return;
  }
  if (d == 2) {
    // Multiple of 4 keeps nodes off both coordinate axes.
    const int nphi = 4 * ((angular + 1) / 2);
    reserve_more(space, nr * nphi);
    for (int i = 0; i < nr; ++i) {
      for (int j = 0; j < nphi; ++j) {
        const double th = 2.0 * M_PI * (j + 0.5) / nphi;
        const int k = n0 + i * nphi + j;
        space.velocity(k, 0) = r(i) * std::cos(th);
        space.velocity(k, 1) = r(i) * std::sin(th);
        space.energy(k) = 0.0;
        space.weight(k) = rw(i) * r(i) * 2.0 * M_PI / nphi;
        space.component[k] = cidx;
        const int jm = ((nphi / 2 - 1 - j) % nphi + nphi) % nphi;
        space.mirror[k] = n0 + i * nphi + jm;
      }
    }
    return;
  }
  if (d != 3) throw usage_error("spherical grid supports d <= 3");
  const int nth = angular % 2 == 0 ? angular : angular + 1;
  const int nphi = 2 * nth;
  const GaussRule gl = gauss_legendre(nth);
  reserve_more(space, nr * nth * nphi);
  for (int i = 0; i < nr; ++i) {
    for (int t = 0; t < nth; ++t) {
      const double c = gl.x(t), s = std::sqrt(1.0 - c * c);
      for (int j = 0; j < nphi; ++j) {
        const double ph = 2.0 * M_PI * j / nphi;
        const int k = n0 + (i * nth + t) * nphi + j;
        space.velocity(k, 0) = r(i) * c;
        space.velocity(k, 1) = r(i) * s * std::cos(ph);
        space.velocity(k, 2) = r(i) * s * std::sin(ph);
        space.energy(k) = 0.0;
        space.weight(k) = rw(i) * r(i) * r(i) * gl.weight(t) * 2.0 * M_PI / nphi;
        space.component[k] = cidx;
        space.mirror[k] = n0 + (i * nth + (nth - 1 - t)) * nphi + j;
      }
    }
  }
}

void finalize_space(DiscreteSpace& space) {
  const int n = space.size();
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    worst = std::min(worst, std::abs(space.velocity(k, 0) + space.center));
  if (worst >= 1e-10) return;

  // Shift by half the smallest gap between distinct axis-1 values.
  std::vector<double> xs(n);
  for (int k = 0; k < n; ++k) xs[k] = space.velocity(k, 0);
  std::sort(xs.begin(), xs.end());
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 1; k < n; ++k)
    if (xs[k] - xs[k - 1] > 1e-12) gap = std::min(gap, xs[k] - xs[k - 1]);
  if (!std::isfinite(gap)) throw validation_error("grid: cannot shift off the sonic plane");
  space.velocity.col(0).array() += 0.5 * gap;
  space.symmetric = false;
  space.mirror.clear();
  for (int k = 0; k < n; ++k)
    if (std::abs(space.velocity(k, 0) + space.center) < 1e-10)
      throw validation_error("grid: node on the sonic plane v + u = 0 after shift");
}

DiscreteSpace build_grid(const GridSpec& spec) {
  if (spec.dimension < 1) throw usage_error("grid: dimension must be positive");
  if (spec.nodes < 2) throw usage_error("grid: nodes per axis must be >= 2");
  if (spec.extent < 0) throw usage_error("grid: extent must be positive");
  DiscreteSpace s;
  s.dim = spec.dimension;
  s.center = spec.center;
  s.velocity.resize(0, s.dim);
  const GaussRule gh = gauss_hermite(spec.nodes);
  const double scale = spec.extent > 0 ? spec.extent / gh.x(spec.nodes - 1) : 1.0;
  if (spec.energy_nodes > 0) {
    const GaussRule gl = gauss_laguerre(spec.energy_nodes, 0.0);
    append_hermite_component(s, Component{}, spec.nodes, scale, &gl, 1.0);
  } else {
    append_hermite_component(s, Component{}, spec.nodes, scale);
  }
  finalize_space(s);
  return s;
}

double inner_product(const Vec& f, const Vec& g, const DiscreteSpace& space) {
  if (f.size() != space.size() || g.size() != space.size())
    throw usage_error("inner_product: dimension mismatch");
  return (space.weight.array() * f.array() * g.array()).sum();
}

HalfSpaceSplit split_half_spaces(const Vec& b) {
  HalfSpaceSplit sp;
  sp.b = b;
  const int n = static_cast<int>(b.size());
  sp.p_plus = Vec::Zero(n);
  sp.p_minus = Vec::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (b(k) > 0) {
      sp.plus.push_back(k);
      sp.p_plus(k) = 1.0;
    } else if (b(k) < 0) {
      sp.minus.push_back(k);
      sp.p_minus(k) = 1.0;
    } else {
      throw validation_error("split: node " + std::to_string(k) +
                             " lies on the sonic plane (ker B != {0})");
    }
  }
  return sp;
}

HalfSpaceSplit split_half_spaces(const DiscreteSpace& space, double u) {
  Vec b = space.velocity.col(0).array() + u;
  HalfSpaceSplit sp = split_half_spaces(b);
  if (space.symmetric && std::abs(space.center - u) <= 1e-14 * (1.0 + std::abs(u)))
    sp.mirror = space.mirror;
  return sp;
}

Mat reflection_operator(const HalfSpaceSplit& split) {
  if (split.mirror.empty())
    throw validation_error("reflection: grid is not symmetric about -u");
  const int n = static_cast<int>(split.b.size());
  Mat P = Mat::Zero(n, n);
  for (int k : split.plus) {
    const int m = split.mirror[k];
    if (split.b(m) >= 0 || std::abs(split.b(m) + split.b(k)) > 1e-12 * (1 + std::abs(split.b(k))))
      throw validation_error("reflection: mirror pairing broken");
    P(k, m) = 1.0;
  }
  return P;
}

}  // namespace halfspace

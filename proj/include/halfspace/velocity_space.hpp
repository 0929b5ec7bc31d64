#pragma once

#include <vector>

#include "halfspace/quadrature.hpp"
#include "halfspace/types.hpp"

namespace halfspace {

/// Grid request. With extent == 0 the Hermite nodes keep their natural
/// scale (matched to exp(-|v|^2)); a positive extent stretches axis nodes so the
/// outermost one sits at +-extent.
struct GridSpec {
  int dimension = 1;
  int nodes = 8;
  double extent = 0.0;
  int energy_nodes = 0;
  double cutoff_lambda = 0.0;
  double center = 0.0;  ///< grid is symmetric about v1 = -center
};

struct Component {
  int species = 0;
  double mass = 1.0;
  double level_energy = 0.0;
  double level_weight = 1.0;
  bool continuous_energy = false;
};

/// Finite velocity(-energy) space. Node k carries velocity row k, an internal
/// energy (0 when unused), a component index and a positive weight w_k.
///
/// Most of the library works in weighted coordinates f_hat = sqrt(w) * f, where
/// the weighted inner product becomes the Euclidean dot product and
/// weight-symmetric operators become symmetric matrices.
struct DiscreteSpace {
  int dim = 1;
  Mat velocity;
  Vec energy;
  std::vector<int> component;
  Vec weight;
  std::vector<Component> components;
  int species_count = 1;
  double center = 0.0;
  bool symmetric = true;
  std::vector<int> mirror;

  int size() const { return static_cast<int>(weight.size()); }
  Vec sqrt_weight() const { return weight.array().sqrt(); }
  Vec to_weighted(const Vec& nodal) const;
  Vec from_weighted(const Vec& hat) const;
  Vec speed() const;
  int species_of(int k) const { return components[component[k]].species; }
};

/// Nodal sets h+ and h- of B = diag(b) and the matching 0/1 projections.
struct HalfSpaceSplit {
  Vec b;
  std::vector<int> plus;
  std::vector<int> minus;
  Vec p_plus;
  Vec p_minus;
  std::vector<int> mirror;  ///< empty when no exact reflection exists
};

DiscreteSpace build_grid(const GridSpec& spec);

/// Appends a tensor Hermite component. Axis nodes are scale * x_i, shifted by
/// -center on axis 1. An optional Laguerre rule adds continuous internal
/// energy nodes I = energy_scale * t_j.
void append_hermite_component(DiscreteSpace& space, const Component& comp, int nodes,
                              double scale, const GaussRule* energy_rule = nullptr,
                              double energy_scale = 1.0);

/// Appends a polar/spherical component with radial nodes r (weights include no
/// Jacobian) and `angular` nodes per angle. Requires center == 0.
void append_spherical_component(DiscreteSpace& space, const Component& comp,
                                const Vec& r, const Vec& rw, int angular);

/// Re-checks the sonic plane v1 = -center after all components are in place,
/// shifting axis 1 by half the minimal node gap if a node sits on it.
void finalize_space(DiscreteSpace& space);

double inner_product(const Vec& f, const Vec& g, const DiscreteSpace& space);

HalfSpaceSplit split_half_spaces(const DiscreteSpace& space, double u);
/// General diagonal B (e.g. identity for the Cauchy problem); no reflection.
HalfSpaceSplit split_half_spaces(const Vec& b);

/// Permutation P with (Pg)_k = g_mirror(k) for k in h+ and 0 elsewhere; it maps
/// h- onto h+ and satisfies (|B|g|h)_- = (BPg|Ph)_+ exactly.
Mat reflection_operator(const HalfSpaceSplit& split);

}  // namespace halfspace

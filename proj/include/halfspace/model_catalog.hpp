#pragma once

#include <string>
#include <vector>

#include "halfspace/velocity_space.hpp"

namespace halfspace {

enum class Family {
  monatomic,
  monatomic_mixture,
  quantum,
  polyatomic_discrete,
  polyatomic_continuous,
  polyatomic_mixture,
};

std::string family_name(Family f);
Family parse_family(const std::string& name);

/// One gas species. Discrete polyatomic species carry `levels` (and optional
/// `level_weights`, default 1); continuous ones carry `delta` > 0.
struct Species {
  double mass = 1.0;
  double density = 1.0;
  std::vector<double> levels;
  std::vector<double> level_weights;
  double delta = 0.0;

  bool discrete_levels() const { return !levels.empty(); }
};

struct ModelSpec {
  Family family = Family::monatomic;
  int dimension = 3;
  double temperature = 1.0;
  std::vector<Species> species{Species{}};
  int quantum_sign = -1;  ///< +1 bosons, -1 fermions
  double cutoff_lambda = 0.0;

  void validate() const;
  int species_count() const { return static_cast<int>(species.size()); }
  bool mixture() const {
    return family == Family::monatomic_mixture || family == Family::polyatomic_mixture;
  }
  double number_density() const;
  double mass_density() const;
};

/// dim ker L for the family: d+2, or d+s+1 for mixtures.
int kernel_dimension(const ModelSpec& model);

/// Velocity grid matched to the model: one component per species (and per
/// internal level), Hermite axes scaled by sqrt(2T/m), Laguerre energy nodes for
/// continuous internal energy. Quantum models get a spherical grid: `nodes`
/// angular points, `energy_nodes` Gauss-Legendre points per radial panel, panels
/// starting at the cutoff for bosons and at 0 for fermions.
DiscreteSpace build_space(const ModelSpec& model, const GridSpec& grid);

struct EquilibriumState {
  Vec value;     ///< M, or the Planckian P for quantum models
  Vec variance;  ///< linearization weight: M, or R = P(1 +- P)
  Vec root;      ///< sqrt(variance)
  double rho = 0.0;
  double n = 0.0;
  std::vector<double> Q0, Q1, Q2;  ///< per species partition sums (polyatomic)
};

EquilibriumState equilibrium(const ModelSpec& model, const DiscreteSpace& space);

/// Kernel spanning vectors as columns (nodal values), ordered: mass (per species
/// for mixtures), momentum, energy.
Mat collision_invariants(const ModelSpec& model, const DiscreteSpace& space,
                         const EquilibriumState& eq);

enum class MomentKind { mass, second, fourth };

/// Gaussian moments of exp(-a|v|^2) in d dimensions: integral of 1, |v|^2, |v|^4.
double moment_closed_form(double a, int d, MomentKind kind);

enum class PolyMoment { mass, momentum, mass_energy, v1sq_energy, energy_energy };

/// Moments of sqrt(M) and the energy invariant sqrt(M)(|v|^2 + 2E/m) for a single
/// polyatomic species with partition sums Q0..Q2. `momentum` is per component.
double polyatomic_moment_closed_form(PolyMoment kind, int d, double rho, double m,
                                     double T, double Q0, double Q1, double Q2);

/// Effective internal-degrees statistic: kappa (discrete levels), delta
/// (continuous), or the density-weighted mixture value.
double internal_energy_stats(const ModelSpec& model);

struct ClosedFormSpeeds {
  double u0 = 0.0;
  double u_plus = 0.0;
  double u_minus = 0.0;
};

ClosedFormSpeeds closed_form_speeds(const ModelSpec& model);

/// Wall state: per-species density, velocity vector and temperature.
struct WallState {
  std::vector<double> density;
  Vec velocity;
  double temperature = 1.0;
};

/// Far-field state expressed as a wall state moving with the flow (u, 0, ...).
WallState far_field_wall(const ModelSpec& model, double u);

/// f_b = variance^{-1/2} (F_wall(v + u e1) - F(v)) on h+, zero on h- (nodal).
Vec boundary_maxwellian_data(const ModelSpec& model, const DiscreteSpace& space,
                             const EquilibriumState& eq, const WallState& wall, double u);

/// Derivatives of boundary_maxwellian_data in the d+s+1 wall parameters at the
/// far-field state, restricted to h+ (nodal columns: densities, velocity, T).
Mat wall_parameter_directions(const ModelSpec& model, const DiscreteSpace& space,
                              const EquilibriumState& eq, double u);

}  // namespace halfspace

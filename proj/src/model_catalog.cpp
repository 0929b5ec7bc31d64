#include "halfspace/model_catalog.hpp"

#include <cmath>

#include "halfspace/special.hpp"

namespace halfspace {

std::string family_name(Family f) {
  switch (f) {
    case Family::monatomic: return "monatomic";
    case Family::monatomic_mixture: return "monatomic-mixture";
    case Family::quantum: return "quantum";
    case Family::polyatomic_discrete: return "polyatomic-discrete";
    case Family::polyatomic_continuous: return "polyatomic-continuous";
    case Family::polyatomic_mixture: return "polyatomic-mixture";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::monatomic, Family::monatomic_mixture, Family::quantum,
                   Family::polyatomic_discrete, Family::polyatomic_continuous,
                   Family::polyatomic_mixture})
    if (family_name(f) == name) return f;
  throw usage_error("unknown model family '" + name + "'");
}

void ModelSpec::validate() const {
  if (dimension < 1 || dimension > 3) throw usage_error("model: dimension must be 1, 2 or 3");
  if (!(temperature > 0)) throw usage_error("model: temperature must be positive");
  if (species.empty()) throw usage_error("model: at least one species required");
  for (const auto& sp : species) {
    if (!(sp.mass > 0) || !(sp.density > 0))
      throw usage_error("model: masses and densities must be positive");
    if (!sp.level_weights.empty() && sp.level_weights.size() != sp.levels.size())
      throw usage_error("model: level_weights must match levels");
    for (double w : sp.level_weights)
      if (!(w > 0)) throw usage_error("model: level weights must be positive");
  }
  const bool single = family == Family::monatomic || family == Family::quantum ||
                      family == Family::polyatomic_discrete ||
                      family == Family::polyatomic_continuous;
  if (single && species.size() != 1)
    throw usage_error("model: family " + family_name(family) + " has one species");
  if (family == Family::quantum) {
    if (quantum_sign != 1 && quantum_sign != -1)
      throw usage_error("model: quantum sign must be +1 (boson) or -1 (fermion)");
    if (quantum_sign == 1 && !(cutoff_lambda > 0))
      throw usage_error("model: bosons require a positive cutoff lambda");
  }
  if (family == Family::polyatomic_discrete && !species[0].discrete_levels())
    throw usage_error("model: polyatomic-discrete needs energy levels");
  if (family == Family::polyatomic_continuous && !(species[0].delta > 0))
    throw usage_error("model: polyatomic-continuous needs delta > 0");
  if (family == Family::polyatomic_mixture) {
    const bool disc = species[0].discrete_levels();
    for (const auto& sp : species) {
      if (sp.discrete_levels() != disc)
        throw usage_error("model: polyatomic mixture species must all be discrete or continuous");
      if (!disc && !(sp.delta > 0))
        throw usage_error("model: continuous species need delta > 0");
    }
  }
}

double ModelSpec::number_density() const {
  double n = 0;
  for (const auto& sp : species) n += sp.density;
  return n;
}

double ModelSpec::mass_density() const {
  double r = 0;
  for (const auto& sp : species) r += sp.mass * sp.density;
  return r;
}

int kernel_dimension(const ModelSpec& model) {
  return model.mixture() ? model.dimension + model.species_count() + 1 : model.dimension + 2;
}

namespace {

double level_weight(const Species& sp, int i) {
  return sp.level_weights.empty() ? 1.0 : sp.level_weights[i];
}

struct Partition {
  double Q0 = 1, Q1 = 0, Q2 = 0;
};

// Internal-energy partition sums Q_j = sum phi_i E_i^j e^{-E_i/T}, or the
// continuous analogue with phi(I) = I^{delta/2-1}, evaluated exactly by a
// generalized Laguerre rule.
Partition partition(const Species& sp, double T) {
  Partition p;
  if (sp.discrete_levels()) {
    p.Q0 = p.Q1 = p.Q2 = 0;
    for (size_t i = 0; i < sp.levels.size(); ++i) {
      const double E = sp.levels[i];
      const double w = level_weight(sp, static_cast<int>(i)) * std::exp(-E / T);
      p.Q0 += w;
      p.Q1 += w * E;
      p.Q2 += w * E * E;
    }
  } else if (sp.delta > 0) {
    const double alpha = 0.5 * sp.delta - 1.0;
    const GaussRule gl = gauss_laguerre(8, alpha);
    p.Q0 = p.Q1 = p.Q2 = 0;
    for (int j = 0; j < gl.x.size(); ++j) {
      const double t = gl.x(j);
      p.Q0 += gl.weight(j);
      p.Q1 += gl.weight(j) * t;
      p.Q2 += gl.weight(j) * t * t;
    }
    const double s = std::pow(T, alpha + 1.0);
    p.Q0 *= s;
    p.Q1 *= s * T;
    p.Q2 *= s * T * T;
  }
  return p;
}

bool polyatomic(Family f) {
  return f == Family::polyatomic_discrete || f == Family::polyatomic_continuous ||
         f == Family::polyatomic_mixture;
}

// Equilibrium value of one component at drift-relative velocity w and
// internal energy I, for species number density nd and temperature T.
// Single-species classical families are normalized to mass density m*nd.
double classical_density(const ModelSpec& model, const Component& comp, const Species& sp,
                         const Eigen::Ref<const Eigen::RowVectorXd>& w, double I,
                         double nd, double T) {
  const int d = model.dimension;
  const double m = sp.mass;
  double amp = model.mixture() ? nd : m * nd;
  amp *= std::pow(m / (2.0 * M_PI * T), 0.5 * d);
  double e = m * w.squaredNorm() / (2.0 * T);
  if (polyatomic(model.family)) {
    const Partition p = partition(sp, T);
    if (sp.discrete_levels()) {
      amp *= comp.level_weight / p.Q0;
      e += comp.level_energy / T;
    } else {
      amp *= std::pow(I, 0.5 * sp.delta - 1.0) / p.Q0;
      e += I / T;
    }
  }
  return amp * std::exp(-e);
}

// Planckian 1/(e^x / z -+ 1) with x = |w|^2/(2T).
double planck(int sign, const Eigen::Ref<const Eigen::RowVectorXd>& w, double z, double T) {
  const double x = w.squaredNorm() / (2.0 * T);
  return sign == 1 ? 1.0 / (std::expm1(x - std::log(z)))
                   : 1.0 / (std::exp(x - std::log(z)) + 1.0);
}

}  // namespace

DiscreteSpace build_space(const ModelSpec& model, const GridSpec& grid) {
  model.validate();
  if (grid.dimension != model.dimension)
    throw usage_error("grid dimension differs from model dimension");
  if (grid.cutoff_lambda > 0 && grid.cutoff_lambda != model.cutoff_lambda)
    throw usage_error("grid cutoff_lambda differs from the model cutoff");
  DiscreteSpace s;
  s.dim = model.dimension;
  s.center = grid.center;
  s.velocity.resize(0, s.dim);
  s.species_count = model.species_count();
  const double T = model.temperature;
  const GaussRule gh = gauss_hermite(grid.nodes);
  auto scale_for = [&](double m) {
    return grid.extent > 0 ? grid.extent / gh.x(grid.nodes - 1) : std::sqrt(2.0 * T / m);
  };

  if (model.family == Family::quantum) {
    // Radial variable rho = r / sqrt(2T) on [lambda, rho_max]: geometric panels
    // below 1, unit panels above, each with a Gauss-Legendre rule. Fermions
    // start at 0 with a single panel up to 1.
    const double lam = model.quantum_sign == 1 ? model.cutoff_lambda : 0.0;
    const double rt = std::sqrt(2.0 * T);
    const double rho_max = grid.extent > 0 ? grid.extent / rt : 7.0;
    const int q = grid.energy_nodes > 0 ? grid.energy_nodes : 8;
    const GaussRule gl = gauss_legendre(q);
    std::vector<double> r, rw;
    double a = lam;
    while (a < rho_max - 1e-12) {
      const double b = a < 1.0 ? std::min({a > 0.0 ? 2.0 * a : 1.0, 1.0, rho_max})
                               : std::min(a + 1.0, rho_max);
      for (int j = 0; j < q; ++j) {
        r.push_back(rt * (0.5 * (a + b) + 0.5 * (b - a) * gl.x(j)));
        rw.push_back(rt * 0.5 * (b - a) * gl.weight(j));
      }
      a = b;
    }
    Component c;
    append_spherical_component(s, c, Eigen::Map<Vec>(r.data(), r.size()),
                               Eigen::Map<Vec>(rw.data(), rw.size()), grid.nodes);
    finalize_space(s);
    return s;
  }

  for (int a = 0; a < model.species_count(); ++a) {
    const Species& sp = model.species[a];
    Component c;
    c.species = a;
    c.mass = sp.mass;
    const double scale = scale_for(model.family == Family::quantum ? 1.0 : sp.mass);
    if (polyatomic(model.family) && sp.discrete_levels()) {
      for (size_t i = 0; i < sp.levels.size(); ++i) {
        c.level_energy = sp.levels[i];
        c.level_weight = level_weight(sp, static_cast<int>(i));
        append_hermite_component(s, c, grid.nodes, scale);
      }
    } else if (polyatomic(model.family)) {
      c.continuous_energy = true;
      const int ne = grid.energy_nodes > 0 ? grid.energy_nodes : 4;
      const GaussRule gl = gauss_laguerre(ne, 0.5 * sp.delta - 1.0);
      append_hermite_component(s, c, grid.nodes, scale, &gl, T);
    } else {
      append_hermite_component(s, c, grid.nodes, scale);
    }
  }
  finalize_space(s);
  return s;
}

EquilibriumState equilibrium(const ModelSpec& model, const DiscreteSpace& space) {
  model.validate();
  EquilibriumState eq;
  const int N = space.size();
  eq.value.resize(N);
  eq.variance.resize(N);
  eq.n = model.number_density();
  eq.rho = model.mass_density();
  const double T = model.temperature;
  for (const auto& sp : model.species) {
    const Partition p = partition(sp, T);
    eq.Q0.push_back(p.Q0);
    eq.Q1.push_back(p.Q1);
    eq.Q2.push_back(p.Q2);
  }
  for (int k = 0; k < N; ++k) {
    const Component& c = space.components[space.component[k]];
    const auto v = space.velocity.row(k);
    if (model.family == Family::quantum) {
      if (model.quantum_sign == 1 &&
          v.norm() < model.cutoff_lambda * std::sqrt(2.0 * T) * (1.0 - 1e-12))
        throw validation_error("equilibrium: boson node inside the cutoff sphere");
      const double P = planck(model.quantum_sign, v, 1.0, T);
      eq.value(k) = P;
      eq.variance(k) = P * (1.0 + model.quantum_sign * P);
    } else {
      const Species& sp = model.species[c.species];
      eq.value(k) = classical_density(model, c, sp, v, space.energy(k), sp.density, T);
      eq.variance(k) = eq.value(k);
    }
  }
  eq.root = eq.variance.array().sqrt();
  return eq;
}

Mat collision_invariants(const ModelSpec& model, const DiscreteSpace& space,
                         const EquilibriumState& eq) {
  const int N = space.size();
  const int d = model.dimension;
  const int s = model.species_count();
  const bool mix = model.mixture();
  const int n = kernel_dimension(model);
  Mat X = Mat::Zero(N, n);
  const int off = mix ? s : 1;
  for (int k = 0; k < N; ++k) {
    const Component& c = space.components[space.component[k]];
    const double r = eq.root(k);
    const double m = model.family == Family::quantum ? 1.0 : c.mass;
    const auto v = space.velocity.row(k);
    X(k, mix ? c.species : 0) = r;
    for (int j = 0; j < d; ++j) X(k, off + j) = (mix ? m : 1.0) * r * v(j);
    double e = (model.family == Family::quantum ? 1.0 : m) * v.squaredNorm();
    if (polyatomic(model.family)) e += 2.0 * (c.continuous_energy ? space.energy(k) : c.level_energy);
    X(k, off + d) = r * e;
  }
  return X;
}

double moment_closed_form(double a, int d, MomentKind kind) {
  if (!(a > 0)) throw usage_error("moment_closed_form: a must be positive");
  const double base = std::pow(M_PI / a, 0.5 * d);
  switch (kind) {
    case MomentKind::mass: return base;
    case MomentKind::second: return d / (2.0 * a) * base;
    case MomentKind::fourth: return d * (d + 2.0) / (4.0 * a * a) * base;
  }
  throw usage_error("moment_closed_form: unsupported kind");
}

double polyatomic_moment_closed_form(PolyMoment kind, int d, double rho, double m, double T,
                                     double Q0, double Q1, double Q2) {
  switch (kind) {
    case PolyMoment::mass: return rho;
    case PolyMoment::momentum: return rho * T / m;
    case PolyMoment::mass_energy: return rho / m * (d * T + 2.0 * Q1 / Q0);
    case PolyMoment::v1sq_energy: return rho / (m * m) * ((d + 2.0) * T * T + 2.0 * T * Q1 / Q0);
    case PolyMoment::energy_energy:
      return rho / (m * m) * (d * (d + 2.0) * T * T + 4.0 * d * T * Q1 / Q0 + 4.0 * Q2 / Q0);
  }
  throw usage_error("polyatomic_moment_closed_form: unsupported kind");
}

double internal_energy_stats(const ModelSpec& model) {
  model.validate();
  if (!polyatomic(model.family))
    throw usage_error("internal_energy_stats: family " + family_name(model.family) +
                      " has no internal energy");
  const double T = model.temperature;
  double acc = 0.0;
  for (const auto& sp : model.species) {
    const Partition p = partition(sp, T);
    acc += sp.density * (p.Q0 * p.Q2 - p.Q1 * p.Q1) / (p.Q0 * p.Q0);
  }
  return 2.0 / (model.number_density() * T * T) * acc;
}

ClosedFormSpeeds closed_form_speeds(const ModelSpec& model) {
  model.validate();
  const int d = model.dimension;
  const double T = model.temperature;
  double c = 0.0;
  switch (model.family) {
    case Family::monatomic:
      c = std::sqrt(T / model.species[0].mass) * std::sqrt((d + 2.0) / d);
      break;
    case Family::monatomic_mixture:
      c = std::sqrt(model.number_density() * T / model.mass_density()) * std::sqrt((d + 2.0) / d);
      break;
    case Family::quantum: {
      double ratio;
      if (model.quantum_sign == -1) {
        ratio = dirichlet_eta(0.5 * d + 1.0) / dirichlet_eta(0.5 * d);
      } else {
        ratio = quantum_J(d + 2.0, 1, model.cutoff_lambda) / quantum_J(d, 1, model.cutoff_lambda);
      }
      c = std::sqrt(ratio) * std::sqrt(T) * std::sqrt((d + 2.0) / d);
      break;
    }
    case Family::polyatomic_discrete:
    case Family::polyatomic_continuous: {
      const double k = internal_energy_stats(model);
      c = std::sqrt(T / model.species[0].mass) * std::sqrt((d + 2.0 + k) / (d + k));
      break;
    }
    case Family::polyatomic_mixture: {
      const double k = internal_energy_stats(model);
      c = std::sqrt(model.number_density() * T / model.mass_density()) *
          std::sqrt((d + 2.0 + k) / (d + k));
      break;
    }
  }
  return {0.0, c, -c};
}

WallState far_field_wall(const ModelSpec& model, double u) {
  WallState w;
  for (const auto& sp : model.species) w.density.push_back(sp.density);
  w.velocity = Vec::Zero(model.dimension);
  w.velocity(0) = u;
  w.temperature = model.temperature;
  return w;
}

Vec boundary_maxwellian_data(const ModelSpec& model, const DiscreteSpace& space,
                             const EquilibriumState& eq, const WallState& wall, double u) {
  if (!(wall.temperature > 0)) throw usage_error("wall temperature must be positive");
  if (static_cast<int>(wall.density.size()) != model.species_count())
    throw usage_error("wall densities must match species count");
  for (double n0 : wall.density)
    if (!(n0 > 0)) throw usage_error("wall densities must be positive");
  if (wall.velocity.size() != model.dimension) throw usage_error("wall velocity dimension");
  const int N = space.size();
  Vec fb = Vec::Zero(N);
  Eigen::RowVectorXd w(model.dimension);
  for (int k = 0; k < N; ++k) {
    if (space.velocity(k, 0) + u <= 0) continue;
    const Component& c = space.components[space.component[k]];
    w = space.velocity.row(k);
    w(0) += u;
    w -= wall.velocity.transpose();
    double FB;
    if (model.family == Family::quantum) {
      const double z = wall.density[0] / model.species[0].density;
      FB = planck(model.quantum_sign, w, z, wall.temperature);
    } else {
      FB = classical_density(model, c, model.species[c.species], w, space.energy(k),
                             wall.density[c.species], wall.temperature);
    }
    fb(k) = (FB - eq.value(k)) / eq.root(k);
  }
  return fb;
}

Mat wall_parameter_directions(const ModelSpec& model, const DiscreteSpace& space,
                              const EquilibriumState& eq, double u) {
  const int N = space.size();
  const int d = model.dimension;
  const int s = model.species_count();
  const double T = model.temperature;
  Mat D = Mat::Zero(N, d + s + 1);
  for (int k = 0; k < N; ++k) {
    if (space.velocity(k, 0) + u <= 0) continue;
    const Component& c = space.components[space.component[k]];
    const Species& sp = model.species[c.species];
    const auto v = space.velocity.row(k);
    const double r = eq.root(k);
    if (model.family == Family::quantum) {
      D(k, 0) = r / sp.density;
      for (int j = 0; j < d; ++j) D(k, 1 + j) = r * v(j) / T;
      D(k, 1 + d) = r * v.squaredNorm() / (2.0 * T * T);
      continue;
    }
    const double m = sp.mass;
    D(k, c.species) = r / sp.density;
    for (int j = 0; j < d; ++j) D(k, s + j) = r * m * v(j) / T;
    double dT = -0.5 * d / T + m * v.squaredNorm() / (2.0 * T * T);
    if (polyatomic(model.family)) {
      const Partition p = partition(sp, T);
      const double E = c.continuous_energy ? space.energy(k) : c.level_energy;
      dT += (E - p.Q1 / p.Q0) / (T * T);
    }
    D(k, s + d) = r * dT;
  }
  return D;
}

}  // namespace halfspace

#include "halfspace/regime_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace halfspace {

namespace {

// Runs f(i) for every index and rethrows the first failure on the caller.
template <class F>
void guarded_for_each(int n, Execution ex, F&& f) {
  std::vector<std::exception_ptr> err(n);
  for_each_index(n, ex, [&](int i) {
    try {
      f(i);
    } catch (...) {
      err[i] = std::current_exception();
    }
  });
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

std::vector<SweepRow> sweep_signature(const LinearizedOperator& op0, const DiscreteSpace& space,
                                      double a, double b, int samples, Execution ex) {
  if (!std::isfinite(a) || !std::isfinite(b) || b < a)
    throw usage_error("sweep: range must be finite with a <= b");
  if (samples < 1) throw usage_error("sweep: need at least one sample");
  const Mat& span = op0.kernel();
  const Vec v1 = space.velocity.col(0);
  const DegenerateSpeeds ds = degenerate_speeds(span, v1);

  std::vector<SweepRow> rows;
  std::vector<int> forced;
  for (const auto& [u, mult] : ds.distinct)
    if (u >= a && u <= b) {
      rows.push_back({u, {}, true});
      forced.push_back(mult);
    }
  const size_t n_deg = rows.size();
  for (int i = 0; i < samples; ++i) {
    const double u = samples == 1 ? a : a + (b - a) * i / (samples - 1);
    bool dup = false;
    for (size_t j = 0; j < n_deg; ++j)
      if (std::abs(u - rows[j].u) <= 1e-12 * (1.0 + std::abs(u))) dup = true;
    if (!dup) rows.push_back({u, {}, false});
  }
  guarded_for_each(static_cast<int>(rows.size()), ex, [&](int i) {
    SignatureOptions opt;
    if (static_cast<size_t>(i) < n_deg) opt.forced_l = forced[i];
    const double u = rows[i].u;
    rows[i].sig = signature(span, (v1.array() + u).matrix(), u, opt);
  });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& x, const SweepRow& y) { return x.u < y.u; });
  return rows;
}

std::vector<Regime> compress_regimes(const std::vector<SweepRow>& rows) {
  std::vector<Regime> out;
  for (const auto& r : rows) {
    if (!out.empty() && !r.degenerate && !out.back().point && out.back().sig == r.sig) {
      out.back().u_hi = r.u;
      continue;
    }
    out.push_back({r.u, r.u, r.degenerate, r.sig});
  }
  return out;
}

DecayEstimate measure_decay(const ModalProfile& f, double rel) {
  if ((f.constant.size() && f.constant.norm() > 0) || (f.linear.size() && f.linear.norm() > 0))
    throw usage_error("measure_decay: profile has a non-decaying part");
  if (!(f.max_coeff() > 0)) throw numeric_error("measure_decay: solution is numerically zero");
  DecayEstimate est;
  est.modal = f.min_rate(rel);
  if (!std::isfinite(est.modal) || est.modal <= 0)
    throw numeric_error("measure_decay: profile does not decay");
  const double x0 = 3.0 / est.modal, x1 = 8.0 / est.modal;
  const int m = 32;
  std::vector<double> xs, ys;
  for (int i = 0; i < m; ++i) {
    const double x = x0 + (x1 - x0) * i / (m - 1);
    const double nrm = f.value(x).norm();
    if (nrm > 0 && std::isfinite(std::log(nrm))) {
      xs.push_back(x);
      ys.push_back(std::log(nrm));
    }
  }
  est.fit = xs.size() >= 2 ? -least_squares_slope(xs, ys) : est.modal;
  return est;
}

std::vector<double> decaying_rates(const LinearizedOperator& op) {
  const Mat A = op.b.cwiseInverse().asDiagonal() * op.L();
  Eigen::EigenSolver<Mat> es(A, false);
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  std::vector<double> re;
  for (int j = 0; j < es.eigenvalues().size(); ++j)
    if (es.eigenvalues()(j).real() > 1e-9 * scale) re.push_back(es.eigenvalues()(j).real());
  std::sort(re.begin(), re.end());
  return re;
}

RegimeReport uniform_decay_study(const ModelSpec& model, const DiscreteSpace& space,
                                 const LinearizedOperator& op0, double u0,
                                 const StudyOptions& opt) {
  if (opt.samples_per_side < 1) throw usage_error("study: need at least one sample per side");
  const DegenerateSpeeds ds = degenerate_speeds(op0.kernel(), space.velocity.col(0));
  RegimeReport rep;
  rep.extra_conditions = opt.extra_conditions;
  for (const auto& [u, mult] : ds.distinct) rep.degenerate.push_back({u, mult});
  if (rep.degenerate.empty()) throw validation_error("study: no degenerate values");

  int idx = -1;
  for (size_t j = 0; j < rep.degenerate.size(); ++j)
    if (std::abs(rep.degenerate[j].u - u0) <= 1e-6 * (1.0 + std::abs(u0))) idx = static_cast<int>(j);
  if (idx < 0) {
    std::ostringstream os;
    os << "study: u0 = " << u0 << " is not a degenerate value";
    throw validation_error(os.str());
  }
  rep.u0 = rep.degenerate[idx].u;
  rep.l0 = rep.degenerate[idx].l;
  double nearest = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < rep.degenerate.size(); ++j)
    if (static_cast<int>(j) != idx)
      nearest = std::min(nearest, std::abs(rep.degenerate[j].u - rep.u0));
  const double u_plus = rep.degenerate.back().u;
  if (opt.delta > 0) {
    if (opt.delta >= nearest) {
      std::ostringstream os;
      os << "study: window half-width " << opt.delta << " reaches another degenerate value (distance "
         << nearest << ")";
      throw validation_error(os.str());
    }
    rep.delta = opt.delta;
  } else {
    rep.delta = std::min(0.5 * nearest, 0.2 * std::abs(u_plus));
  }

  const int n = op0.kernel_dim();
  const LinearizedOperator op_u0 = with_flow(op0, space, rep.u0);
  SignatureOptions forced;
  forced.forced_l = rep.l0;
  const KernelBasis kb0 = build_kernel_basis(op_u0, forced);
  rep.sig0 = kb0.sig;
  rep.k0_plus = kb0.sig.k_plus;
  const int cond_on = rep.k0_plus + rep.l0;

  // Slow side: the side where fewer conditions are needed than at u0.
  const LinearizedOperator lo = with_flow(op0, space, rep.u0 - rep.delta);
  const LinearizedOperator hi = with_flow(op0, space, rep.u0 + rep.delta);
  const Signature sig_lo = build_kernel_basis(lo).sig;
  const Signature sig_hi = build_kernel_basis(hi).sig;
  rep.slow_side = sig_lo.k_plus < cond_on ? -1 : +1;
  const Signature& sig_slow = rep.slow_side < 0 ? sig_lo : sig_hi;
  const int n_slow = cond_on - sig_slow.k_plus;

  // sigma* sits in the gap between the slow modes at the slow edge and the
  // remaining rates at either edge.
  const std::vector<double> r_slow = decaying_rates(rep.slow_side < 0 ? lo : hi);
  const std::vector<double> r_fast = decaying_rates(rep.slow_side < 0 ? hi : lo);
  if (static_cast<int>(r_slow.size()) <= n_slow || r_fast.empty())
    throw numeric_error("study: too few decaying modes to place the uniform rate");
  const double kappa_slow = n_slow > 0 ? r_slow[n_slow - 1] : 0.0;
  double kappa_next = std::numeric_limits<double>::infinity();
  for (double r : r_slow)
    if (r > kappa_slow * (1.0 + 1e-6) + 1e-12) {
      kappa_next = r;
      break;
    }
  kappa_next = std::min(kappa_next, r_fast.front());
  if (!(kappa_next > kappa_slow))
    throw numeric_error("study: no spectral gap above the slow modes at the window edge");
  rep.sigma_star = 0.5 * (kappa_slow + kappa_next);

  PenaltyBasis frozen;
  frozen.plus.resize(op0.size(), cond_on);
  frozen.plus << kb0.phi_plus(), kb0.psi;
  frozen.psi = Mat(op0.size(), 0);
  frozen.aux = Mat(op0.size(), 0);
  frozen.alpha = Vec(0);
  PenaltyConfig cfg_on;
  cfg_on.sigma = rep.sigma_star;
  cfg_on.alpha = 2.0 * rep.sigma_star;
  cfg_on.beta = 0.0;
  cfg_on.sigma_rule = rep.sigma_star;

  const int m = opt.samples_per_side;
  for (int k = -m; k <= m; ++k) {
    if (k == 0) continue;
    DecaySample s;
    s.u = rep.u0 + rep.delta * k / m;
    rep.samples.push_back(s);
  }

  const EquilibriumState eq = equilibrium(model, space);
  const Vec sw = space.sqrt_weight();
  guarded_for_each(static_cast<int>(rep.samples.size()), opt.ex, [&](int i) {
    DecaySample& s = rep.samples[i];
    const LinearizedOperator op = with_flow(op0, space, s.u);
    const HalfSpaceSplit split = split_half_spaces(space, s.u);
    const Mat dirs = sw.asDiagonal() * wall_parameter_directions(model, space, eq, s.u);
    WallState w = far_field_wall(model, s.u);
    w.temperature *= 1.1;
    for (double& d : w.density) d *= 0.95;
    if (w.velocity.size() > 1) w.velocity(1) += 0.05;
    const Vec fb = space.to_weighted(boundary_maxwellian_data(model, space, eq, w, s.u));

    const std::vector<double> rates = decaying_rates(op);
    s.slowest = rates.empty() ? 0.0 : rates.front();
    s.slow_mode = s.slowest < 0.1 * rep.sigma_star;

    const TransportSolution off = solve_halfspace(op, split, fb, dirs, {});
    s.sig = off.sig;
    s.conditions_off = off.conditions;
    s.free_off = n - off.conditions;
    s.rank_off = off.condition_rank;
    const DecayEstimate d_off = measure_decay(off);
    s.sigma_off = d_off.modal;
    s.fit_off = d_off.fit;

    s.conditions_on = cond_on;
    s.free_on = n - cond_on;
    s.sigma_on = s.fit_on = std::numeric_limits<double>::quiet_NaN();
    if (opt.extra_conditions) {
      const KernelBasis kb = build_kernel_basis(op);
      PenaltyConfig cfg = cfg_on;
      cfg.gamma = validate_assumptions(op).gamma;
      const PenalizedContext ctx = make_context(op, split, kb, frozen, cfg, 0.0, false);
      const TransportSolution on = solve_with_context(ctx, fb, dirs, {}, false);
      s.rank_on = on.condition_rank;
      s.removal_on = on.removal_residual;
      s.residual_on = on.undamped_residual;
      const DecayEstimate d_on = measure_decay(on);
      s.sigma_on = d_on.modal;
      s.fit_on = d_on.fit;
    }
  });

  // Verdicts.
  const DecaySample& left = rep.samples.front();
  const DecaySample& right = rep.samples.back();
  rep.max_conditions_on = cond_on;
  rep.min_free_on = n - cond_on;
  if (opt.extra_conditions) {
    rep.min_sigma_on = std::numeric_limits<double>::infinity();
    for (const auto& s : rep.samples) rep.min_sigma_on = std::min(rep.min_sigma_on, s.sigma_on);
    rep.edge_sigma_on = std::max(left.sigma_on, right.sigma_on);
    rep.uniform = rep.min_sigma_on >= rep.sigma_star * (1.0 - 1e-9) &&
                  rep.min_sigma_on >= 0.5 * rep.edge_sigma_on;
  }

  // Flag off, slow side ordered from the edge toward u0.
  std::vector<const DecaySample*> approach, fast;
  for (const auto& s : rep.samples) ((s.u - rep.u0) * rep.slow_side > 0 ? approach : fast).push_back(&s);
  if (rep.slow_side > 0) {
    std::reverse(approach.begin(), approach.end());
    std::reverse(fast.begin(), fast.end());
  }
  rep.slow_decreasing = true;
  for (size_t j = 1; j < approach.size(); ++j)
    if (!(approach[j]->sigma_off < approach[j - 1]->sigma_off)) rep.slow_decreasing = false;
  rep.slow_ratio = approach.back()->sigma_off / approach.front()->sigma_off;
  rep.slow_verdict = rep.slow_decreasing && rep.slow_ratio < 0.2;
  double fast_min = std::numeric_limits<double>::infinity();
  for (const auto* s : fast) fast_min = std::min(fast_min, s->sigma_off);
  rep.fast_side_ratio = fast_min / fast.back()->sigma_off;
  std::vector<double> lx, ly;
  for (const auto* s : approach) {
    lx.push_back(std::log(std::abs(s->u - rep.u0)));
    ly.push_back(std::log(s->sigma_off));
  }
  rep.empirical_exponent = lx.size() >= 2 ? least_squares_slope(lx, ly) : 0.0;
  return rep;
}

}  // namespace halfspace

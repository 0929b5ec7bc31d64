#include "halfspace/halfspace_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace halfspace {

namespace {

Mat plus_rows(const Mat& M, const std::vector<int>& plus) {
  Mat r(plus.size(), M.cols());
  for (size_t i = 0; i < plus.size(); ++i) r.row(i) = M.row(plus[i]);
  return r;
}

Vec plus_entries(const Vec& v, const std::vector<int>& plus) {
  Vec r(plus.size());
  for (size_t i = 0; i < plus.size(); ++i) r(i) = v(plus[i]);
  return r;
}

int numeric_rank(const Mat& C, double rel = 1e-9) {
  if (C.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(C);
  const Vec& sv = svd.singularValues();
  if (!(sv(0) > 0)) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel * sv(0)) ++r;
  return r;
}

// (Lambda - a B)^{-1} s; a resonant but consistent right-hand side is solved
// in the least-squares sense.
Vec resolvent(const PenalizedContext& ctx, double a, const Vec& s) {
  Mat A = ctx.pen.Lambda;
  A.diagonal() -= a * ctx.op.b;
  double gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < ctx.modes.lambda.size(); ++j)
    gap = std::min(gap, std::abs(ctx.modes.lambda(j) - a));
  const double scale = std::max(1.0, s.norm());
  if (gap > 1e-8 * (1.0 + std::abs(a))) {
    Vec w = A.partialPivLu().solve(s);
    return w;
  }
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
  cod.setThreshold(1e-10);
  Vec w = cod.solve(s);
  const double res = (A * w - s).norm();
  if (res > 1e-10 * scale) {
    std::ostringstream os;
    os << "source rate " << a << " is resonant with a pencil eigenvalue (residual " << res
       << ")";
    throw numeric_error(os.str());
  }
  return w;
}

}  // namespace

ModeDecomposition transport_modes(const Mat& Lambda, const Vec& b) {
  if (b.cwiseAbs().minCoeff() == 0.0) throw validation_error("transport modes: B is singular");
  const Mat A = b.cwiseInverse().asDiagonal() * Lambda;
  Eigen::EigenSolver<Mat> es(A);
  if (es.info() != Eigen::Success) throw numeric_error("transport modes: eigensolver failed");
  ModeDecomposition m;
  m.lambda = es.eigenvalues();
  m.vectors = es.eigenvectors();
  m.dim_plus = static_cast<int>((b.array() > 0).count());
  m.min_abs_real = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m.lambda.size(); ++j) {
    m.min_abs_real = std::min(m.min_abs_real, std::abs(m.lambda(j).real()));
    if (m.lambda(j).real() > 0) m.stable.push_back(j);
  }
  if (m.min_abs_real < 1e-10) {
    std::ostringstream os;
    os << "transport modes: eigenvalue within " << m.min_abs_real
       << " of the imaginary axis (coercivity or conditioning failure)";
    throw numeric_error(os.str());
  }
  std::sort(m.stable.begin(), m.stable.end(), [&](int x, int y) {
    const cplx a = m.lambda(x), c = m.lambda(y);
    return a.real() != c.real() ? a.real() < c.real() : a.imag() < c.imag();
  });
  return m;
}

BoundaryOperator make_boundary(const HalfSpaceSplit& split, double c) {
  if (!(std::abs(c) <= 1.0)) throw usage_error("boundary: accommodation coefficient needs |c| <= 1");
  BoundaryOperator bc;
  bc.c = c;
  bc.plus = split.plus;
  const int n = static_cast<int>(split.b.size());
  Mat P = Mat::Zero(n, n);
  if (c != 0.0) P = reflection_operator(split);
  bc.tilde = Mat(split.p_plus.asDiagonal()) - c * P * split.p_minus.asDiagonal();
  bc.tilde_adj = c * Mat(split.p_plus.asDiagonal()) - P * split.p_minus.asDiagonal();
  return bc;
}

double SourceTerm::min_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (double a : rates) m = std::min(m, a);
  return m;
}

ModalProfile SourceTerm::profile(int n) const {
  ModalProfile p(n);
  for (size_t k = 0; k < rates.size(); ++k) p.add(rates[k], vectors[k]);
  return p;
}

void check_source(const SourceTerm& S, const Mat& kernel_basis, double tol) {
  if (S.rates.size() != S.vectors.size()) throw usage_error("source: rates and vectors differ in count");
  for (size_t k = 0; k < S.rates.size(); ++k) {
    if (!(S.rates[k] > 0)) throw usage_error("source: decay rates must be positive");
    if (S.vectors[k].size() != kernel_basis.rows()) throw usage_error("source: vector size mismatch");
    const double leak = (kernel_basis.transpose() * S.vectors[k]).norm();
    if (leak > tol * std::max(1.0, S.vectors[k].norm())) {
      std::ostringstream os;
      os << "source: profile " << k << " is not in Im L (kernel component " << leak << ")";
      throw validation_error(os.str());
    }
  }
}

std::vector<double> x_grid(double sigma, int points) {
  if (!(sigma > 0)) throw usage_error("x grid: sigma must be positive");
  std::vector<double> x{0.0};
  const double a = 1e-3 / sigma, b = 10.0 / sigma;
  for (int i = 0; i < points - 1; ++i)
    x.push_back(a * std::pow(b / a, static_cast<double>(i) / (points - 2)));
  return x;
}

Mat PenalizedContext::condition_functionals() const {
  Mat Y(pb.plus.rows(), conditions());
  Y << pb.plus, pb.psi;
  return Y;
}

PenalizedContext make_context(const LinearizedOperator& op, const HalfSpaceSplit& split,
                              const KernelBasis& basis, const PenaltyBasis& pb,
                              const PenaltyConfig& config, double accommodation,
                              bool require_square) {
  PenalizedContext ctx;
  ctx.op = op;
  ctx.split = split;
  ctx.bc = make_boundary(split, accommodation);
  ctx.basis = basis;
  ctx.pb = pb;
  ctx.config = config;
  ctx.gamma = config.gamma;
  ctx.pen = build_penalized_operator(op, config, build_projections(pb));
  ctx.modes = transport_modes(ctx.pen.Lambda, op.b);
  ctx.square = ctx.modes.inertia_ok();
  if (!ctx.square && (require_square || static_cast<int>(ctx.modes.stable.size()) < ctx.modes.dim_plus)) {
    std::ostringstream os;
    os << "pencil has " << ctx.modes.stable.size() << " stable modes but dim h+ = "
       << ctx.modes.dim_plus;
    throw numeric_error(os.str());
  }
  const int m = static_cast<int>(ctx.modes.stable.size());
  ctx.stable_vectors.resize(op.size(), m);
  for (int j = 0; j < m; ++j) ctx.stable_vectors.col(j) = ctx.modes.vectors.col(ctx.modes.stable[j]);
  const CMat F = plus_rows(ctx.bc.tilde, ctx.bc.plus).cast<cplx>() * ctx.stable_vectors;
  if (!ctx.square) {
    ctx.trace_map = CMat::Zero(op.size(), 0);
  } else if (m > 0) {
    ctx.fit_lu.compute(F);
    if (ctx.fit_lu.rank() < m) throw numeric_error("boundary fit is singular (broken boundary operator)");
    Eigen::JacobiSVD<CMat> svd(F);
    const Vec& sv = svd.singularValues();
    ctx.fit_condition = sv(0) / sv(m - 1);
    ctx.trace_map = ctx.stable_vectors * ctx.fit_lu.inverse();
  } else {
    ctx.trace_map = CMat::Zero(op.size(), 0);
  }
  return ctx;
}

namespace {

PenalizedContext standard_context(const LinearizedOperator& op, const HalfSpaceSplit& split,
                                  double accommodation, PenaltyOptions popt,
                                  SignatureOptions sopt, double sigma_cap) {
  const AssumptionReport rep = validate_assumptions(op);
  if (!rep.pass) {
    std::string msg = "assumptions fail:";
    for (const auto& f : rep.failures) msg += " " + f + ";";
    throw validation_error(msg);
  }
  const KernelBasis kb = build_kernel_basis(op, sopt);
  PenaltyConfig cfg = penalty_constants(kb, op.b, rep.gamma, popt);
  if (cfg.sigma > sigma_cap) {
    popt.sigma_override = sigma_cap;
    cfg = penalty_constants(kb, op.b, rep.gamma, popt);
  }
  return make_context(op, split, kb, penalty_basis(kb), cfg, accommodation);
}

double half_min_rate(const SourceTerm& S) {
  return S.empty() ? std::numeric_limits<double>::infinity() : 0.5 * S.min_rate();
}

}  // namespace

PenalizedContext make_context(const LinearizedOperator& op, const HalfSpaceSplit& split,
                              const ContextOptions& opt) {
  return standard_context(op, split, opt.accommodation, opt.penalty, opt.signature,
                          std::numeric_limits<double>::infinity());
}

namespace {

struct Particular {
  ModalProfile profile;
  Vec at0;
};

Particular particular_solution(const PenalizedContext& ctx, const SourceTerm& S) {
  const int N = ctx.op.size();
  Particular p{ModalProfile(N), Vec::Zero(N)};
  for (size_t k = 0; k < S.rates.size(); ++k) {
    const Vec w = resolvent(ctx, S.rates[k], S.vectors[k]);
    p.profile.add(S.rates[k], w);
    p.at0 += w;
  }
  return p;
}

PenalizedSolution assemble_solution(const PenalizedContext& ctx, const Particular& part,
                                    const CVec& c, const Vec& g_b, const SourceTerm& S) {
  PenalizedSolution sol;
  sol.g = part.profile;
  for (int j = 0; j < c.size(); ++j)
    sol.g.add(ctx.modes.lambda(ctx.modes.stable[j]), c(j) * ctx.stable_vectors.col(j));
  sol.g.compress();
  const Vec g0 = sol.g.value(0.0);
  sol.boundary_residual =
      ctx.bc.plus.empty() ? 0.0
                          : plus_entries(ctx.bc.tilde * g0 - g_b, ctx.bc.plus).cwiseAbs().maxCoeff();
  const ModalProfile src = S.profile(ctx.op.size());
  const auto B = ctx.op.b.asDiagonal();
  for (double x : x_grid(ctx.config.sigma)) {
    const Vec r = B * sol.g.derivative(x) + ctx.pen.Lambda * sol.g.value(x) - src.value(x);
    sol.equation_residual = std::max(sol.equation_residual, r.norm());
  }
  return sol;
}

}  // namespace

PenalizedSolution solve_penalized(const PenalizedContext& ctx, const Vec& g_b,
                                  const SourceTerm& S) {
  const int N = ctx.op.size();
  if (g_b.size() != N) throw usage_error("solve_penalized: boundary data size mismatch");
  if (!ctx.square)
    throw usage_error("solve_penalized: pencil has excess stable modes; use admissible_boundary");
  const Particular part = particular_solution(ctx, S);
  CVec c(0);
  if (!ctx.bc.plus.empty()) {
    const Vec data = plus_entries(g_b - ctx.bc.tilde * part.at0, ctx.bc.plus);
    c = ctx.fit_lu.solve(data.cast<cplx>());
  }
  return assemble_solution(ctx, part, c, g_b, S);
}

Prop1Check proposition1_check(const PenalizedContext& ctx, const PenalizedSolution& sol,
                              const Vec& g_b, const SourceTerm& S) {
  Prop1Check c;
  const double mu = ctx.config.mu, sigma = ctx.config.sigma;
  c.lhs = mu * sol.g.l2_norm();
  const double snorm = S.empty() ? 0.0 : S.profile(ctx.op.size()).l2_norm();
  c.rhs_printed = snorm + (ctx.pen.Lambda * g_b).norm() / std::sqrt(2.0 * sigma) +
                  std::sqrt(0.5 * sigma) * ctx.op.b.cwiseProduct(g_b).norm();
  c.rhs_lifted = c.rhs_printed + mu * g_b.norm() / std::sqrt(2.0 * sigma);
  c.printed_holds = c.lhs <= c.rhs_printed * (1.0 + 1e-12);
  c.lifted_holds = c.lhs <= c.rhs_lifted * (1.0 + 1e-12);
  return c;
}

NormalizedSource source_normalize(const SourceTerm& S, const KernelBasis& kb, const Vec& b,
                                  const BoundaryOperator& bc, double sigma) {
  const int N = static_cast<int>(b.size());
  const int l = kb.sig.l;
  NormalizedSource ns;
  ns.boundary_shift = Vec::Zero(N);
  ns.correction = ModalProfile(N);
  for (size_t k = 0; k < S.rates.size(); ++k) {
    const double a = S.rates[k];
    if (!(a > sigma)) throw usage_error("source normalize: source rates must exceed sigma");
    Vec s0 = S.vectors[k];
    Vec corr = Vec::Zero(N);
    for (int r = 0; r < l; ++r) {
      const double m = S.vectors[k].dot(kb.aux.col(r)) / kb.alpha(r);
      s0 -= m * b.cwiseProduct(kb.psi.col(r));
      corr -= (m / a) * kb.psi.col(r);
    }
    ns.shifted.add(a - sigma, s0);
    if (l > 0) {
      ns.correction.add(a, corr);
      ns.boundary_shift -= bc.tilde * corr;
    }
  }
  return ns;
}

RemovalReport removal_conditions(const PenalizedContext& ctx, const PenalizedSolution& sol,
                                 const SourceTerm& S) {
  RemovalReport rep;
  const Vec& b = ctx.op.b;
  const double sigma = ctx.config.sigma;
  const Mat Y = ctx.condition_functionals();
  const Vec Bg0 = b.cwiseProduct(sol.g.value(0.0));
  rep.residual = Y.transpose() * Bg0;
  const int kp = static_cast<int>(ctx.pb.plus.cols());
  const int l = static_cast<int>(ctx.pb.psi.cols());
  const std::vector<double> xs = x_grid(sigma);
  const double floor = 1e-6 * std::max(Bg0.norm(), 1e-300);

  std::vector<Vec> Bg;
  for (double x : xs) Bg.push_back(b.cwiseProduct(sol.g.value(x)));
  for (int i = 0; i < kp; ++i) {
    const double m0 = rep.residual(i);
    for (size_t j = 0; j < xs.size(); ++j) {
      const double m = Bg[j].dot(ctx.pb.plus.col(i));
      rep.phi_law = std::max(rep.phi_law, std::abs(m - m0 * std::exp(-sigma * xs[j])) /
                                              std::max(std::abs(m0), floor));
    }
  }
  const double plus_max = kp ? rep.residual.head(kp).cwiseAbs().maxCoeff() : 0.0;
  rep.psi_law_applicable = l > 0 && plus_max <= 1e-10 * std::max(1.0, Bg0.norm());
  for (int s = 0; s < l; ++s) {
    const double rate = sigma - std::sqrt(ctx.config.beta / ctx.pb.alpha(s));
    const double p0 = rep.residual(kp + s);
    for (size_t j = 0; j < xs.size(); ++j) {
      const double p = Bg[j].dot(ctx.pb.psi.col(s));
      rep.psi_law = std::max(rep.psi_law, std::abs(p - p0 * std::exp(rate * xs[j])) /
                                              std::max(std::abs(p0), floor));
    }
  }
  const ModalProfile src = S.profile(ctx.op.size());
  Mat A = ctx.op.L();
  A.diagonal() -= sigma * b;
  for (double x : xs) {
    const Vec r = b.cwiseProduct(sol.g.derivative(x)) + A * sol.g.value(x) - src.value(x);
    rep.undamped_residual = std::max(rep.undamped_residual, r.norm());
  }
  return rep;
}

Mat condition_matrix(const PenalizedContext& ctx, const Mat& directions) {
  const Mat G0 = (ctx.trace_map * plus_rows(directions, ctx.bc.plus).cast<cplx>()).real();
  return ctx.condition_functionals().transpose() * ctx.op.b.asDiagonal() * G0;
}

Mat plus_unit_directions(const HalfSpaceSplit& split) {
  Mat D = Mat::Zero(split.b.size(), split.plus.size());
  for (size_t j = 0; j < split.plus.size(); ++j) D(split.plus[j], j) = 1.0;
  return D;
}

namespace {

// Mode coefficients and direction weights solved together:
//   R~ W c - D t = g_b0 - R~ w_p(0),   Y^T B W c = -Y^T B w_p(0).
// Used when the pencil has more stable modes than dim h+.
AdmissibleResult admissible_joint(const PenalizedContext& ctx, const Vec& g_b0,
                                  const Mat& directions, const SourceTerm& S,
                                  bool require_full_rank) {
  AdmissibleResult res;
  const int k = ctx.conditions();
  const int p = static_cast<int>(directions.cols());
  const int m = static_cast<int>(ctx.stable_vectors.cols());
  const int h = static_cast<int>(ctx.bc.plus.size());
  const Particular part = particular_solution(ctx, S);
  const Mat Y = ctx.condition_functionals();
  const CMat F = plus_rows(ctx.bc.tilde, ctx.bc.plus).cast<cplx>() * ctx.stable_vectors;
  const CMat G = (Y.transpose() * ctx.op.b.asDiagonal()).cast<cplx>() * ctx.stable_vectors;
  CMat J = CMat::Zero(h + k, m + p);
  J.topLeftCorner(h, m) = F;
  J.topRightCorner(h, p) = -plus_rows(directions, ctx.bc.plus).cast<cplx>();
  J.bottomLeftCorner(k, m) = G;
  CVec rhs(h + k);
  rhs.head(h) = plus_entries(g_b0 - ctx.bc.tilde * part.at0, ctx.bc.plus).cast<cplx>();
  rhs.tail(k) = (-(Y.transpose() * ctx.op.b.cwiseProduct(part.at0))).cast<cplx>();
  Eigen::CompleteOrthogonalDecomposition<CMat> cod(J);
  cod.setThreshold(1e-10);
  const CVec z = cod.solve(rhs);
  CMat FG(h + k, m);
  FG << F, G;
  Eigen::CompleteOrthogonalDecomposition<CMat> cfg(FG);
  cfg.setThreshold(1e-10);
  res.rank = static_cast<int>(cod.rank() - cfg.rank());
  if (res.rank < k && require_full_rank) {
    std::ostringstream os;
    os << "insufficient boundary family: condition rank " << res.rank << " < " << k;
    throw validation_error(os.str());
  }
  const double miss = (J * z - rhs).norm();
  if (miss > 1e-8 * std::max(1.0, rhs.norm())) {
    std::ostringstream os;
    os << "no admissible boundary data along the given directions (residual " << miss << ")";
    throw validation_error(os.str());
  }
  res.t = z.tail(p).real();
  res.g_b = g_b0 + directions * res.t;
  res.free_parameters = p - res.rank;
  res.C = Mat::Zero(k, p);
  res.solution = assemble_solution(ctx, part, z.head(m), res.g_b, S);
  res.removal = removal_conditions(ctx, res.solution, S);
  return res;
}

}  // namespace

AdmissibleResult admissible_boundary(const PenalizedContext& ctx, const Vec& g_b0,
                                     const Mat& directions, const SourceTerm& S,
                                     bool require_full_rank) {
  AdmissibleResult res;
  const int k = ctx.conditions();
  const int m = static_cast<int>(directions.cols());
  res.t = Vec::Zero(m);
  res.g_b = g_b0;
  if (!ctx.square) return admissible_joint(ctx, g_b0, directions, S, require_full_rank);
  if (k > 0) {
    const PenalizedSolution base = solve_penalized(ctx, g_b0, S);
    const Mat Y = ctx.condition_functionals();
    const Vec r0 = Y.transpose() * ctx.op.b.cwiseProduct(base.g.value(0.0));
    res.C = condition_matrix(ctx, directions);
    res.rank = numeric_rank(res.C);
    if (res.rank < k && require_full_rank) {
      std::ostringstream os;
      os << "insufficient boundary family: condition matrix rank " << res.rank << " < " << k;
      throw validation_error(os.str());
    }
    if (m > 0) {
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(res.C);
      cod.setThreshold(1e-9);
      res.t = cod.solve(-r0);
      res.g_b = g_b0 + directions * res.t;
    }
  } else {
    res.C = Mat::Zero(0, m);
  }
  res.free_parameters = m - res.rank;
  res.solution = solve_penalized(ctx, res.g_b, S);
  res.removal = removal_conditions(ctx, res.solution, S);
  return res;
}

ProbeReport verify_probes(const PenalizedContext& ctx) {
  ProbeReport rep;
  const KernelBasis& kb = ctx.basis;
  const Vec& b = ctx.op.b;
  const double sigma = ctx.config.sigma;
  const double beta = ctx.config.beta;
  const Mat U = plus_unit_directions(ctx.split);
  const int kp = kb.sig.k_plus, l = kb.sig.l;
  rep.expected = kp + l;
  rep.codimension = numeric_rank(condition_matrix(ctx, U));
  const Mat Pp = ctx.pen.proj.plus, P0 = ctx.pen.proj.zero_tilde;
  auto trace = [&](const Vec& data) {
    return Vec((ctx.trace_map * plus_entries(data, ctx.bc.plus).cast<cplx>()).real());
  };
  for (int i = 0; i < kp; ++i) {
    const Vec phi = kb.phi.col(i);
    SourceTerm S;
    S.add(sigma, 2.0 * sigma * (b.cwiseProduct(phi) - kb.beta(i) * phi));
    const AdmissibleResult adm = admissible_boundary(ctx, Vec::Zero(b.size()), U, S);
    const Vec h0 = trace(adm.g_b + ctx.bc.tilde * phi);
    const Vec Bh = b.cwiseProduct(h0);
    rep.plus_error = std::max(rep.plus_error, (Pp * Bh - kb.beta(i) * phi).cwiseAbs().maxCoeff());
    rep.plus_error = std::max(rep.plus_error, (P0 * Bh).cwiseAbs().maxCoeff());
  }
  for (int r = 0; r < l; ++r) {
    const Vec psi = kb.psi.col(r);
    const double a = kb.alpha(r);
    SourceTerm S;
    S.add(sigma, (4.0 * sigma * sigma * a / beta - 1.0) * b.cwiseProduct(psi));
    const AdmissibleResult adm = admissible_boundary(ctx, Vec::Zero(b.size()), U, S);
    const Vec v = kb.aux.col(r) + (2.0 * sigma * a / beta) * psi;
    const Vec h0 = trace(adm.g_b + ctx.bc.tilde * v);
    const Vec Bh = b.cwiseProduct(h0);
    rep.zero_error = std::max(rep.zero_error, (P0 * Bh - a * psi).cwiseAbs().maxCoeff());
    rep.zero_error = std::max(rep.zero_error, (Pp * Bh).cwiseAbs().maxCoeff());
  }
  return rep;
}

double equation_residual(const LinearizedOperator& op, const ModalProfile& f,
                         const SourceTerm& S, double sigma) {
  const ModalProfile src = S.profile(op.size());
  double worst = 0.0;
  for (double x : x_grid(sigma)) {
    const Vec r = op.b.cwiseProduct(f.derivative(x)) + op.L() * f.value(x) - src.value(x);
    worst = std::max(worst, r.norm());
  }
  return worst;
}

TransportSolution solve_with_context(const PenalizedContext& ctx, const Vec& f_b,
                                     const Mat& directions, const SourceTerm& S,
                                     bool require_full_rank) {
  check_source(S, ctx.op.kernel());
  TransportSolution sol;
  sol.sig = ctx.basis.sig;
  sol.config = ctx.config;
  sol.modes = ctx.modes;
  sol.sigma = ctx.config.sigma;
  const NormalizedSource ns = source_normalize(S, ctx.basis, ctx.op.b, ctx.bc, sol.sigma);
  const AdmissibleResult adm =
      admissible_boundary(ctx, f_b + ns.boundary_shift, directions, ns.shifted, require_full_rank);
  sol.g = adm.solution.g;
  sol.f = sol.g.damped(sol.sigma);
  sol.f += ns.correction;
  sol.f.compress();
  sol.t = adm.t;
  sol.f_b = f_b + directions * adm.t;
  sol.conditions = ctx.conditions();
  sol.condition_rank = adm.rank;
  sol.free_parameters = adm.free_parameters;
  sol.boundary_residual = adm.solution.boundary_residual;
  sol.equation_residual = adm.solution.equation_residual;
  sol.removal_residual = adm.removal.max_abs();
  sol.phi_law = adm.removal.phi_law;
  sol.undamped_residual = equation_residual(ctx.op, sol.f, S, sol.sigma);
  sol.decay_rate = sol.f.min_rate();
  return sol;
}

TransportSolution solve_halfspace(const LinearizedOperator& op, const HalfSpaceSplit& split,
                                  const Vec& f_b, const Mat& directions, const SourceTerm& S,
                                  const HalfspaceOptions& opt) {
  const PenalizedContext ctx = standard_context(op, split, opt.accommodation, opt.penalty,
                                                opt.signature, half_min_rate(S));
  return solve_with_context(ctx, f_b, directions, S);
}

TransportSolution solve_asymptotic(const LinearizedOperator& op, const HalfSpaceSplit& split,
                                   const Vec& f_b, const Vec& prescribed, AsymptoticMode mode,
                                   const SourceTerm& S, const HalfspaceOptions& opt) {
  if (mode == AsymptoticMode::kramer && !S.empty())
    throw usage_error("kramer mode requires a vanishing source");
  const PenalizedContext ctx = standard_context(op, split, opt.accommodation, opt.penalty,
                                                opt.signature, half_min_rate(S));
  const KernelBasis& kb = ctx.basis;
  const int kp = kb.sig.k_plus, km = kb.sig.k_minus, l = kb.sig.l;
  const int expected = mode == AsymptoticMode::milne ? km : km + l;
  if (prescribed.size() != expected) {
    std::ostringstream os;
    os << "asymptotic: expected " << expected << " prescribed values (negative block"
       << (mode == AsymptoticMode::kramer ? " plus slopes" : "") << "), got " << prescribed.size();
    throw usage_error(os.str());
  }
  const int N = op.size();
  const Mat neg = kb.phi_minus();
  Vec known = neg * prescribed.head(km);
  Vec slope = Vec::Zero(N);
  if (mode == AsymptoticMode::kramer) {
    // aux_r minus its negative-block part still solves L a = B psi_r and keeps
    // the prescribed (f~ | phi_i) intact.
    for (int r = 0; r < l; ++r) {
      known -= prescribed(km + r) * (kb.aux.col(r) - neg * (neg.transpose() * kb.aux.col(r)));
      slope += prescribed(km + r) * kb.psi.col(r);
    }
  }
  Mat Yfree(N, kp + l);
  Yfree << kb.phi_plus(), kb.psi;
  const Mat D = -(ctx.bc.tilde * Yfree);
  TransportSolution sol = solve_with_context(ctx, f_b - ctx.bc.tilde * known, D, S);
  const Vec f_inf = known + Yfree * sol.t;
  sol.f.constant = f_inf;
  sol.f.linear = slope;
  sol.f_inf = f_inf;
  sol.f_b = f_b;
  if (mode == AsymptoticMode::kramer) {
    sol.f_inf_slope = slope;
    sol.kramer_residual = (op.b.cwiseProduct(slope) + op.L() * f_inf).norm();
  }
  sol.undamped_residual = equation_residual(op, sol.f, S, sol.sigma);
  return sol;
}

Vec CauchySolution::value(double t) const {
  const int N = static_cast<int>(values.size());
  Vec c(N);
  for (int j = 0; j < N; ++j) {
    const double lam = j < kernel_dim ? 0.0 : values(j);
    double cj = coeff0(j) * std::exp(-lam * t);
    for (size_t k = 0; k < source.rates.size(); ++k) {
      const double a = source.rates[k];
      const double s = vectors.col(j).dot(source.vectors[k]);
      if (j < kernel_dim) continue;
      if (std::abs(lam - a) < 1e-12 * (1.0 + a))
        cj += s * t * std::exp(-a * t);
      else
        cj += s * (std::exp(-a * t) - std::exp(-lam * t)) / (lam - a);
    }
    c(j) = cj;
  }
  return vectors * c;
}

CauchySolution solve_cauchy(const LinearizedOperator& op, const Vec& f0, const SourceTerm& S) {
  if (f0.size() != op.size()) throw usage_error("cauchy: initial data size mismatch");
  check_source(S, op.kernel());
  const OperatorSpectrum& sp = op.core->spectrum();
  CauchySolution cs;
  cs.values = sp.values;
  cs.vectors = sp.vectors;
  cs.kernel_dim = sp.kernel_dim;
  cs.source = S;
  cs.coeff0 = sp.vectors.transpose() * f0;
  cs.mu0 = sp.kernel_dim < sp.values.size() ? sp.values(sp.kernel_dim) : 0.0;
  const Mat Z = sp.vectors.leftCols(sp.kernel_dim);
  const Vec k0 = Z.transpose() * f0;
  cs.decays = k0.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, f0.norm());
  for (int i = 0; i <= 100; ++i) {
    const double t = 0.1 * i;
    cs.conservation_residual =
        std::max(cs.conservation_residual, (Z.transpose() * cs.value(t) - k0).cwiseAbs().maxCoeff());
  }
  return cs;
}

}  // namespace halfspace

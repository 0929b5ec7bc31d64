// halfspace: command-line driver for the discrete-velocity half-space solvers.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "halfspace/config.hpp"
#include "halfspace/regime_analysis.hpp"

using namespace halfspace;
using nlohmann::json;

namespace {

// Numbers go through %.12g so repeated runs compare byte for byte.
json r12(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json r12(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(r12(v(i)));
  return a;
}

std::string f12(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json sig_json(const Signature& s) {
  return {{"k_plus", s.k_plus}, {"k_minus", s.k_minus}, {"l", s.l}};
}

struct Output {
  json doc;
  std::string csv;
};

struct Setup {
  DiscreteSpace space;
  EquilibriumState eq;
  LinearizedOperator op0;
};

Setup setup(const RunConfig& c, bool with_operator = true) {
  Setup s;
  s.space = build_space(c.model, c.grid);
  s.eq = equilibrium(c.model, s.space);
  if (with_operator) s.op0 = build_bgk_operator(c.model, s.space, s.eq, NuProfile{}, 0.0);
  return s;
}

double require_u(const RunConfig& c) {
  if (!c.u) throw usage_error("this command needs --u (or run.u in the config)");
  return *c.u;
}

// forced_l when u sits on a degenerate value of the grid.
SignatureOptions signature_options(const Setup& s, double u) {
  SignatureOptions opt;
  for (const auto& [v, mult] : degenerate_speeds(s.op0.kernel(), s.space.velocity.col(0)).distinct)
    if (std::abs(v - u) <= 1e-9 * (1.0 + std::abs(u))) opt.forced_l = mult;
  return opt;
}

Vec wall_data(const RunConfig& c, const Setup& s, double u) {
  WallState w = far_field_wall(c.model, u);
  w.temperature *= c.wall.temperature;
  for (double& d : w.density) d *= c.wall.density;
  if (w.velocity.size() > 1) w.velocity(1) += c.wall.velocity;
  return s.space.to_weighted(boundary_maxwellian_data(c.model, s.space, s.eq, w, u));
}

// Source shape: sqrt(variance) v1 |v|^2 with the kernel part removed, unit norm.
SourceTerm sources(const RunConfig& c, const Setup& s) {
  SourceTerm S;
  if (c.sources.empty()) return S;
  const Vec v1 = s.space.velocity.col(0);
  const Vec v2 = s.space.velocity.rowwise().squaredNorm();
  Vec shape = s.space.to_weighted(s.eq.root.cwiseProduct(v1).cwiseProduct(v2));
  const Mat& K = s.op0.kernel();
  shape -= K * (K.transpose() * shape);
  if (!(shape.norm() > 0)) throw usage_error("source shape vanishes on this grid");
  shape.normalize();
  for (const auto& src : c.sources) {
    if (!(src.rate > 0)) throw usage_error("source rates must be positive");
    S.add(src.rate, src.amplitude * shape);
  }
  return S;
}

Output cmd_speeds(const RunConfig& c) {
  const Setup s = setup(c, false);
  const DegenerateSpeeds ds = degenerate_speeds(c.model, s.space);
  Output o;
  o.doc = {{"family", family_name(c.model.family)},
           {"u0", r12(ds.closed->u0)},
           {"u_plus", r12(ds.closed->u_plus)},
           {"u_minus", r12(ds.closed->u_minus)},
           {"max_mismatch", r12(ds.max_mismatch)}};
  json gen = json::array();
  for (const auto& [u, l] : ds.distinct) gen.push_back({{"u", r12(u)}, {"l", l}});
  o.doc["generic"] = gen;
  const char* names[] = {"u_minus", "u0", "u_plus"};
  const double closed[] = {ds.closed->u_minus, ds.closed->u0, ds.closed->u_plus};
  o.csv = "name,closed_form,generic,l\n";
  for (int i = 0; i < 3; ++i)
    o.csv += std::string(names[i]) + "," + f12(closed[i]) + "," + f12(ds.distinct[i].first) + "," +
             std::to_string(ds.distinct[i].second) + "\n";
  return o;
}

Output cmd_signature(const RunConfig& c) {
  const Setup s = setup(c);
  const double u = require_u(c);
  const LinearizedOperator op = with_flow(s.op0, s.space, u);
  const Signature sig =
      signature(op.kernel(), op.b, u, signature_options(s, u));
  Output o;
  o.doc = sig_json(sig);
  o.doc["u"] = r12(u);
  o.doc["n"] = op.kernel_dim();
  o.csv = "u,k_plus,k_minus,l\n" + f12(u) + "," + std::to_string(sig.k_plus) + "," +
          std::to_string(sig.k_minus) + "," + std::to_string(sig.l) + "\n";
  return o;
}

Output cmd_basis(const RunConfig& c) {
  const Setup s = setup(c);
  const double u = require_u(c);
  const LinearizedOperator op = with_flow(s.op0, s.space, u);
  const KernelBasis kb = build_kernel_basis(op, signature_options(s, u));
  const BasisResiduals r = basis_residuals(op, kb);
  Output o;
  o.doc = {{"u", r12(u)},
           {"signature", sig_json(kb.sig)},
           {"beta", r12(kb.beta)},
           {"alpha", r12(kb.alpha)},
           {"gamma", r12(kb.gamma)},
           {"beta_min", r12(kb.beta_min)},
           {"beta_hat_max", r12(kb.beta_hat_max)},
           {"gamma1", r12(kb.gamma1)},
           {"residuals",
            {{"c2", r12(r.c2)},
             {"aux_equation", r12(r.aux_equation)},
             {"c4", r12(r.c4)},
             {"c5", r12(r.c5)},
             {"alpha", r12(r.alpha)},
             {"e11", r12(r.e11)},
             {"e12", r12(r.e12)}}}};
  o.csv = "kind,index,value\n";
  for (int i = 0; i < kb.beta.size(); ++i) o.csv += "beta," + std::to_string(i) + "," + f12(kb.beta(i)) + "\n";
  for (int i = 0; i < kb.alpha.size(); ++i) o.csv += "alpha," + std::to_string(i) + "," + f12(kb.alpha(i)) + "\n";
  for (int i = 0; i < kb.gamma.size(); ++i) o.csv += "gamma," + std::to_string(i) + "," + f12(kb.gamma(i)) + "\n";
  return o;
}

void require_assumptions(const AssumptionReport& rep) {
  if (rep.pass) return;
  std::string msg = "assumptions fail:";
  for (const auto& f : rep.failures) msg += " " + f + ";";
  throw validation_error(msg);
}

json penalty_json(const PenaltyConfig& p) {
  return {{"sigma", r12(p.sigma)}, {"alpha", r12(p.alpha)}, {"beta", r12(p.beta)},
          {"mu", r12(p.mu)},       {"eps", r12(p.eps)},     {"eps1", r12(p.eps1)},
          {"eps2", r12(p.eps2)},   {"arg1", r12(p.arg1)},   {"arg2", r12(p.arg2)},
          {"arg3", r12(p.arg3)},   {"gamma", r12(p.gamma)}, {"beta_min", r12(p.beta_min)}};
}

Output cmd_coercivity(const RunConfig& c) {
  const Setup s = setup(c);
  const double u = require_u(c);
  const LinearizedOperator op = with_flow(s.op0, s.space, u);
  const AssumptionReport rep = validate_assumptions(op);
  require_assumptions(rep);
  const KernelBasis kb = build_kernel_basis(op, signature_options(s, u));
  const PenaltyConfig cfg = penalty_constants(kb, op.b, rep.gamma, c.penalty);
  const CoercivityReport cr = coercivity_check(build_penalized_operator(op, cfg, build_projections(kb)));
  Output o;
  o.doc = {{"u", r12(u)}, {"signature", sig_json(kb.sig)}, {"penalty", penalty_json(cfg)},
           {"min_eig", r12(cr.min_eig)}, {"mu", r12(cr.mu)}, {"pass", cr.pass}};
  o.csv = "u,sigma,alpha,beta,mu,min_eig,pass\n" + f12(u) + "," + f12(cfg.sigma) + "," +
          f12(cfg.alpha) + "," + f12(cfg.beta) + "," + f12(cr.mu) + "," + f12(cr.min_eig) + "," +
          (cr.pass ? "1" : "0") + "\n";
  if (!cr.pass) {
    std::ostringstream os;
    os << "coercivity fails: min eig of sym(Lambda) = " << cr.min_eig << " < mu = " << cr.mu;
    throw validation_error(os.str());
  }
  return o;
}

Output cmd_solve(const RunConfig& c) {
  const Setup s = setup(c);
  const double u = require_u(c);
  const LinearizedOperator op = with_flow(s.op0, s.space, u);
  const HalfSpaceSplit split = split_half_spaces(s.space, u);
  const Mat dirs = s.space.sqrt_weight().asDiagonal() * wall_parameter_directions(c.model, s.space, s.eq, u);
  HalfspaceOptions hopt;
  hopt.accommodation = c.accommodation;
  hopt.penalty = c.penalty;
  const TransportSolution sol = solve_halfspace(op, split, wall_data(c, s, u), dirs, sources(c, s), hopt);
  const DecayEstimate d = measure_decay(sol);
  Output o;
  o.doc = {{"u", r12(u)},
           {"signature", sig_json(sol.sig)},
           {"penalty", penalty_json(sol.config)},
           {"conditions", sol.conditions},
           {"condition_rank", sol.condition_rank},
           {"free_parameters", sol.free_parameters},
           {"wall_correction", r12(sol.t)},
           {"boundary_residual", r12(sol.boundary_residual)},
           {"equation_residual", r12(sol.equation_residual)},
           {"removal_residual", r12(sol.removal_residual)},
           {"undamped_residual", r12(sol.undamped_residual)},
           {"decay_rate", r12(d.modal)},
           {"decay_fit", r12(d.fit)}};
  o.csv = "x,norm_f\n";
  for (double x : x_grid(d.modal, 33)) o.csv += f12(x) + "," + f12(sol.f.value(x).norm()) + "\n";
  return o;
}

double resolve_u0(const RunConfig& c, const Setup& s) {
  const auto ds = degenerate_speeds(s.op0.kernel(), s.space.velocity.col(0)).distinct;
  if (ds.size() != 3 && (c.u0 == "minus" || c.u0 == "zero" || c.u0 == "plus"))
    throw validation_error("expected three degenerate values on this grid");
  if (c.u0 == "minus") return ds[0].first;
  if (c.u0 == "zero") return ds[1].first;
  if (c.u0 == "plus") return ds[2].first;
  try {
    return std::stod(c.u0);
  } catch (const std::exception&) {
    throw usage_error("u0 must be minus, zero, plus or a number");
  }
}

Output cmd_sweep(const RunConfig& c) {
  const Setup s = setup(c);
  Output o;
  if (c.u_range) {
    const auto& r = *c.u_range;
    const auto rows = sweep_signature(s.op0, s.space, r[0], r[1], static_cast<int>(r[2]));
    json rj = json::array(), reg = json::array();
    o.csv = "u,k_plus,k_minus,l,degenerate\n";
    for (const auto& row : rows) {
      rj.push_back({{"u", r12(row.u)}, {"k_plus", row.sig.k_plus}, {"k_minus", row.sig.k_minus},
                    {"l", row.sig.l}, {"degenerate", row.degenerate}});
      o.csv += f12(row.u) + "," + std::to_string(row.sig.k_plus) + "," +
               std::to_string(row.sig.k_minus) + "," + std::to_string(row.sig.l) + "," +
               (row.degenerate ? "1" : "0") + "\n";
    }
    for (const auto& g : compress_regimes(rows))
      reg.push_back({{"u_lo", r12(g.u_lo)}, {"u_hi", r12(g.u_hi)}, {"point", g.point},
                     {"signature", sig_json(g.sig)}});
    o.doc = {{"rows", rj}, {"regimes", reg}};
    return o;
  }
  StudyOptions so;
  so.delta = c.delta;
  so.samples_per_side = c.samples_per_side;
  so.extra_conditions = c.extra_conditions;
  const RegimeReport rep = uniform_decay_study(c.model, s.space, s.op0, resolve_u0(c, s), so);
  json samples = json::array(), deg = json::array();
  o.csv = "u,k_plus,k_minus,l,sigma_u_flag_on,sigma_u_flag_off\n";
  for (const auto& x : rep.samples) {
    samples.push_back({{"u", r12(x.u)},
                       {"signature", sig_json(x.sig)},
                       {"sigma_u_flag_off", r12(x.sigma_off)},
                       {"sigma_u_flag_on", r12(x.sigma_on)},
                       {"fit_flag_off", r12(x.fit_off)},
                       {"fit_flag_on", r12(x.fit_on)},
                       {"conditions_flag_off", x.conditions_off},
                       {"conditions_flag_on", x.conditions_on},
                       {"free_flag_off", x.free_off},
                       {"free_flag_on", x.free_on},
                       {"slowest_mode", r12(x.slowest)},
                       {"slow_mode", x.slow_mode}});
    o.csv += f12(x.u) + "," + std::to_string(x.sig.k_plus) + "," + std::to_string(x.sig.k_minus) +
             "," + std::to_string(x.sig.l) + "," + f12(x.sigma_on) + "," + f12(x.sigma_off) + "\n";
  }
  for (const auto& d : rep.degenerate) deg.push_back({{"u", r12(d.u)}, {"l", d.l}});
  o.doc = {{"u0", r12(rep.u0)},
           {"l0", rep.l0},
           {"k0_plus", rep.k0_plus},
           {"delta", r12(rep.delta)},
           {"sigma_star", r12(rep.sigma_star)},
           {"extra_conditions", rep.extra_conditions},
           {"degenerate_values", deg},
           {"samples", samples},
           {"uniform_verdict", rep.extra_conditions ? json(rep.uniform) : json(nullptr)},
           {"min_sigma_flag_on", r12(rep.min_sigma_on)},
           {"edge_sigma_flag_on", r12(rep.edge_sigma_on)},
           {"slow_mode_verdict", rep.slow_verdict},
           {"slow_ratio", r12(rep.slow_ratio)},
           {"empirical_exponent", r12(rep.empirical_exponent)},
           {"max_conditions_flag_on", rep.max_conditions_on},
           {"min_free_flag_on", rep.min_free_on}};
  return o;
}

Output cmd_validate(const RunConfig& c) {
  const Setup s = setup(c);
  const double u = require_u(c);
  const LinearizedOperator op = with_flow(s.op0, s.space, u);
  const AssumptionReport rep = validate_assumptions(op);
  Output o;
  json fails = json::array();
  for (const auto& f : rep.failures) fails.push_back(f);
  o.doc = {{"u", r12(u)},
           {"symmetry_residual", r12(rep.symmetry_residual)},
           {"min_eigenvalue", r12(rep.min_eigenvalue)},
           {"kernel_residual", r12(rep.kernel_residual)},
           {"kernel_dim", rep.kernel_dim_measured},
           {"min_abs_b", r12(rep.min_abs_b)},
           {"gamma", r12(rep.gamma)},
           {"lambda_nu", r12(rep.lambda_nu)},
           {"pass", rep.pass},
           {"failures", fails}};
  o.csv = "check,value\nmin_abs_b," + f12(rep.min_abs_b) + "\ngamma," + f12(rep.gamma) +
          "\npass," + (rep.pass ? "1" : "0") + "\n";
  return o;
}

void emit(const Output& o, const RunConfig& c, const std::string& command) {
  const std::string text = c.format == "csv" ? o.csv : o.doc.dump(2) + "\n";
  if (c.out_dir.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(c.out_dir);
  std::ofstream(std::filesystem::path(c.out_dir) / (command + "." + c.format)) << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-velocity half-space problems: speeds, signatures, penalized solves"};
  std::string command, config_path, model, u_range, out, format, u0;
  double u = 0.0;
  bool extra = false;
  app.add_option("command", command, "speeds | signature | basis | coercivity | solve | sweep | validate")
      ->required()
      ->check(CLI::IsMember({"speeds", "signature", "basis", "coercivity", "solve", "sweep", "validate"}));
  app.add_option("--config", config_path, "INI or JSON run configuration");
  app.add_option("--model", model, "model preset (replaces the model section)");
  auto* u_opt = app.add_option("--u", u, "flow speed");
  app.add_option("--u-range", u_range, "sweep range a:b:n");
  app.add_option("--u0", u0, "degenerate value for the decay study: minus | zero | plus | number");
  app.add_flag("--extra-conditions", extra, "impose the frozen extra conditions near u0");
  app.add_option("--out", out, "output directory (default: stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    KeyMap keys;
    if (!config_path.empty()) {
      const RunConfig base = load_config(config_path);
      keys = to_keys(base);
    }
    if (!model.empty()) {
      for (auto it = keys.begin(); it != keys.end();)
        it = it->first.rfind("model.", 0) == 0 ? keys.erase(it) : std::next(it);
      keys["model.preset"] = model;
      const RunConfig p = preset_config(model);
      keys["grid.energy_nodes"] = std::to_string(p.grid.energy_nodes);
    }
    if (*u_opt) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", u);
      keys["run.u"] = buf;
    }
    if (!u_range.empty()) keys["run.u_range"] = u_range;
    if (!u0.empty()) keys["run.u0"] = u0;
    if (extra) keys["run.extra_conditions"] = "true";
    if (!out.empty()) keys["output.dir"] = out;
    if (!format.empty()) keys["output.format"] = format;
    const RunConfig cfg = config_from_keys(keys);

    Output o;
    if (command == "speeds") o = cmd_speeds(cfg);
    else if (command == "signature") o = cmd_signature(cfg);
    else if (command == "basis") o = cmd_basis(cfg);
    else if (command == "coercivity") o = cmd_coercivity(cfg);
    else if (command == "solve") o = cmd_solve(cfg);
    else if (command == "sweep") o = cmd_sweep(cfg);
    else {
      o = cmd_validate(cfg);
      emit(o, cfg, command);
      if (!o.doc["pass"].get<bool>()) {
        std::string msg = "validation failed:";
        for (const auto& f : o.doc["failures"]) msg += " " + f.get<std::string>() + ";";
        throw validation_error(msg);
      }
      return 0;
    }
    emit(o, cfg, command);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::usage ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

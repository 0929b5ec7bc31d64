#include "halfspace/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace halfspace {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw usage_error("config: " + key + " expects a number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != static_cast<int>(x)) throw usage_error("config: " + key + " expects an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw usage_error("config: " + key + " expects true or false");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& p : split(v, ',')) out.push_back(to_double(key, p));
  return out;
}

Species species_like(double mass, double density) {
  Species s;
  s.mass = mass;
  s.density = density;
  return s;
}

}  // namespace

std::array<double, 3> parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw usage_error("range '" + text + "' must be a:b:n");
  std::array<double, 3> r{to_double("u_range", parts[0]), to_double("u_range", parts[1]),
                          static_cast<double>(to_int("u_range", parts[2]))};
  if (r[2] < 1) throw usage_error("range: n must be positive");
  if (r[1] < r[0]) throw usage_error("range: a must not exceed b");
  return r;
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  ModelSpec& m = c.model;
  m.dimension = 3;
  if (name == "monatomic") {
  } else if (name == "mixture" || name == "mixture3") {
    m.family = Family::monatomic_mixture;
    m.species = {species_like(1.0, 1.0), species_like(2.0, 0.5)};
    if (name == "mixture3") m.species.push_back(species_like(4.0, 0.25));
  } else if (name == "polyatomic-discrete") {
    m.family = Family::polyatomic_discrete;
    m.species[0].levels = {0.0, 1.0};
  } else if (name == "polyatomic-continuous") {
    m.family = Family::polyatomic_continuous;
    m.species[0].delta = 2.0;
  } else if (name == "polyatomic-mixture") {
    m.family = Family::polyatomic_mixture;
    m.species = {species_like(1.0, 1.0), species_like(2.0, 0.5)};
    for (auto& s : m.species) s.delta = 2.0;
  } else if (name == "fermion") {
    m.family = Family::quantum;
    m.quantum_sign = -1;
  } else if (name == "boson") {
    m.family = Family::quantum;
    m.quantum_sign = 1;
    m.cutoff_lambda = 1.0;
  } else {
    throw usage_error("unknown model preset '" + name + "'");
  }
  c.grid.dimension = m.dimension;
  c.grid.nodes = 6;
  if (m.family == Family::polyatomic_continuous || m.family == Family::polyatomic_mixture)
    c.grid.energy_nodes = 4;
  if (m.family == Family::quantum) {
    c.grid.nodes = 4;
    c.grid.energy_nodes = 6;
  }
  return c;
}

KeyMap read_ini(const std::string& text) {
  boost::property_tree::ptree pt;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw usage_error(std::string("config: ") + e.what());
  }
  KeyMap out;
  for (const auto& [section, body] : pt) {
    if (body.empty()) throw usage_error("config: key '" + section + "' outside a section");
    for (const auto& [key, val] : body) out[section + "." + key] = trim(val.data());
  }
  return out;
}

KeyMap read_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw usage_error(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw usage_error("config: top level must be an object");
  KeyMap out;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) throw usage_error("config: section '" + section + "' must be an object");
    for (const auto& [key, val] : body.items()) {
      std::string s;
      if (val.is_string()) {
        s = val.get<std::string>();
      } else if (val.is_boolean()) {
        s = val.get<bool>() ? "true" : "false";
      } else if (val.is_number()) {
        s = num(val.get<double>());
      } else if (val.is_array()) {
        for (size_t i = 0; i < val.size(); ++i) {
          if (!val[i].is_number()) throw usage_error("config: " + section + "." + key + " must hold numbers");
          s += (i ? "," : "") + num(val[i].get<double>());
        }
      } else if (val.is_null()) {
        continue;
      } else {
        throw usage_error("config: unsupported value for " + section + "." + key);
      }
      out[section + "." + key] = s;
    }
  }
  return out;
}

RunConfig config_from_keys(const KeyMap& keys) {
  static const std::set<std::string> known = {
      "model.preset", "model.family", "model.dimension", "model.temperature",
      "model.quantum_sign", "model.cutoff_lambda", "model.masses", "model.densities",
      "model.levels", "model.level_weights", "model.delta",
      "grid.nodes", "grid.extent", "grid.energy_nodes", "grid.center",
      "boundary.type", "boundary.coefficient",
      "penalty.eps1", "penalty.eps2",
      "run.u", "run.u_range", "run.u0", "run.delta", "run.samples_per_side",
      "run.extra_conditions", "run.wall_temperature", "run.wall_density", "run.wall_velocity",
      "run.sources",
      "output.dir", "output.format"};
  for (const auto& [k, v] : keys)
    if (!known.count(k)) throw usage_error("config: unknown key '" + k + "'");
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = keys.find(k);
    return it == keys.end() ? nullptr : &it->second;
  };

  RunConfig c = preset_config(get("model.preset") ? *get("model.preset") : "monatomic");
  ModelSpec& m = c.model;
  if (auto v = get("model.family")) m.family = parse_family(*v);
  if (auto v = get("model.dimension")) m.dimension = to_int("model.dimension", *v);
  if (auto v = get("model.temperature")) m.temperature = to_double("model.temperature", *v);
  if (auto v = get("model.quantum_sign")) m.quantum_sign = to_int("model.quantum_sign", *v);
  if (auto v = get("model.cutoff_lambda")) m.cutoff_lambda = to_double("model.cutoff_lambda", *v);
  if (auto v = get("model.masses")) {
    const auto ms = to_list("model.masses", *v);
    if (ms.empty()) throw usage_error("config: model.masses is empty");
    m.species.resize(ms.size(), m.species.back());
    for (size_t i = 0; i < ms.size(); ++i) m.species[i].mass = ms[i];
  }
  if (auto v = get("model.densities")) {
    const auto ds = to_list("model.densities", *v);
    if (ds.size() != m.species.size())
      throw usage_error("config: model.densities must list one value per species");
    for (size_t i = 0; i < ds.size(); ++i) m.species[i].density = ds[i];
  }
  if (auto v = get("model.levels"))
    for (auto& s : m.species) s.levels = to_list("model.levels", *v);
  if (auto v = get("model.level_weights"))
    for (auto& s : m.species) s.level_weights = to_list("model.level_weights", *v);
  if (auto v = get("model.delta"))
    for (auto& s : m.species) s.delta = to_double("model.delta", *v);
  m.validate();

  c.grid.dimension = m.dimension;
  if (auto v = get("grid.nodes")) c.grid.nodes = to_int("grid.nodes", *v);
  if (auto v = get("grid.extent")) c.grid.extent = to_double("grid.extent", *v);
  if (auto v = get("grid.energy_nodes")) c.grid.energy_nodes = to_int("grid.energy_nodes", *v);
  if (auto v = get("grid.center")) c.grid.center = to_double("grid.center", *v);
  if (c.grid.nodes < 1) throw usage_error("config: grid.nodes must be positive");

  if (auto v = get("boundary.type")) c.boundary = *v;
  if (c.boundary != "absorb" && c.boundary != "accommodate")
    throw usage_error("config: boundary.type must be absorb or accommodate");
  if (auto v = get("boundary.coefficient")) c.accommodation = to_double("boundary.coefficient", *v);
  if (c.boundary == "absorb") c.accommodation = 0.0;

  if (auto v = get("penalty.eps1")) c.penalty.eps1 = to_double("penalty.eps1", *v);
  if (auto v = get("penalty.eps2")) c.penalty.eps2 = to_double("penalty.eps2", *v);

  if (auto v = get("run.u")) c.u = to_double("run.u", *v);
  if (auto v = get("run.u_range")) c.u_range = parse_range(*v);
  if (auto v = get("run.u0")) c.u0 = *v;
  if (auto v = get("run.delta")) c.delta = to_double("run.delta", *v);
  if (auto v = get("run.samples_per_side")) c.samples_per_side = to_int("run.samples_per_side", *v);
  if (auto v = get("run.extra_conditions")) c.extra_conditions = to_bool("run.extra_conditions", *v);
  if (auto v = get("run.wall_temperature")) c.wall.temperature = to_double("run.wall_temperature", *v);
  if (auto v = get("run.wall_density")) c.wall.density = to_double("run.wall_density", *v);
  if (auto v = get("run.wall_velocity")) c.wall.velocity = to_double("run.wall_velocity", *v);
  if (auto v = get("run.sources")) {
    for (const auto& item : split(*v, ',')) {
      if (item.empty()) continue;
      const auto p = split(item, ':');
      if (p.size() != 2) throw usage_error("config: run.sources entries are rate:amplitude");
      c.sources.push_back({to_double("run.sources", p[0]), to_double("run.sources", p[1])});
    }
  }
  if (auto v = get("output.dir")) c.out_dir = *v;
  if (auto v = get("output.format")) c.format = *v;
  if (c.format != "json" && c.format != "csv")
    throw usage_error("config: output.format must be csv or json");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  return config_from_keys(json ? read_json(ss.str()) : read_ini(ss.str()));
}

KeyMap to_keys(const RunConfig& c) {
  KeyMap k;
  const ModelSpec& m = c.model;
  k["model.preset"] = c.preset;
  k["model.family"] = family_name(m.family);
  k["model.dimension"] = num(m.dimension);
  k["model.temperature"] = num(m.temperature);
  k["model.quantum_sign"] = num(m.quantum_sign);
  k["model.cutoff_lambda"] = num(m.cutoff_lambda);
  std::vector<double> ms, ds;
  for (const auto& s : m.species) {
    ms.push_back(s.mass);
    ds.push_back(s.density);
  }
  k["model.masses"] = join(ms);
  k["model.densities"] = join(ds);
  k["model.levels"] = join(m.species[0].levels);
  k["model.level_weights"] = join(m.species[0].level_weights);
  k["model.delta"] = num(m.species[0].delta);
  k["grid.nodes"] = num(c.grid.nodes);
  k["grid.extent"] = num(c.grid.extent);
  k["grid.energy_nodes"] = num(c.grid.energy_nodes);
  k["grid.center"] = num(c.grid.center);
  k["boundary.type"] = c.boundary;
  k["boundary.coefficient"] = num(c.accommodation);
  k["penalty.eps1"] = num(c.penalty.eps1);
  k["penalty.eps2"] = num(c.penalty.eps2);
  if (c.u) k["run.u"] = num(*c.u);
  if (c.u_range)
    k["run.u_range"] = num((*c.u_range)[0]) + ":" + num((*c.u_range)[1]) + ":" + num((*c.u_range)[2]);
  k["run.u0"] = c.u0;
  k["run.delta"] = num(c.delta);
  k["run.samples_per_side"] = num(c.samples_per_side);
  k["run.extra_conditions"] = c.extra_conditions ? "true" : "false";
  k["run.wall_temperature"] = num(c.wall.temperature);
  k["run.wall_density"] = num(c.wall.density);
  k["run.wall_velocity"] = num(c.wall.velocity);
  std::string src;
  for (size_t i = 0; i < c.sources.size(); ++i)
    src += (i ? "," : "") + num(c.sources[i].rate) + ":" + num(c.sources[i].amplitude);
  k["run.sources"] = src;
  k["output.dir"] = c.out_dir;
  k["output.format"] = c.format;
  return k;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, val] : to_keys(c)) {
    const auto dot = key.find('.');
    j[key.substr(0, dot)][key.substr(dot + 1)] = val;
  }
  return j;
}

std::string normalized(const RunConfig& c) { return to_json(c).dump(2); }

}  // namespace halfspace

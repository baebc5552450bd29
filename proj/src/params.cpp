#include "thermofrac/params.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace thermofrac {

ConfigError::ConfigError(std::string key, int line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", key '" + key + "': " + what),
      key_(std::move(key)),
      line_(line) {}

ElasticConstants derive_lame(double youngs_modulus, double poisson_ratio) {
  if (!(youngs_modulus > 0.0)) {
    throw DomainError("Young's modulus must be positive");
  }
  if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5)) {
    throw DomainError("Poisson ratio must lie in [0, 0.5)");
  }
  const double nu = poisson_ratio;
  ElasticConstants c;
  c.mu = youngs_modulus / (2.0 * (1.0 + nu));
  c.lambda = youngs_modulus * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  c.bulk = (2.0 / kSpatialDim) * c.mu + c.lambda;
  return c;
}

void MaterialParams::validate() const {
  (void)derive_lame(youngs_modulus, poisson_ratio);
  if (!(fracture_toughness > 0.0)) throw DomainError("G_c must be positive");
  if (!(thermal_diffusivity > 0.0)) throw DomainError("kappa_theta must be positive");
  if (!std::isfinite(thermal_expansion)) throw DomainError("beta must be finite");
}

double ModelParams::active_set_constant(double fracture_toughness) const {
  return active_set_c > 0.0 ? active_set_c : 100.0 * fracture_toughness / eps;
}

void ModelParams::validate(double domain_size) const {
  if (!(kappa_reg > 0.0 && kappa_reg < 1.0)) throw DomainError("kappa_reg must lie in (0, 1)");
  if (!(tol_phi > 0.0 && tol_phi < 1.0)) throw DomainError("tol_phi must lie in (0, 1)");
  if (!(tol_newton > 0.0)) throw DomainError("tol_newton must be positive");
  if (!(gamma_T > 0.0)) throw DomainError("gamma_T must be positive");
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  if (n_steps < 0) throw DomainError("n_steps must be non-negative");
  if (initial_level < 0 || max_level < initial_level || max_level > 20) {
    throw DomainError("levels must satisfy 0 <= initial_level <= max_level <= 20");
  }
  if (max_newton < 1) throw DomainError("max_newton must be at least 1");
  const double h_min = domain_size / static_cast<double>(1 << max_level);
  if (!(eps > h_min)) throw DomainError("eps must exceed the finest mesh size");
}

double ScenarioLoads::pressure(double t, double dt) const {
  if (ramp_alpha > 0.0) {
    return ramp_alpha * (t / dt + 1.0) * p_bar;
  }
  return p_bar;
}

void ScenarioLoads::validate() const {
  if (lambda_theta_mode == ThermalMode::constant && !(lambda_theta_const >= 0.0)) {
    throw DomainError("lambda_theta_const must be non-negative");
  }
  if (ramp_alpha < 0.0) throw DomainError("ramp_alpha must be non-negative");
  if (p_bar < p0) throw DomainError("effective pressure p - p0 must be non-negative");
  if (lambda_theta_mode != ThermalMode::off && theta > theta0) {
    throw DomainError("thermal scenarios require theta <= theta0");
  }
}

void Geometry::validate() const {
  if (!(a > 0.0)) throw DomainError("geometry.a must be positive");
  if (!(l0 > 0.0 && l0 < a)) throw DomainError("crack half length must lie in (0, a)");
}

void Config::validate() const {
  material.validate();
  geometry.validate();
  model.validate(geometry.domain_size());
  loads.validate();
  if (!(solver.gmres_tol > 0.0) || solver.gmres_restart < 1 || solver.gmres_max_iter < 1) {
    throw DomainError("invalid GMRES settings");
  }
}

std::string_view to_string(SplitMode m) { return m == SplitMode::none ? "none" : "voldev"; }

std::string_view to_string(ThermalMode m) {
  switch (m) {
    case ThermalMode::off: return "off";
    case ThermalMode::constant: return "constant";
    case ThermalMode::hagoort: return "hagoort";
  }
  return "off";
}

std::string_view to_string(PreconditionerKind k) {
  switch (k) {
    case PreconditionerKind::ilu0: return "ilu0";
    case PreconditionerKind::direct: return "direct";
    case PreconditionerKind::jacobi: return "jacobi";
  }
  return "ilu0";
}

std::string_view to_string(LinearStrategy s) {
  return s == LinearStrategy::full_block ? "full_block" : "triangular";
}

namespace {

double finest_h(const Config& c) {
  return c.geometry.domain_size() / static_cast<double>(1 << c.model.max_level);
}

}  // namespace

Config scenario_preset(std::string_view name) {
  Config c;
  c.scenario = std::string(name);
  // Desk-scale mesh: five uniform levels, four local levels around the crack,
  // eps = 2 h_min.
  c.model.initial_level = 5;
  c.model.max_level = 9;
  c.model.eps = 2.0 * finest_h(c);

  if (name == "case_a") {
    c.loads.p_bar = 1.0;
    c.loads.p0 = 0.0;
    c.loads.lambda_theta_mode = ThermalMode::off;
    c.model.dt = 1.0;
    c.model.n_steps = 5;
  } else if (name == "case_b") {
    c.loads.p_bar = 1.0;
    c.loads.p0 = 0.0;
    c.loads.lambda_theta_mode = ThermalMode::constant;
    c.loads.lambda_theta_const = 1.0e-4;
    c.model.dt = 1.0;
    c.model.n_steps = 25;
  } else if (name == "case_c") {
    c.loads.p_bar = 15834.0e3;
    c.loads.p0 = 12130.0e3;
    c.loads.lambda_theta_mode = ThermalMode::hagoort;
    c.model.dt = 86400.0;
    c.model.n_steps = 365;
  } else if (name == "case_d") {
    c.material.fracture_toughness = 5.5e5;
    c.loads.p_bar = 15834.0e3;
    c.loads.p0 = 12130.0e3;
    c.loads.theta0 = 300.0;
    c.loads.theta = 80.0;
    c.loads.lambda_theta_mode = ThermalMode::hagoort;
    c.model.dt = 86400.0;
    c.model.n_steps = 160;
  } else if (name == "case_e") {
    c.loads.p_bar = 1.5834e7;
    c.loads.p0 = 12130.0e3;
    c.loads.ramp_alpha = 0.5;
    c.loads.lambda_theta_mode = ThermalMode::hagoort;
    c.model.dt = 60.0;
    c.model.n_steps = 270;
  } else {
    throw DomainError("unknown scenario '" + std::string(name) + "'");
  }
  return c;
}

namespace {

struct KeyHandler {
  std::string_view key;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> get;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view v) {
  double x = 0.0;
  const auto* first = v.data();
  const auto* last = v.data() + v.size();
  if (!v.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
    throw std::invalid_argument("not a finite number: '" + std::string(v) + "'");
  }
  return x;
}

int parse_int(std::string_view v) {
  int x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw std::invalid_argument("not an integer: '" + std::string(v) + "'");
  }
  return x;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view v, const std::array<Enum, N>& values) {
  for (Enum e : values) {
    if (to_string(e) == v) return e;
  }
  throw std::invalid_argument("unrecognised value '" + std::string(v) + "'");
}

#define TF_DOUBLE(name, field)                                                 \
  KeyHandler {                                                                 \
    name, [](Config& c, std::string_view v) { c.field = parse_double(v); },   \
        [](const Config& c) { return fmt_double(c.field); }                    \
  }
#define TF_INT(name, field)                                                    \
  KeyHandler {                                                                 \
    name, [](Config& c, std::string_view v) { c.field = parse_int(v); },      \
        [](const Config& c) { return std::to_string(c.field); }                \
  }
#define TF_ENUM(name, field, ...)                                              \
  KeyHandler {                                                                 \
    name,                                                                      \
        [](Config& c, std::string_view v) {                                    \
          c.field = parse_enum(v, std::array{__VA_ARGS__});                    \
        },                                                                     \
        [](const Config& c) { return std::string(to_string(c.field)); }        \
  }

const std::vector<KeyHandler>& key_table() {
  static const std::vector<KeyHandler> table = {
      TF_DOUBLE("material.E", material.youngs_modulus),
      TF_DOUBLE("material.nu", material.poisson_ratio),
      TF_DOUBLE("material.Gc", material.fracture_toughness),
      TF_DOUBLE("material.beta", material.thermal_expansion),
      TF_DOUBLE("material.kappa_theta", material.thermal_diffusivity),
      TF_DOUBLE("material.alpha_B", material.biot_alpha),
      TF_DOUBLE("material.alpha_theta", material.skeleton_thermal_alpha),
      TF_DOUBLE("model.eps", model.eps),
      TF_DOUBLE("model.kappa_reg", model.kappa_reg),
      TF_DOUBLE("model.tol_phi", model.tol_phi),
      TF_DOUBLE("model.tol_newton", model.tol_newton),
      TF_DOUBLE("model.active_set_c", model.active_set_c),
      TF_DOUBLE("model.dt", model.dt),
      TF_INT("model.n_steps", model.n_steps),
      TF_DOUBLE("model.gamma_T", model.gamma_T),
      TF_ENUM("model.split", model.split, SplitMode::none, SplitMode::voldev),
      TF_INT("model.max_level", model.max_level),
      TF_INT("model.initial_level", model.initial_level),
      TF_INT("model.max_newton", model.max_newton),
      TF_ENUM("solver.preconditioner", solver.preconditioner, PreconditionerKind::ilu0,
              PreconditionerKind::direct, PreconditionerKind::jacobi),
      TF_ENUM("solver.strategy", solver.strategy, LinearStrategy::full_block,
              LinearStrategy::triangular),
      TF_DOUBLE("solver.gmres_tol", solver.gmres_tol),
      TF_INT("solver.gmres_restart", solver.gmres_restart),
      TF_INT("solver.gmres_max_iter", solver.gmres_max_iter),
      TF_DOUBLE("loads.p_bar", loads.p_bar),
      TF_DOUBLE("loads.p0", loads.p0),
      TF_DOUBLE("loads.theta", loads.theta),
      TF_DOUBLE("loads.theta0", loads.theta0),
      TF_ENUM("loads.lambda_theta_mode", loads.lambda_theta_mode, ThermalMode::off,
              ThermalMode::constant, ThermalMode::hagoort),
      TF_DOUBLE("loads.lambda_theta_const", loads.lambda_theta_const),
      TF_DOUBLE("loads.ramp_alpha", loads.ramp_alpha),
      TF_DOUBLE("geometry.a", geometry.a),
      TF_DOUBLE("geometry.l0", geometry.l0),
  };
  return table;
}

#undef TF_DOUBLE
#undef TF_INT
#undef TF_ENUM

struct Entry {
  std::string key;
  std::string value;
  int line;
};

}  // namespace

Config parse_config(std::string_view text) {
  std::vector<Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line, line_no, "expected 'key = value'");
    }
    Entry e{trim(std::string_view(line).substr(0, eq)),
            trim(std::string_view(line).substr(eq + 1)), line_no};
    if (e.key.empty()) throw ConfigError(e.key, line_no, "empty key");
    if (e.value.empty()) throw ConfigError(e.key, line_no, "missing value");
    entries.push_back(std::move(e));
  }

  // The scenario preset is the base layer; every other key overrides it
  // regardless of where the scenario line appears.
  Config cfg = scenario_preset("case_a");
  int scenario_line = 0;
  for (const auto& e : entries) {
    if (e.key != "scenario") continue;
    try {
      cfg = scenario_preset(e.value);
    } catch (const DomainError& err) {
      throw ConfigError(e.key, e.line, err.what());
    }
    scenario_line = e.line;
  }

  for (const auto& e : entries) {
    if (e.key == "scenario") continue;
    const auto& table = key_table();
    auto it = std::find_if(table.begin(), table.end(),
                           [&](const KeyHandler& h) { return h.key == e.key; });
    if (it == table.end()) throw ConfigError(e.key, e.line, "unknown key");
    try {
      it->set(cfg, e.value);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(e.key, e.line, err.what());
    }
  }

  // Attribute an invariant violation to the last line that set a key of the
  // offending group, falling back to the scenario line.
  try {
    cfg.validate();
  } catch (const DomainError& err) {
    std::string key = "scenario";
    int line = scenario_line;
    const std::string msg = err.what();
    for (const auto& e : entries) {
      const auto dot = e.key.find('.');
      const std::string leaf = dot == std::string::npos ? e.key : e.key.substr(dot + 1);
      if (msg.find(leaf) != std::string::npos ||
          (leaf == "nu" && msg.find("Poisson") != std::string::npos) ||
          (leaf == "E" && msg.find("Young") != std::string::npos) ||
          (leaf == "Gc" && msg.find("G_c") != std::string::npos)) {
        key = e.key;
        line = e.line;
      }
    }
    throw ConfigError(key, line, msg);
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", 0, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_config_text(const Config& cfg) {
  std::ostringstream out;
  out << "# thermofrac configuration\n";
  out << "scenario = " << cfg.scenario << "\n";
  for (const auto& h : key_table()) {
    out << h.key << " = " << h.get(cfg) << "\n";
  }
  return out.str();
}

}  // namespace thermofrac

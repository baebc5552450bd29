#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace thermofrac {

/// Raised for values outside a parameter's physical domain (e.g. nu >= 0.5).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised by the configuration parser. Carries the offending key and line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, int line, const std::string& what);
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

inline constexpr int kSpatialDim = 2;
inline constexpr double kPi = 3.14159265358979323846;

struct ElasticConstants {
  double mu = 0.0;
  double lambda = 0.0;
  double bulk = 0.0;  // K_d = (2/d) mu + lambda
};

/// Plane-strain Lame constants and the d = 2 bulk modulus.
ElasticConstants derive_lame(double youngs_modulus, double poisson_ratio);

struct MaterialParams {
  double youngs_modulus = 1.5e10;       // Pa
  double poisson_ratio = 0.15;
  double fracture_toughness = 1.0e10;   // G_c, N/m
  double thermal_expansion = 1.0e-5;    // beta, 1/degC
  double thermal_diffusivity = 1.0e-6;  // kappa_Theta, m^2/s
  double biot_alpha = 0.0;
  double skeleton_thermal_alpha = 0.0;  // alpha_Theta, 1/degC

  ElasticConstants elastic() const { return derive_lame(youngs_modulus, poisson_ratio); }
  void validate() const;

  bool operator==(const MaterialParams&) const = default;
};

enum class SplitMode { none, voldev };
enum class ThermalMode { off, constant, hagoort };
enum class PreconditionerKind { ilu0, direct, jacobi };
enum class LinearStrategy { full_block, triangular };

struct ModelParams {
  double eps = 0.78125;  // phase-field regularization length, m
  double kappa_reg = 1.0e-10;
  double tol_phi = 0.9;
  double tol_newton = 1.0e-10;
  double active_set_c = 0.0;  // <= 0 selects 100 * G_c / eps
  double dt = 1.0;            // s
  int n_steps = 5;
  double gamma_T = 2.0 / kPi;
  SplitMode split = SplitMode::voldev;
  int max_level = 9;
  int initial_level = 5;
  int max_newton = 50;

  double active_set_constant(double fracture_toughness) const;
  void validate(double domain_size) const;

  bool operator==(const ModelParams&) const = default;
};

struct SolverParams {
  PreconditionerKind preconditioner = PreconditionerKind::ilu0;
  LinearStrategy strategy = LinearStrategy::full_block;
  double gmres_tol = 1.0e-8;
  int gmres_restart = 100;
  int gmres_max_iter = 2000;

  bool operator==(const SolverParams&) const = default;
};

struct ScenarioLoads {
  double p_bar = 1.0;  // Pa
  double p0 = 0.0;     // Pa
  double theta = 70.0;   // degC
  double theta0 = 100.0; // degC
  ThermalMode lambda_theta_mode = ThermalMode::off;
  double lambda_theta_const = 0.0;
  double ramp_alpha = 0.0;  // > 0 selects p(t) = alpha (t/dt + 1) p_bar

  /// Fluid pressure at simulation time t, with n = t / dt the step number.
  double pressure(double t, double dt) const;
  void validate() const;

  bool operator==(const ScenarioLoads&) const = default;
};

struct Geometry {
  double a = 100.0;   // half domain width, domain is (0, 2a)^2
  double l0 = 10.0;   // crack half length; crack on y = a, centred at x = a

  double domain_size() const { return 2.0 * a; }
  void validate() const;

  bool operator==(const Geometry&) const = default;
};

struct Config {
  std::string scenario = "case_a";
  MaterialParams material;
  ModelParams model;
  SolverParams solver;
  ScenarioLoads loads;
  Geometry geometry;

  void validate() const;

  bool operator==(const Config&) const = default;
};

/// Parameter set of one of the shipped scenarios `case_a` ... `case_e`.
Config scenario_preset(std::string_view name);

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Emits a configuration document that parses back to exactly `cfg`.
std::string to_config_text(const Config& cfg);

std::string_view to_string(SplitMode);
std::string_view to_string(ThermalMode);
std::string_view to_string(PreconditionerKind);
std::string_view to_string(LinearStrategy);

}  // namespace thermofrac

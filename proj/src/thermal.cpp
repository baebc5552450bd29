#include "thermofrac/thermal.hpp"

#include <cmath>

namespace thermofrac {

double lambda_theta(double t, double thermal_diffusivity, double l0, double gamma_T) {
  if (t < 0.0) throw DomainError("lambda_theta: negative time");
  if (!(thermal_diffusivity > 0.0) || !(l0 > 0.0)) {
    throw DomainError("lambda_theta: diffusivity and l0 must be positive");
  }
  return std::asinh(gamma_T / (0.5 * l0) * std::sqrt(kPi * thermal_diffusivity * t));
}

double c_theta(double lambda, double youngs_modulus, double thermal_expansion,
               double poisson_ratio) {
  if (lambda < 0.0) throw DomainError("c_theta: negative decline constant");
  if (poisson_ratio == 1.0) throw DomainError("c_theta: nu = 1");
  const double a_theta = youngs_modulus * thermal_expansion / (1.0 - poisson_ratio);
  return a_theta * lambda / (2.0 * lambda + 1.0);
}

ThermalCoupling thermal_coupling(double t, const Config& cfg) {
  const auto& m = cfg.material;
  ThermalCoupling out;
  out.a_theta = m.youngs_modulus * m.thermal_expansion / (1.0 - m.poisson_ratio);
  switch (cfg.loads.lambda_theta_mode) {
    case ThermalMode::off:
      return out;
    case ThermalMode::constant:
      out.lambda_theta = cfg.loads.lambda_theta_const;
      break;
    case ThermalMode::hagoort:
      out.lambda_theta =
          lambda_theta(t, m.thermal_diffusivity, cfg.geometry.l0, cfg.model.gamma_T);
      break;
  }
  out.c_theta =
      c_theta(out.lambda_theta, m.youngs_modulus, m.thermal_expansion, m.poisson_ratio);
  return out;
}

}  // namespace thermofrac

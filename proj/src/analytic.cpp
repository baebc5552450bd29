#include "thermofrac/analytic.hpp"

#include <cmath>

#include "thermofrac/thermal.hpp"

namespace thermofrac {

namespace {

void check_elastic(double youngs_modulus, double poisson_ratio, double l0) {
  if (!(youngs_modulus > 0.0)) throw DomainError("analytic: Young's modulus must be positive");
  if (!(poisson_ratio > -1.0 && poisson_ratio < 0.5)) {
    throw DomainError("analytic: Poisson ratio must lie in (-1, 0.5)");
  }
  if (!(l0 > 0.0)) throw DomainError("analytic: crack half length must be positive");
}

}  // namespace

double effective_load(double p, double p0, double c_theta, double theta, double theta0) {
  return p - p0 - c_theta * (theta - theta0);
}

double cod_analytic_2d(double x, double l0, double youngs_modulus, double poisson_ratio,
                       double load) {
  check_elastic(youngs_modulus, poisson_ratio, l0);
  const double rho = x / l0;
  if (std::abs(rho) >= 1.0) return 0.0;
  const double nu = poisson_ratio;
  return 2.0 * (1.0 - nu * nu) * l0 / youngs_modulus * std::sqrt(1.0 - rho * rho) * load;
}

double cod_analytic_3d(double r, double l0, double youngs_modulus, double poisson_ratio,
                       double load) {
  return 2.0 / kPi * cod_analytic_2d(r, l0, youngs_modulus, poisson_ratio, load);
}

std::vector<WidthSample> max_width_series(const Config& cfg, bool three_dimensional) {
  cfg.validate();
  const auto& m = cfg.material;
  const auto& l = cfg.loads;
  std::vector<WidthSample> out;
  out.reserve(cfg.model.n_steps + 1);
  for (int k = 0; k <= cfg.model.n_steps; ++k) {
    WidthSample s;
    s.time = k * cfg.model.dt;
    s.pressure = l.pressure(s.time, cfg.model.dt);
    s.c_theta = thermal_coupling(s.time, cfg).c_theta;
    const double load = effective_load(s.pressure, l.p0, s.c_theta, l.theta, l.theta0);
    s.max_width = three_dimensional
                      ? cod_analytic_3d(0.0, cfg.geometry.l0, m.youngs_modulus, m.poisson_ratio, load)
                      : cod_analytic_2d(0.0, cfg.geometry.l0, m.youngs_modulus, m.poisson_ratio, load);
    out.push_back(s);
  }
  return out;
}

}  // namespace thermofrac

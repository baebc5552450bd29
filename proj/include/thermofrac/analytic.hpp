#pragma once

#include <vector>

#include "thermofrac/params.hpp"

namespace thermofrac {

/// Effective opening load p - p0 - C_Theta (Theta - Theta0).
double effective_load(double p, double p0, double c_theta, double theta, double theta0);

/// Plane-strain opening of a pressurised line crack of half length l0 at
/// distance x from its centre. Zero outside the crack.
double cod_analytic_2d(double x, double l0, double youngs_modulus, double poisson_ratio,
                       double load);

/// Opening of a penny-shaped crack of radius l0 at radial distance r.
double cod_analytic_3d(double r, double l0, double youngs_modulus, double poisson_ratio,
                       double load);

struct WidthSample {
  double time = 0.0;     // s
  double pressure = 0.0; // Pa
  double c_theta = 0.0;  // Pa/degC
  double max_width = 0.0;
};

/// Maximum analytic width at the centre of the crack at t = k dt for
/// k = 0 .. n_steps, using the scenario's pressure and thermal laws.
std::vector<WidthSample> max_width_series(const Config& cfg, bool three_dimensional);

}  // namespace thermofrac

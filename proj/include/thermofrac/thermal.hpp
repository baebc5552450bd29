#pragma once

#include "thermofrac/params.hpp"

namespace thermofrac {

/// Closed-form thermal back-stress coupling at the fracture faces.
struct ThermalCoupling {
  double lambda_theta = 0.0;  // temperature decline constant
  double c_theta = 0.0;       // Pa/degC
  double a_theta = 0.0;       // E beta / (1 - nu), Pa/degC
};

/// Temperature decline constant asinh(gamma_T / (0.5 l0) * sqrt(pi kappa t)).
double lambda_theta(double t, double thermal_diffusivity, double l0, double gamma_T);

/// C_Theta = A_Theta lambda / (2 lambda + 1) with A_Theta = E beta / (1 - nu).
double c_theta(double lambda, double youngs_modulus, double thermal_expansion,
               double poisson_ratio);

/// Coupling at simulation time t under the scenario's thermal mode.
ThermalCoupling thermal_coupling(double t, const Config& cfg);

}  // namespace thermofrac

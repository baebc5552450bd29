#pragma once

#include <array>

#include "thermofrac/params.hpp"

namespace thermofrac {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
};

/// Symmetric 2x2 tensor stored as (xx, yy, xy).
struct Sym2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  static constexpr Sym2 identity() { return {1.0, 1.0, 0.0}; }
  double trace() const { return xx + yy; }

  friend Sym2 operator+(const Sym2& a, const Sym2& b) {
    return {a.xx + b.xx, a.yy + b.yy, a.xy + b.xy};
  }
  friend Sym2 operator-(const Sym2& a, const Sym2& b) {
    return {a.xx - b.xx, a.yy - b.yy, a.xy - b.xy};
  }
  friend Sym2 operator*(double s, const Sym2& a) { return {s * a.xx, s * a.yy, s * a.xy}; }
  /// Full contraction a : b.
  friend double ddot(const Sym2& a, const Sym2& b) {
    return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
  }
};

using Strain2 = Sym2;
using Stress2 = Sym2;

/// Fourth-order tangent in Voigt form [xx, yy, xy] acting on engineering
/// shear strain (2 eps_xy), so that sigma_voigt = C * eps_voigt.
using Tangent = std::array<std::array<double, 3>, 3>;

std::array<double, 3> to_voigt(const Strain2& e);  // {xx, yy, 2 xy}
Stress2 apply(const Tangent& c, const Strain2& e);

struct VolDevStrain {
  Strain2 vol;
  Strain2 dev;
};

/// Volumetric/deviatoric decomposition with the 1/d projector, d = 2.
VolDevStrain split_strain(const Strain2& e);

/// 1 for strictly positive trace, 0 otherwise.
inline int heaviside_plus(double trace) { return trace > 0.0 ? 1 : 0; }

struct SplitEnergies {
  double psi_plus = 0.0;
  double psi_minus = 0.0;
  double psi_total = 0.0;
};

SplitEnergies split_energy(const Strain2& e, const ElasticConstants& c,
                           SplitMode mode = SplitMode::voldev);

struct SplitStresses {
  Stress2 sigma_plus;
  Stress2 sigma_minus;
  Tangent tangent_plus{};
  Tangent tangent_minus{};
};

SplitStresses split_stress(const Strain2& e, const ElasticConstants& c,
                           SplitMode mode = SplitMode::voldev);

/// Undegraded isotropic stress 2 mu eps + lambda tr(eps) I.
Stress2 isotropic_stress(const Strain2& e, const ElasticConstants& c);

/// g(phi) = (1 - kappa) phi^2 + kappa.
inline double degradation(double phi, double kappa_reg) {
  return (1.0 - kappa_reg) * phi * phi + kappa_reg;
}

/// gamma_eps = (1 - phi)^2 / (2 eps) + eps |grad phi|^2 / 2.
double crack_density(double phi, Vec2 grad_phi, double eps);

/// Pointwise inputs of the crack driving force.
struct DrivingForceInput {
  Strain2 strain;
  double phi = 1.0;
  double dp = 0.0;      // p - p0
  double dtheta = 0.0;  // Theta - Theta0
  double c_theta = 0.0;
  Vec2 u;
  Vec2 grad_dp;
  Vec2 grad_dtheta;
  double biot_alpha = 0.0;
  double thermal_alpha = 0.0;
  double kappa_reg = 1.0e-10;
  ElasticConstants elastic;
};

/// Crack driving force beta_phi (diagnostic field, not used in assembly).
double driving_force(const DrivingForceInput& in);

}  // namespace thermofrac

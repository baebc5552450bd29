#include "thermofrac/physics.hpp"

#include <algorithm>

namespace thermofrac {

std::array<double, 3> to_voigt(const Strain2& e) { return {e.xx, e.yy, 2.0 * e.xy}; }

Stress2 apply(const Tangent& c, const Strain2& e) {
  const auto v = to_voigt(e);
  Stress2 s;
  s.xx = c[0][0] * v[0] + c[0][1] * v[1] + c[0][2] * v[2];
  s.yy = c[1][0] * v[0] + c[1][1] * v[1] + c[1][2] * v[2];
  s.xy = c[2][0] * v[0] + c[2][1] * v[1] + c[2][2] * v[2];
  return s;
}

VolDevStrain split_strain(const Strain2& e) {
  const double m = e.trace() / kSpatialDim;
  VolDevStrain out;
  out.vol = {m, m, 0.0};
  out.dev = {e.xx - m, e.yy - m, e.xy};
  return out;
}

Stress2 isotropic_stress(const Strain2& e, const ElasticConstants& c) {
  const double lt = c.lambda * e.trace();
  return {2.0 * c.mu * e.xx + lt, 2.0 * c.mu * e.yy + lt, 2.0 * c.mu * e.xy};
}

SplitEnergies split_energy(const Strain2& e, const ElasticConstants& c, SplitMode mode) {
  SplitEnergies out;
  if (mode == SplitMode::none) {
    const double tr = e.trace();
    out.psi_plus = c.mu * ddot(e, e) + 0.5 * c.lambda * tr * tr;
    out.psi_total = out.psi_plus;
    return out;
  }
  const double tr = e.trace();
  const auto parts = split_strain(e);
  const double psi_vol = 0.5 * c.bulk * tr * tr;
  const double psi_dev = c.mu * ddot(parts.dev, parts.dev);
  const int h = heaviside_plus(tr);
  out.psi_plus = h * psi_vol + psi_dev;
  out.psi_minus = (1 - h) * psi_vol;
  out.psi_total = out.psi_plus + out.psi_minus;
  return out;
}

namespace {

// 2 mu times the deviatoric projector, Voigt form with engineering shear.
Tangent deviatoric_tangent(double mu) {
  return {{{mu, -mu, 0.0}, {-mu, mu, 0.0}, {0.0, 0.0, mu}}};
}

Tangent volumetric_tangent(double k) { return {{{k, k, 0.0}, {k, k, 0.0}, {0.0, 0.0, 0.0}}}; }

}  // namespace

SplitStresses split_stress(const Strain2& e, const ElasticConstants& c, SplitMode mode) {
  SplitStresses out;
  if (mode == SplitMode::none) {
    out.sigma_plus = isotropic_stress(e, c);
    const double l2 = c.lambda + 2.0 * c.mu;
    out.tangent_plus = {{{l2, c.lambda, 0.0}, {c.lambda, l2, 0.0}, {0.0, 0.0, c.mu}}};
    return out;
  }
  const double tr = e.trace();
  const int h = heaviside_plus(tr);
  const auto parts = split_strain(e);
  const double kt = c.bulk * tr;
  out.sigma_plus = {h * kt + 2.0 * c.mu * parts.dev.xx, h * kt + 2.0 * c.mu * parts.dev.yy,
                    2.0 * c.mu * parts.dev.xy};
  out.sigma_minus = {(1 - h) * kt, (1 - h) * kt, 0.0};
  const Tangent dev = deviatoric_tangent(c.mu);
  const Tangent volp = volumetric_tangent(h * c.bulk);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.tangent_plus[i][j] = dev[i][j] + volp[i][j];
  }
  out.tangent_minus = volumetric_tangent((1 - h) * c.bulk);
  return out;
}

double crack_density(double phi, Vec2 grad_phi, double eps) {
  if (!(eps > 0.0)) throw DomainError("crack_density: eps must be positive");
  const double d = 1.0 - phi;
  return d * d / (2.0 * eps) + 0.5 * eps * dot(grad_phi, grad_phi);
}

double driving_force(const DrivingForceInput& in) {
  const double phi_p = std::max(in.phi, 0.0);
  const double psi = split_energy(in.strain, in.elastic, SplitMode::voldev).psi_total;
  const double div_u = in.strain.trace();
  const double thermal = 3.0 * in.thermal_alpha * in.elastic.bulk + in.c_theta;
  return 2.0 * (1.0 - in.kappa_reg) * phi_p * psi
         - 2.0 * (in.biot_alpha - 1.0) * in.dp * phi_p * div_u
         + 2.0 * phi_p * dot(in.grad_dp, in.u)
         - 2.0 * thermal * in.dtheta * phi_p * div_u
         + 2.0 * in.c_theta * phi_p * dot(in.grad_dtheta, in.u);
}

}  // namespace thermofrac

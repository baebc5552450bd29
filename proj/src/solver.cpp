#include "thermofrac/solver.hpp"

#include <algorithm>
#include <cmath>

#include "thermofrac/linear_solver.hpp"

namespace thermofrac {

std::vector<int> update_active_set(std::span<const double> rhs_phi,
                                   std::span<const double> increment,
                                   std::span<const double> lumped_mass, double c) {
  if (rhs_phi.size() != increment.size() || rhs_phi.size() != lumped_mass.size()) {
    throw std::invalid_argument("update_active_set: size mismatch");
  }
  std::vector<int> active;
  for (std::size_t i = 0; i < rhs_phi.size(); ++i) {
    if (rhs_phi[i] / lumped_mass[i] + c * increment[i] > 0.0) {
      active.push_back(static_cast<int>(i));
    }
  }
  return active;
}

NewtonOptions NewtonOptions::from_config(const Config& cfg) {
  NewtonOptions o;
  o.tol = cfg.model.tol_newton;
  o.max_newton = cfg.model.max_newton;
  o.active_set_c = cfg.model.active_set_constant(cfg.material.fracture_toughness);
  o.linear = cfg.solver;
  return o;
}

namespace {

struct Scales {
  double u = 1.0;
  double phi = 1.0;
};

double normalized(const BlockResidual& r, const Scales& s) {
  const double a = norm2(r.u) / s.u;
  const double b = norm2(r.phi) / s.phi;
  return std::sqrt(a * a + b * b);
}

}  // namespace

NewtonReport solve_time_step(const Assembler& assembler, const LoadState& loads,
                             std::span<const double> phi_old,
                             std::span<const double> phi_tilde,
                             const std::vector<int>& previous_active,
                             const NewtonOptions& options, std::vector<double>& u,
                             std::vector<double>& phi) {
  const DofMap& dofs = assembler.dofs();
  const int nn = dofs.n_nodes();
  if (static_cast<int>(u.size()) != 2 * nn || static_cast<int>(phi.size()) != nn ||
      static_cast<int>(phi_old.size()) != nn || static_cast<int>(phi_tilde.size()) != nn) {
    throw std::invalid_argument("solve_time_step: field size mismatch");
  }
  const auto mass = assembler.lumped_mass();
  const auto& pp = assembler.params();
  ConstraintSet cs;
  cs.dirichlet_u = assembler.dirichlet_u_dofs();

  Scales scales;
  {
    const std::vector<double> zero(2 * nn, 0.0);
    BlockResidual load = assembler.assemble_residual({zero, phi, phi_tilde}, loads, options.exec);
    mask_residual(load, cs);
    scales.u = norm2(load.u);
    if (!(scales.u > 0.0)) {
      BlockResidual r0 = assembler.assemble_residual({u, phi, phi_tilde}, loads, options.exec);
      mask_residual(r0, cs);
      scales.u = norm2(r0.u) > 0.0 ? norm2(r0.u) : 1.0;
    }
    scales.phi = pp.fracture_toughness / pp.eps * norm2(mass);
  }

  NewtonReport report;
  std::vector<int> prev = previous_active;
  std::vector<double> inc(nn);
  double reference = 1.0;
  for (int k = 0;; ++k) {
    BlockSystem sys = assembler.assemble_jacobian({u, phi, phi_tilde}, loads, options.exec);
    for (int i = 0; i < nn; ++i) inc[i] = phi[i] - phi_old[i];
    cs.active_phi = update_active_set(sys.rhs_phi, inc, mass, options.active_set_c);
    cs.active_values.resize(cs.active_phi.size());
    double violation = 0.0;
    for (std::size_t a = 0; a < cs.active_phi.size(); ++a) {
      const int i = cs.active_phi[a];
      cs.active_values[a] = phi_old[i] - phi[i];
      violation = std::max(violation, std::abs(cs.active_values[a]));
    }
    BlockResidual masked{sys.rhs_u, sys.rhs_phi};
    mask_residual(masked, cs);
    const double res = normalized(masked, scales);
    if (k == 0) {
      report.reference_residual = res;
      reference = std::max(res, 1.0);
    }
    NewtonIteration it;
    it.residual = res;
    it.active_set_size = static_cast<int>(cs.active_phi.size());
    report.final_residual = res;
    report.active_set = cs.active_phi;

    const bool at_tol = res <= options.tol * reference;
    if (cs.active_phi == prev && at_tol && violation <= options.bound_tol) {
      report.iterations.push_back(it);
      report.converged = true;
      return report;
    }
    if (k >= options.max_newton) {
      report.iterations.push_back(it);
      throw StepFailure("Newton iteration did not converge within " +
                            std::to_string(options.max_newton) + " iterations",
                        report);
    }

    apply_constraints(sys, cs);
    const LinearSolveResult lin =
        solve_block_system(sys, options.linear, scales.u, scales.phi, options.exec);
    report.linear_solves += 1;
    report.gmres_total += lin.iterations;
    report.preconditioner_fallback = report.preconditioner_fallback || lin.preconditioner_fallback;
    it.gmres_iterations = lin.iterations;
    it.linear_converged = lin.converged;

    std::vector<double> u_trial(2 * nn), phi_trial(nn);
    double omega = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= options.max_halvings; ++halving) {
      for (int i = 0; i < 2 * nn; ++i) u_trial[i] = u[i] + omega * lin.du[i];
      for (int i = 0; i < nn; ++i) phi_trial[i] = phi[i] + omega * lin.dphi[i];
      BlockResidual r = assembler.assemble_residual({u_trial, phi_trial, phi_tilde}, loads,
                                                    options.exec);
      mask_residual(r, cs);
      if (normalized(r, scales) < res) {
        accepted = true;
        break;
      }
      omega *= 0.5;
    }
    if (!accepted) {
      if (!at_tol) {
        report.iterations.push_back(it);
        throw StepFailure("line search stagnated", report);
      }
      omega = 1.0;
      for (int i = 0; i < 2 * nn; ++i) u_trial[i] = u[i] + lin.du[i];
      for (int i = 0; i < nn; ++i) phi_trial[i] = phi[i] + lin.dphi[i];
    }
    it.step_length = omega;
    report.iterations.push_back(it);
    u.swap(u_trial);
    phi.swap(phi_trial);
    prev = cs.active_phi;
  }
}

}  // namespace thermofrac

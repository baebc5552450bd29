#include "thermofrac/simulation.hpp"

#include <algorithm>

#include "thermofrac/thermal.hpp"

namespace thermofrac {

namespace {

std::vector<double> split_component(std::span<const double> u, int comp) {
  std::vector<double> out(u.size() / 2);
  for (std::size_t n = 0; n < out.size(); ++n) out[n] = u[2 * n + comp];
  return out;
}

}  // namespace

Simulation::Simulation(Config cfg, BoundarySpec boundary, Execution exec)
    : cfg_(std::move(cfg)), boundary_(boundary), exec_(exec) {
  cfg_.validate();
  newton_ = NewtonOptions::from_config(cfg_);
  newton_.exec = exec_;
  mesh_ = QuadMesh::uniform(cfg_.geometry.domain_size(), cfg_.model.initial_level);
  state_.phi = seed_crack(mesh_, cfg_.geometry);
  for (int pass = 0; pass < cfg_.model.max_level - cfg_.model.initial_level; ++pass) {
    const auto flagged = flag_cells(mesh_, state_.phi, cfg_.model.tol_phi, cfg_.model.max_level);
    if (flagged.empty()) break;
    mesh_ = mesh_.refine(flagged).first;
    state_.phi = seed_crack(mesh_, cfg_.geometry);
  }
  state_.ux.assign(mesh_.n_vertices(), 0.0);
  state_.uy.assign(mesh_.n_vertices(), 0.0);
  state_.phi_nm1 = state_.phi;
  state_.phi_nm2 = state_.phi;
  rebuild();
}

void Simulation::rebuild() {
  dofs_ = std::make_unique<DofMap>(mesh_);
  assembler_ = std::make_unique<Assembler>(mesh_, *dofs_, boundary_,
                                           PhysicsParams::from_config(cfg_));
}

void Simulation::refine(const std::vector<int>& flagged) {
  auto [fine, transfer] = mesh_.refine(flagged);
  state_.ux = transfer.apply(state_.ux);
  state_.uy = transfer.apply(state_.uy);
  state_.phi = transfer.apply(state_.phi);
  state_.phi_nm1 = transfer.apply(state_.phi_nm1);
  state_.phi_nm2 = transfer.apply(state_.phi_nm2);
  mesh_ = std::move(fine);
  last_active_.clear();
  rebuild();
}

LoadState Simulation::loads_at(double t) const {
  LoadState l;
  const auto& ld = cfg_.loads;
  l.dp = ld.pressure(t, cfg_.model.dt) - ld.p0;
  if (ld.lambda_theta_mode != ThermalMode::off) {
    l.dtheta = ld.theta - ld.theta0;
    l.c_theta = thermal_coupling(t, cfg_).c_theta;
  }
  return l;
}

std::vector<double> Simulation::phase_tilde_nodes(double t) const {
  if (state_.accepted_steps < 2) return dofs_->to_node(state_.phi_nm1);
  const auto tilde =
      extrapolate_phase(state_.phi_nm1, state_.phi_nm2, state_.t_nm1, state_.t_nm2, t);
  return dofs_->to_node(tilde);
}

StepResult Simulation::advance() {
  if (finished()) throw std::logic_error("Simulation::advance: all steps done");
  const double t = (step_ + 1) * cfg_.model.dt;
  const LoadState loads = loads_at(t);
  StepResult res;
  int newton_total = 0;
  int linear_solves = 0;
  int gmres_total = 0;
  NewtonReport report;
  const int max_passes = cfg_.model.max_level - cfg_.model.initial_level;
  for (int pass = 0;; ++pass) {
    const int nn = dofs_->n_nodes();
    std::vector<double> u(2 * nn);
    {
      const auto ux = dofs_->to_node(state_.ux);
      const auto uy = dofs_->to_node(state_.uy);
      for (int n = 0; n < nn; ++n) {
        u[2 * n] = ux[n];
        u[2 * n + 1] = uy[n];
      }
    }
    std::vector<double> phi = dofs_->to_node(state_.phi);
    const auto phi_old = dofs_->to_node(state_.phi_nm1);
    const auto phi_tilde = phase_tilde_nodes(t);
    report = solve_time_step(*assembler_, loads, phi_old, phi_tilde, last_active_, newton_, u, phi);
    newton_total += report.linear_solves;
    linear_solves += report.linear_solves;
    gmres_total += report.gmres_total;
    res.max_newton_per_solve = std::max(res.max_newton_per_solve, report.linear_solves);
    res.solves += 1;
    state_.ux = dofs_->to_vertex(split_component(u, 0));
    state_.uy = dofs_->to_vertex(split_component(u, 1));
    state_.phi = dofs_->to_vertex(phi);
    last_active_ = report.active_set;
    if (pass >= max_passes) break;
    const auto flagged = flag_cells(mesh_, state_.phi, cfg_.model.tol_phi, cfg_.model.max_level);
    if (flagged.empty()) break;
    refine(flagged);
    res.refinements += 1;
  }

  double violation = -1e300;
  for (int v = 0; v < mesh_.n_vertices(); ++v) {
    violation = std::max(violation, state_.phi[v] - state_.phi_nm1[v]);
  }
  res.max_bound_violation = violation;
  res.final_residual = report.final_residual;
  res.reference_residual = report.reference_residual;
  res.converged = report.converged;
  res.n_leaves = mesh_.n_leaves();

  step_ += 1;
  state_.phi_nm2 = state_.phi_nm1;
  state_.t_nm2 = state_.t_nm1;
  state_.phi_nm1 = state_.phi;
  state_.t_nm1 = t;
  state_.accepted_steps += 1;

  const int nn = dofs_->n_nodes();
  std::vector<double> u(2 * nn);
  {
    const auto ux = dofs_->to_node(state_.ux);
    const auto uy = dofs_->to_node(state_.uy);
    for (int n = 0; n < nn; ++n) {
      u[2 * n] = ux[n];
      u[2 * n + 1] = uy[n];
    }
  }
  const EnergyParts e = assembler_->energy(u, dofs_->to_node(state_.phi), loads);
  auto& row = res.row;
  row.step = step_;
  row.time = t;
  row.max_cod = cod_at(mesh_, fields(), cfg_.geometry.a);
  row.crack_length = crack_length(mesh_, state_.phi, cfg_.geometry.a);
  row.e_mech = e.mechanical;
  row.e_frac = e.fracture;
  row.newton_iters = newton_total;
  row.gmres_avg = linear_solves > 0 ? static_cast<double>(gmres_total) / linear_solves : 0.0;
  row.active_set_size = static_cast<int>(last_active_.size());
  return res;
}

}  // namespace thermofrac

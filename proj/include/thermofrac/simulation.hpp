#pragma once

#include <vector>

#include "thermofrac/assembly.hpp"
#include "thermofrac/dof_map.hpp"
#include "thermofrac/mesh.hpp"
#include "thermofrac/params.hpp"
#include "thermofrac/postprocess.hpp"
#include "thermofrac/solver.hpp"

namespace thermofrac {

/// Vertex-level solution with the phase-field history used by the
/// extrapolation and the irreversibility bound.
struct SolutionState {
  std::vector<double> ux;
  std::vector<double> uy;
  std::vector<double> phi;
  std::vector<double> phi_nm1;  // last accepted step, also the irreversibility bound
  std::vector<double> phi_nm2;
  double t_nm1 = 0.0;
  double t_nm2 = 0.0;
  int accepted_steps = 0;
};

struct StepResult {
  TimeseriesRow row;
  int solves = 0;             // predictor-corrector passes
  int max_newton_per_solve = 0;
  int refinements = 0;
  int n_leaves = 0;
  double max_bound_violation = 0.0;  // max(phi - phi_old) over nodes
  double final_residual = 0.0;
  double reference_residual = 0.0;
  bool converged = false;
};

/// Quasi-static time loop with predictor-corrector mesh refinement.
class Simulation {
 public:
  explicit Simulation(Config cfg, BoundarySpec boundary = BoundarySpec::all_clamped(),
                      Execution exec = Execution::serial);

  const Config& config() const { return cfg_; }
  const QuadMesh& mesh() const { return mesh_; }
  const SolutionState& state() const { return state_; }
  VertexFields fields() const { return {state_.ux, state_.uy, state_.phi}; }
  int step() const { return step_; }
  double time() const { return step_ * cfg_.model.dt; }
  bool finished() const { return step_ >= cfg_.model.n_steps; }

  /// Loads at time t (pressure law, thermal coupling).
  LoadState loads_at(double t) const;

  /// Solves the next step. Throws StepFailure if Newton fails.
  StepResult advance();

 private:
  void rebuild();
  void refine(const std::vector<int>& flagged);
  std::vector<double> phase_tilde_nodes(double t) const;

  Config cfg_;
  BoundarySpec boundary_;
  Execution exec_;
  NewtonOptions newton_;
  QuadMesh mesh_;
  std::unique_ptr<DofMap> dofs_;
  std::unique_ptr<Assembler> assembler_;
  SolutionState state_;
  std::vector<int> last_active_;
  int step_ = 0;
};

}  // namespace thermofrac

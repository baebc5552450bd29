#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "thermofrac/assembly.hpp"
#include "thermofrac/params.hpp"

namespace thermofrac {

struct NewtonIteration {
  double residual = 0.0;  // block-normalised residual before the update
  int active_set_size = 0;
  int gmres_iterations = 0;
  double step_length = 0.0;
  bool linear_converged = true;
};

struct NewtonReport {
  std::vector<NewtonIteration> iterations;
  std::vector<int> active_set;  // final active set (phase-field node indices)
  bool converged = false;
  double reference_residual = 0.0;
  double final_residual = 0.0;
  int linear_solves = 0;
  int gmres_total = 0;
  bool preconditioner_fallback = false;

  double gmres_average() const {
    return linear_solves > 0 ? static_cast<double>(gmres_total) / linear_solves : 0.0;
  }
};

/// Raised when a time step cannot be solved; carries the partial report.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, NewtonReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const NewtonReport& report() const noexcept { return report_; }

 private:
  NewtonReport report_;
};

/// Phase-field nodes where the irreversibility bound is enforced:
///   rhs_phi[i] / mass[i] + c * increment[i] > 0,
/// with rhs = -dE/dphi and increment = phi - phi_old. Sorted.
std::vector<int> update_active_set(std::span<const double> rhs_phi,
                                   std::span<const double> increment,
                                   std::span<const double> lumped_mass, double c);

struct NewtonOptions {
  double tol = 1.0e-10;
  int max_newton = 50;
  double active_set_c = 1.0;
  int max_halvings = 12;
  double bound_tol = 1.0e-12;
  SolverParams linear;
  Execution exec = Execution::parallel;

  static NewtonOptions from_config(const Config& cfg);
};

/// Primal-dual active-set Newton iteration for one time step. u and phi hold
/// the initial guess on entry and the solution on return. phi_old is the
/// irreversibility bound and phi_tilde the extrapolated phase field used in
/// the displacement equation. Throws StepFailure on divergence.
NewtonReport solve_time_step(const Assembler& assembler, const LoadState& loads,
                             std::span<const double> phi_old,
                             std::span<const double> phi_tilde,
                             const std::vector<int>& previous_active,
                             const NewtonOptions& options, std::vector<double>& u,
                             std::vector<double>& phi);

}  // namespace thermofrac

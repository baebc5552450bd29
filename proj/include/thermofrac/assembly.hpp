#pragma once

#include <array>
#include <span>
#include <vector>

#include "thermofrac/dof_map.hpp"
#include "thermofrac/mesh.hpp"
#include "thermofrac/params.hpp"
#include "thermofrac/physics.hpp"
#include "thermofrac/sparse.hpp"

namespace thermofrac {

enum class Side { left = 0, right = 1, bottom = 2, top = 3 };

/// Per-side displacement boundary conditions. Clamped sides have u = 0;
/// the others carry a constant traction.
struct BoundarySpec {
  std::array<bool, 4> clamped{true, true, true, true};
  std::array<Vec2, 4> traction{};

  static BoundarySpec all_clamped() { return {}; }
};

/// Loads at the current time. Pressure and temperature differences are
/// affine in space: value + gradient . x.
struct LoadState {
  double dp = 0.0;      // p - p0 at the origin
  Vec2 grad_dp;
  double dtheta = 0.0;  // Theta - Theta0 at the origin
  Vec2 grad_dtheta;
  double c_theta = 0.0;

  double dp_at(Vec2 x) const { return dp + dot(grad_dp, x); }
  double dtheta_at(Vec2 x) const { return dtheta + dot(grad_dtheta, x); }
};

struct PhysicsParams {
  ElasticConstants elastic;
  double kappa_reg = 1.0e-10;
  double fracture_toughness = 1.0;
  double eps = 1.0;
  SplitMode split = SplitMode::voldev;
  double biot_alpha = 0.0;
  double thermal_alpha = 0.0;

  static PhysicsParams from_config(const Config& cfg);
};

/// Linearised system in the block form
///   [ M_uu      0       ] [du  ]   [rhs_u  ]
///   [ M_phiu   M_phiphi ] [dphi] = [rhs_phi]
/// where rhs = -dE/dU is the Newton right-hand side.
struct BlockSystem {
  CsrMatrix uu;
  CsrMatrix phiu;
  CsrMatrix phiphi;
  std::vector<double> rhs_u;
  std::vector<double> rhs_phi;

  int n_u() const { return uu.rows; }
  int n_phi() const { return phiphi.rows; }
  /// y = M x for x = [x_u | x_phi].
  void multiply(std::span<const double> x, std::span<double> y,
                Execution exec = Execution::serial) const;
};

struct BlockResidual {
  std::vector<double> u;
  std::vector<double> phi;
};

/// Node vectors of the current iterate and the time-lagged extrapolation.
struct FieldView {
  std::span<const double> u;          // 2 * n_nodes, interleaved
  std::span<const double> phi;        // n_nodes
  std::span<const double> phi_tilde;  // n_nodes
};

struct EnergyParts {
  double mechanical = 0.0;  // int g(phi) psi+ + psi-
  double coupling = 0.0;    // pressure and thermal face loading
  double fracture = 0.0;    // G_c int gamma_eps
  double external = 0.0;    // -int_Gamma tau . u

  double total() const { return mechanical + coupling + fracture + external; }
};

/// Finite element assembly on a fixed mesh.
class Assembler {
 public:
  Assembler(const QuadMesh& mesh, const DofMap& dofs, BoundarySpec boundary,
            PhysicsParams params);

  const DofMap& dofs() const { return *dofs_; }
  const QuadMesh& mesh() const { return *mesh_; }
  const PhysicsParams& params() const { return params_; }

  /// rhs = -dE/dU without boundary conditions applied.
  BlockResidual assemble_residual(const FieldView& f, const LoadState& loads,
                                  Execution exec = Execution::parallel) const;
  BlockSystem assemble_jacobian(const FieldView& f, const LoadState& loads,
                                Execution exec = Execution::parallel) const;

  /// Energy functional with the phase field itself in the coupling terms.
  EnergyParts energy(std::span<const double> u, std::span<const double> phi,
                     const LoadState& loads) const;

  /// Row sums of the phase-field mass matrix.
  std::vector<double> lumped_mass() const;

  /// u DoFs on clamped sides, sorted.
  const std::vector<int>& dirichlet_u_dofs() const { return dirichlet_u_; }

 private:
  struct Local;
  void compute_local(int leaf, const std::vector<double>& ux, const std::vector<double>& uy,
                     const std::vector<double>& phi, const std::vector<double>& phi_tilde,
                     const LoadState& loads, bool with_matrix, Local& out) const;
  void scatter(int leaf, const Local& loc, bool with_matrix, BlockResidual& r,
               BlockSystem* sys) const;
  void add_traction(BlockResidual& r) const;
  void assemble(const FieldView& f, const LoadState& loads, Execution exec, BlockResidual& r,
                BlockSystem* sys) const;

  const QuadMesh* mesh_;
  const DofMap* dofs_;
  BoundarySpec boundary_;
  PhysicsParams params_;
  std::vector<int> dirichlet_u_;
  CsrMatrix pattern_uu_;
  CsrMatrix pattern_phiu_;
  CsrMatrix pattern_phiphi_;
};

/// Dirichlet rows for u and the active phase-field rows with their fixed
/// increments. Hanging-node relations are built into the DofMap.
struct ConstraintSet {
  std::vector<int> dirichlet_u;
  std::vector<int> active_phi;         // node indices, sorted
  std::vector<double> active_values;   // prescribed dphi on active_phi
};

/// Replaces constrained rows by identity rows and eliminates the matching
/// columns so that the blocks stay symmetric. Idempotent.
void apply_constraints(BlockSystem& sys, const ConstraintSet& c);

/// Zeroes the constrained entries of a residual (Dirichlet rows and active rows).
void mask_residual(BlockResidual& r, const ConstraintSet& c);

/// Linear-in-time extrapolation of the phase field to t_n from the two
/// previous accepted steps.
std::vector<double> extrapolate_phase(std::span<const double> phi_nm1,
                                      std::span<const double> phi_nm2, double t_nm1,
                                      double t_nm2, double t_n);

}  // namespace thermofrac

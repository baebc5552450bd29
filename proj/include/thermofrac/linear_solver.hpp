#pragma once

#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "thermofrac/assembly.hpp"
#include "thermofrac/params.hpp"
#include "thermofrac/sparse.hpp"

namespace thermofrac {

class FactorizationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Approximate inverse of one diagonal block.
class BlockPreconditioner {
 public:
  virtual ~BlockPreconditioner() = default;
  virtual void apply(std::span<const double> r, std::span<double> z) const = 0;
  virtual std::string_view name() const = 0;
};

/// Incomplete LU with zero fill. Throws FactorizationError on a zero pivot.
std::unique_ptr<BlockPreconditioner> make_ilu0(const CsrMatrix& a);
/// Sparse LDL^T factorisation (exact block inverse).
std::unique_ptr<BlockPreconditioner> make_direct(const CsrMatrix& a);
/// Inverse diagonal; zero diagonal entries act as identity.
std::unique_ptr<BlockPreconditioner> make_jacobi(const CsrMatrix& a);

/// Builds the requested kind and falls back to Jacobi (with a warning on
/// stderr) when the factorisation breaks down.
std::unique_ptr<BlockPreconditioner> make_preconditioner(const CsrMatrix& a,
                                                         PreconditionerKind kind,
                                                         bool* fell_back = nullptr);

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct GmresOptions {
  double tol = 1.0e-8;
  int restart = 100;
  int max_iter = 2000;
};

struct GmresResult {
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
};

/// Restarted GMRES with right preconditioning. x holds the initial guess on
/// entry. Converged when |b - A x| <= tol |b|.
GmresResult gmres(const LinearOperator& a, const LinearOperator& precond,
                  std::span<const double> b, std::span<double> x, const GmresOptions& opt);

struct LinearSolveResult {
  std::vector<double> du;
  std::vector<double> dphi;
  int iterations = 0;
  bool converged = false;
  double relative_residual = 0.0;
  bool preconditioner_fallback = false;
};

/// Solves the constrained block system. Rows of the u block are scaled by
/// 1 / scale_u and rows of the phase-field block by 1 / scale_phi before the
/// Krylov solve so that both blocks enter the residual norm with equal weight.
LinearSolveResult solve_block_system(const BlockSystem& sys, const SolverParams& params,
                                     double scale_u, double scale_phi,
                                     Execution exec = Execution::parallel);

}  // namespace thermofrac

#include "thermofrac/linear_solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <iostream>

namespace thermofrac {

namespace {

class Ilu0 final : public BlockPreconditioner {
 public:
  explicit Ilu0(const CsrMatrix& a) : lu_(a), diag_(a.rows, -1) {
    if (a.rows != a.cols) throw FactorizationError("ILU(0): matrix is not square");
    const int n = lu_.rows;
    for (int i = 0; i < n; ++i) {
      diag_[i] = lu_.find(i, i);
      if (diag_[i] < 0) throw FactorizationError("ILU(0): missing diagonal entry");
    }
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i) {
      for (int k = lu_.row_ptr[i]; k < lu_.row_ptr[i + 1]; ++k) pos[lu_.col_idx[k]] = k;
      for (int kk = lu_.row_ptr[i]; kk < lu_.row_ptr[i + 1]; ++kk) {
        const int k = lu_.col_idx[kk];
        if (k >= i) break;
        const double pivot = lu_.values[diag_[k]];
        if (pivot == 0.0 || !std::isfinite(pivot)) throw FactorizationError("ILU(0): zero pivot");
        const double lik = lu_.values[kk] / pivot;
        lu_.values[kk] = lik;
        for (int jj = diag_[k] + 1; jj < lu_.row_ptr[k + 1]; ++jj) {
          const int p = pos[lu_.col_idx[jj]];
          if (p >= 0) lu_.values[p] -= lik * lu_.values[jj];
        }
      }
      for (int k = lu_.row_ptr[i]; k < lu_.row_ptr[i + 1]; ++k) pos[lu_.col_idx[k]] = -1;
      const double d = lu_.values[diag_[i]];
      if (d == 0.0 || !std::isfinite(d)) throw FactorizationError("ILU(0): zero pivot");
    }
  }

  void apply(std::span<const double> r, std::span<double> z) const override {
    const int n = lu_.rows;
    for (int i = 0; i < n; ++i) {
      double s = r[i];
      for (int k = lu_.row_ptr[i]; k < diag_[i]; ++k) s -= lu_.values[k] * z[lu_.col_idx[k]];
      z[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
      double s = z[i];
      for (int k = diag_[i] + 1; k < lu_.row_ptr[i + 1]; ++k) s -= lu_.values[k] * z[lu_.col_idx[k]];
      z[i] = s / lu_.values[diag_[i]];
    }
  }

  std::string_view name() const override { return "ilu0"; }

 private:
  CsrMatrix lu_;
  std::vector<int> diag_;
};

class Direct final : public BlockPreconditioner {
 public:
  explicit Direct(const CsrMatrix& a) : n_(a.rows) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(a.nnz());
    for (int r = 0; r < a.rows; ++r) {
      for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        trip.emplace_back(r, a.col_idx[k], a.values[k]);
      }
    }
    Eigen::SparseMatrix<double> m(a.rows, a.cols);
    m.setFromTriplets(trip.begin(), trip.end());
    ldlt_.compute(m);
    if (ldlt_.info() != Eigen::Success) throw FactorizationError("LDL^T factorisation failed");
  }

  void apply(std::span<const double> r, std::span<double> z) const override {
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), n_);
    Eigen::Map<Eigen::VectorXd> zv(z.data(), n_);
    zv = ldlt_.solve(rv);
  }

  std::string_view name() const override { return "direct"; }

 private:
  int n_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

class Jacobi final : public BlockPreconditioner {
 public:
  explicit Jacobi(const CsrMatrix& a) : inv_(a.diagonal()) {
    for (double& d : inv_) d = d != 0.0 ? 1.0 / d : 1.0;
  }

  void apply(std::span<const double> r, std::span<double> z) const override {
    for (std::size_t i = 0; i < inv_.size(); ++i) z[i] = inv_[i] * r[i];
  }

  std::string_view name() const override { return "jacobi"; }

 private:
  std::vector<double> inv_;
};

}  // namespace

std::unique_ptr<BlockPreconditioner> make_ilu0(const CsrMatrix& a) {
  return std::make_unique<Ilu0>(a);
}

std::unique_ptr<BlockPreconditioner> make_direct(const CsrMatrix& a) {
  return std::make_unique<Direct>(a);
}

std::unique_ptr<BlockPreconditioner> make_jacobi(const CsrMatrix& a) {
  return std::make_unique<Jacobi>(a);
}

std::unique_ptr<BlockPreconditioner> make_preconditioner(const CsrMatrix& a,
                                                         PreconditionerKind kind,
                                                         bool* fell_back) {
  if (fell_back) *fell_back = false;
  try {
    switch (kind) {
      case PreconditionerKind::ilu0:
        return make_ilu0(a);
      case PreconditionerKind::direct:
        return make_direct(a);
      case PreconditionerKind::jacobi:
        return make_jacobi(a);
    }
  } catch (const FactorizationError& e) {
    std::cerr << "warning: " << e.what() << "; falling back to Jacobi preconditioning\n";
    if (fell_back) *fell_back = true;
  }
  return make_jacobi(a);
}

GmresResult gmres(const LinearOperator& a, const LinearOperator& precond,
                  std::span<const double> b, std::span<double> x, const GmresOptions& opt) {
  const std::size_t n = b.size();
  const int m = std::max(1, opt.restart);
  GmresResult res;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<std::vector<double>> v(m + 1, std::vector<double>(n));
  std::vector<std::vector<double>> h(m + 1, std::vector<double>(m, 0.0));
  std::vector<double> cs(m), sn(m), g(m + 1), w(n), z(n), ax(n);

  while (true) {
    a(x, ax);
    for (std::size_t i = 0; i < n; ++i) v[0][i] = b[i] - ax[i];
    double beta = norm2(v[0]);
    res.relative_residual = beta / bnorm;
    if (res.relative_residual <= opt.tol) {
      res.converged = true;
      return res;
    }
    if (res.iterations >= opt.max_iter) return res;
    for (double& e : v[0]) e /= beta;
    std::fill(g.begin(), g.end(), 0.0);
    g[0] = beta;
    int j = 0;
    for (; j < m && res.iterations < opt.max_iter; ++j) {
      precond(v[j], z);
      a(z, w);
      for (int i = 0; i <= j; ++i) {
        h[i][j] = dot(w, v[i]);
        axpy(-h[i][j], v[i], w);
      }
      h[j + 1][j] = norm2(w);
      if (h[j + 1][j] > 0.0) {
        for (std::size_t k = 0; k < n; ++k) v[j + 1][k] = w[k] / h[j + 1][j];
      }
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
        h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
        h[i][j] = t;
      }
      const double denom = std::hypot(h[j][j], h[j + 1][j]);
      cs[j] = denom > 0.0 ? h[j][j] / denom : 1.0;
      sn[j] = denom > 0.0 ? h[j + 1][j] / denom : 0.0;
      h[j][j] = denom;
      h[j + 1][j] = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++res.iterations;
      if (std::abs(g[j + 1]) / bnorm <= opt.tol || denom == 0.0) {
        ++j;
        break;
      }
    }
    std::vector<double> y(j);
    for (int i = j - 1; i >= 0; --i) {
      double s = g[i];
      for (int k = i + 1; k < j; ++k) s -= h[i][k] * y[k];
      y[i] = h[i][i] != 0.0 ? s / h[i][i] : 0.0;
    }
    std::fill(w.begin(), w.end(), 0.0);
    for (int i = 0; i < j; ++i) axpy(y[i], v[i], w);
    precond(w, z);
    axpy(1.0, z, x);
  }
}

LinearSolveResult solve_block_system(const BlockSystem& sys, const SolverParams& params,
                                     double scale_u, double scale_phi, Execution exec) {
  if (!(scale_u > 0.0) || !(scale_phi > 0.0)) {
    throw std::invalid_argument("solve_block_system: scales must be positive");
  }
  const int nu = sys.n_u();
  const int np = sys.n_phi();
  CsrMatrix uu = sys.uu;
  CsrMatrix pu = sys.phiu;
  CsrMatrix pp = sys.phiphi;
  uu.scale(1.0 / scale_u);
  pu.scale(1.0 / scale_phi);
  pp.scale(1.0 / scale_phi);
  std::vector<double> bu(sys.rhs_u), bp(sys.rhs_phi);
  for (double& e : bu) e /= scale_u;
  for (double& e : bp) e /= scale_phi;

  LinearSolveResult out;
  bool fb_u = false, fb_p = false;
  const auto pre_u = make_preconditioner(uu, params.preconditioner, &fb_u);
  const auto pre_p = make_preconditioner(pp, params.preconditioner, &fb_p);
  out.preconditioner_fallback = fb_u || fb_p;
  const GmresOptions opt{params.gmres_tol, params.gmres_restart, params.gmres_max_iter};

  if (params.strategy == LinearStrategy::full_block) {
    const LinearOperator op = [&](std::span<const double> x, std::span<double> y) {
      uu.multiply(x.subspan(0, nu), y.subspan(0, nu), exec);
      pp.multiply(x.subspan(nu, np), y.subspan(nu, np), exec);
      pu.multiply_add(x.subspan(0, nu), y.subspan(nu, np), exec);
    };
    const LinearOperator prec = [&](std::span<const double> r, std::span<double> z) {
      pre_u->apply(r.subspan(0, nu), z.subspan(0, nu));
      pre_p->apply(r.subspan(nu, np), z.subspan(nu, np));
    };
    std::vector<double> b(nu + np), x(nu + np, 0.0);
    std::copy(bu.begin(), bu.end(), b.begin());
    std::copy(bp.begin(), bp.end(), b.begin() + nu);
    const GmresResult r = gmres(op, prec, b, x, opt);
    out.iterations = r.iterations;
    out.converged = r.converged;
    out.relative_residual = r.relative_residual;
    out.du.assign(x.begin(), x.begin() + nu);
    out.dphi.assign(x.begin() + nu, x.end());
    return out;
  }

  const LinearOperator op_u = [&](std::span<const double> x, std::span<double> y) {
    uu.multiply(x, y, exec);
  };
  const LinearOperator pr_u = [&](std::span<const double> r, std::span<double> z) {
    pre_u->apply(r, z);
  };
  out.du.assign(nu, 0.0);
  const GmresResult ru = gmres(op_u, pr_u, bu, out.du, opt);
  std::vector<double> coupling(np, 0.0);
  pu.multiply(out.du, coupling, exec);
  for (int i = 0; i < np; ++i) bp[i] -= coupling[i];
  const LinearOperator op_p = [&](std::span<const double> x, std::span<double> y) {
    pp.multiply(x, y, exec);
  };
  const LinearOperator pr_p = [&](std::span<const double> r, std::span<double> z) {
    pre_p->apply(r, z);
  };
  out.dphi.assign(np, 0.0);
  const GmresResult rp = gmres(op_p, pr_p, bp, out.dphi, opt);
  out.iterations = ru.iterations + rp.iterations;
  out.converged = ru.converged && rp.converged;
  out.relative_residual = std::max(ru.relative_residual, rp.relative_residual);
  return out;
}

}  // namespace thermofrac

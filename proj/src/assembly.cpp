#include "thermofrac/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace thermofrac {

namespace {

constexpr double kGauss = 0.21132486540518711775;  // 0.5 - 0.5 / sqrt(3)
constexpr std::array<double, 2> kGaussPts{kGauss, 1.0 - kGauss};

struct Shape {
  std::array<double, 4> n{};
  std::array<double, 4> dx{};
  std::array<double, 4> dy{};
};

Shape shape_at(double s, double t, double h) {
  Shape sh;
  sh.n = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
  sh.dx = {-(1 - t) / h, (1 - t) / h, t / h, -t / h};
  sh.dy = {-(1 - s) / h, -s / h, s / h, (1 - s) / h};
  return sh;
}

// Voigt (engineering shear) strain of the test function N_a e_i.
std::array<double, 3> b_vector(const Shape& sh, int a, int i) {
  if (i == 0) return {sh.dx[a], 0.0, sh.dy[a]};
  return {0.0, sh.dy[a], sh.dx[a]};
}

double stress_dot(const Stress2& s, const std::array<double, 3>& b) {
  return s.xx * b[0] + s.yy * b[1] + s.xy * b[2];
}

bool near(double a, double b, double scale) { return std::abs(a - b) <= 1e-12 * scale; }

}  // namespace

PhysicsParams PhysicsParams::from_config(const Config& cfg) {
  PhysicsParams p;
  p.elastic = cfg.material.elastic();
  p.kappa_reg = cfg.model.kappa_reg;
  p.fracture_toughness = cfg.material.fracture_toughness;
  p.eps = cfg.model.eps;
  p.split = cfg.model.split;
  p.biot_alpha = cfg.material.biot_alpha;
  p.thermal_alpha = cfg.material.skeleton_thermal_alpha;
  return p;
}

void BlockSystem::multiply(std::span<const double> x, std::span<double> y, Execution exec) const {
  const int nu = n_u();
  auto xu = x.subspan(0, nu);
  auto xp = x.subspan(nu, n_phi());
  auto yu = y.subspan(0, nu);
  auto yp = y.subspan(nu, n_phi());
  uu.multiply(xu, yu, exec);
  phiphi.multiply(xp, yp, exec);
  phiu.multiply_add(xu, yp, exec);
}

struct Assembler::Local {
  std::array<double, 8> ru{};
  std::array<double, 4> rphi{};
  std::array<std::array<double, 8>, 8> kuu{};
  std::array<std::array<double, 8>, 4> kphiu{};
  std::array<std::array<double, 4>, 4> kphiphi{};
};

Assembler::Assembler(const QuadMesh& mesh, const DofMap& dofs, BoundarySpec boundary,
                     PhysicsParams params)
    : mesh_(&mesh), dofs_(&dofs), boundary_(boundary), params_(params) {
  if (dofs.n_vertices() != mesh.n_vertices()) {
    throw std::invalid_argument("Assembler: DofMap does not belong to this mesh");
  }
  const double L = mesh.domain_size();
  for (int n = 0; n < dofs.n_nodes(); ++n) {
    const Vec2 p = mesh.vertex(dofs.vertex_of_node(n));
    if ((boundary_.clamped[0] && near(p.x, 0.0, L)) || (boundary_.clamped[1] && near(p.x, L, L)) ||
        (boundary_.clamped[2] && near(p.y, 0.0, L)) || (boundary_.clamped[3] && near(p.y, L, L))) {
      dirichlet_u_.push_back(2 * n);
      dirichlet_u_.push_back(2 * n + 1);
    }
  }

  const int nn = dofs.n_nodes();
  std::vector<std::vector<int>> adj(nn);
  std::vector<int> masters;
  for (int leaf : mesh.leaves()) {
    masters.clear();
    for (int v : mesh.cell(leaf).vertices) {
      for (const auto& t : dofs.expansion(v)) masters.push_back(t.node);
    }
    for (int a : masters) adj[a].insert(adj[a].end(), masters.begin(), masters.end());
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  std::vector<std::vector<int>> uu_cols(2 * nn);
  std::vector<std::vector<int>> pu_cols(nn);
  for (int n = 0; n < nn; ++n) {
    for (int m : adj[n]) {
      pu_cols[n].push_back(2 * m);
      pu_cols[n].push_back(2 * m + 1);
    }
    uu_cols[2 * n] = pu_cols[n];
    uu_cols[2 * n + 1] = pu_cols[n];
  }
  pattern_uu_ = CsrMatrix::from_pattern(2 * nn, 2 * nn, std::move(uu_cols));
  pattern_phiu_ = CsrMatrix::from_pattern(nn, 2 * nn, std::move(pu_cols));
  pattern_phiphi_ = CsrMatrix::from_pattern(nn, nn, std::move(adj));
}

void Assembler::compute_local(int leaf, const std::vector<double>& ux,
                              const std::vector<double>& uy, const std::vector<double>& phi,
                              const std::vector<double>& phi_tilde, const LoadState& loads,
                              bool with_matrix, Local& out) const {
  out = Local{};
  const auto& cell = mesh_->cell(leaf);
  const double h = mesh_->cell_size(leaf);
  const Vec2 o = mesh_->cell_origin(leaf);
  const auto& pp = params_;
  const double gc = pp.fracture_toughness;
  const double one_m_kappa = 1.0 - pp.kappa_reg;
  const double thermal_coef = 3.0 * pp.thermal_alpha * pp.elastic.bulk + loads.c_theta;
  const double wq = 0.25 * h * h;

  std::array<double, 4> cux{}, cuy{}, cphi{}, ctil{};
  for (int a = 0; a < 4; ++a) {
    const int v = cell.vertices[a];
    cux[a] = ux[v];
    cuy[a] = uy[v];
    cphi[a] = phi[v];
    ctil[a] = phi_tilde[v];
  }

  for (double t : kGaussPts) {
    for (double s : kGaussPts) {
      const Shape sh = shape_at(s, t, h);
      const Vec2 x{o.x + s * h, o.y + t * h};
      Strain2 eps;
      Vec2 u, grad_phi;
      double ph = 0.0, pt = 0.0;
      for (int a = 0; a < 4; ++a) {
        eps.xx += sh.dx[a] * cux[a];
        eps.yy += sh.dy[a] * cuy[a];
        eps.xy += 0.5 * (sh.dy[a] * cux[a] + sh.dx[a] * cuy[a]);
        u.x += sh.n[a] * cux[a];
        u.y += sh.n[a] * cuy[a];
        ph += sh.n[a] * cphi[a];
        pt += sh.n[a] * ctil[a];
        grad_phi.x += sh.dx[a] * cphi[a];
        grad_phi.y += sh.dy[a] * cphi[a];
      }
      const double php = std::max(ph, 0.0);
      const double ptp = std::max(pt, 0.0);
      const double g_tilde = degradation(ptp, pp.kappa_reg);
      const double dp = loads.dp_at(x);
      const double dth = loads.dtheta_at(x);
      const Vec2 gp = loads.grad_dp;
      const Vec2 gt = loads.grad_dtheta;
      const double divu = eps.trace();
      const SplitStresses ss = split_stress(eps, pp.elastic, pp.split);
      const double sig_eps = ddot(ss.sigma_plus, eps);

      // Face loading coefficient multiplying div w (u block) and div u (phi block).
      const double load_div = -(pp.biot_alpha - 1.0) * dp - thermal_coef * dth;
      const Vec2 load_grad = gp + loads.c_theta * gt;
      const double s_phi = one_m_kappa * sig_eps + 2.0 * load_div * divu + 2.0 * dot(load_grad, u);

      std::array<std::array<double, 3>, 8> b{};
      for (int a = 0; a < 4; ++a) {
        b[2 * a] = b_vector(sh, a, 0);
        b[2 * a + 1] = b_vector(sh, a, 1);
      }
      for (int a = 0; a < 4; ++a) {
        for (int i = 0; i < 2; ++i) {
          const int r = 2 * a + i;
          const double div_w = i == 0 ? sh.dx[a] : sh.dy[a];
          const double grad_i = i == 0 ? load_grad.x : load_grad.y;
          out.ru[r] += wq * (g_tilde * stress_dot(ss.sigma_plus, b[r]) +
                             stress_dot(ss.sigma_minus, b[r]) +
                             ptp * ptp * (load_div * div_w + grad_i * sh.n[a]));
        }
        out.rphi[a] += wq * (php * s_phi * sh.n[a] +
                             gc * ((ph - 1.0) / pp.eps * sh.n[a] +
                                   pp.eps * (grad_phi.x * sh.dx[a] + grad_phi.y * sh.dy[a])));
      }
      if (!with_matrix) continue;

      Tangent c{};
      for (int k = 0; k < 3; ++k) {
        for (int l = 0; l < 3; ++l) {
          c[k][l] = g_tilde * ss.tangent_plus[k][l] + ss.tangent_minus[k][l];
        }
      }
      for (int r = 0; r < 8; ++r) {
        std::array<double, 3> cb{};
        for (int k = 0; k < 3; ++k) {
          cb[k] = c[k][0] * b[r][0] + c[k][1] * b[r][1] + c[k][2] * b[r][2];
        }
        for (int q = 0; q < 8; ++q) {
          out.kuu[q][r] += wq * (b[q][0] * cb[0] + b[q][1] * cb[1] + b[q][2] * cb[2]);
        }
      }
      const double heav = ph > 0.0 ? 1.0 : 0.0;
      for (int a = 0; a < 4; ++a) {
        for (int bb = 0; bb < 4; ++bb) {
          for (int j = 0; j < 2; ++j) {
            const int col = 2 * bb + j;
            const double div_w = j == 0 ? sh.dx[bb] : sh.dy[bb];
            const double grad_j = j == 0 ? load_grad.x : load_grad.y;
            const double ds = 2.0 * one_m_kappa * stress_dot(ss.sigma_plus, b[col]) +
                              2.0 * load_div * div_w + 2.0 * grad_j * sh.n[bb];
            out.kphiu[a][col] += wq * sh.n[a] * php * ds;
          }
          out.kphiphi[a][bb] +=
              wq * (heav * s_phi * sh.n[a] * sh.n[bb] +
                    gc * (sh.n[a] * sh.n[bb] / pp.eps +
                          pp.eps * (sh.dx[a] * sh.dx[bb] + sh.dy[a] * sh.dy[bb])));
        }
      }
    }
  }
}

void Assembler::scatter(int leaf, const Local& loc, bool with_matrix, BlockResidual& r,
                        BlockSystem* sys) const {
  const auto& cell = mesh_->cell(leaf);
  for (int a = 0; a < 4; ++a) {
    const auto ea = dofs_->expansion(cell.vertices[a]);
    for (const auto& ta : ea) {
      r.u[2 * ta.node] -= ta.weight * loc.ru[2 * a];
      r.u[2 * ta.node + 1] -= ta.weight * loc.ru[2 * a + 1];
      r.phi[ta.node] -= ta.weight * loc.rphi[a];
    }
    if (!with_matrix) continue;
    for (int b = 0; b < 4; ++b) {
      const auto eb = dofs_->expansion(cell.vertices[b]);
      for (const auto& ta : ea) {
        for (const auto& tb : eb) {
          const double w = ta.weight * tb.weight;
          for (int i = 0; i < 2; ++i) {
            const int k = sys->uu.find(2 * ta.node + i, 2 * tb.node);
            sys->uu.values[k] += w * loc.kuu[2 * a + i][2 * b];
            sys->uu.values[k + 1] += w * loc.kuu[2 * a + i][2 * b + 1];
          }
          const int kp = sys->phiu.find(ta.node, 2 * tb.node);
          sys->phiu.values[kp] += w * loc.kphiu[a][2 * b];
          sys->phiu.values[kp + 1] += w * loc.kphiu[a][2 * b + 1];
          sys->phiphi.values[sys->phiphi.find(ta.node, tb.node)] += w * loc.kphiphi[a][b];
        }
      }
    }
  }
}

void Assembler::add_traction(BlockResidual& r) const {
  const double L = mesh_->domain_size();
  for (int leaf : mesh_->leaves()) {
    const auto& cell = mesh_->cell(leaf);
    const Vec2 o = mesh_->cell_origin(leaf);
    const double h = mesh_->cell_size(leaf);
    const std::array<bool, 4> on_side{near(o.x, 0.0, L), near(o.x + h, L, L), near(o.y, 0.0, L),
                                      near(o.y + h, L, L)};
    constexpr std::array<std::array<int, 2>, 4> edge{{{0, 3}, {1, 2}, {0, 1}, {3, 2}}};
    for (int side = 0; side < 4; ++side) {
      if (!on_side[side] || boundary_.clamped[side]) continue;
      const Vec2 tau = boundary_.traction[side];
      for (int a : edge[side]) {
        for (const auto& t : dofs_->expansion(cell.vertices[a])) {
          r.u[2 * t.node] += t.weight * 0.5 * h * tau.x;
          r.u[2 * t.node + 1] += t.weight * 0.5 * h * tau.y;
        }
      }
    }
  }
}

void Assembler::assemble(const FieldView& f, const LoadState& loads, Execution exec,
                         BlockResidual& r, BlockSystem* sys) const {
  const int nn = dofs_->n_nodes();
  if (static_cast<int>(f.u.size()) != 2 * nn || static_cast<int>(f.phi.size()) != nn ||
      static_cast<int>(f.phi_tilde.size()) != nn) {
    throw std::invalid_argument("Assembler: field size mismatch");
  }
  std::vector<double> uxn(nn), uyn(nn);
  for (int n = 0; n < nn; ++n) {
    uxn[n] = f.u[2 * n];
    uyn[n] = f.u[2 * n + 1];
  }
  const auto ux = dofs_->to_vertex(uxn);
  const auto uy = dofs_->to_vertex(uyn);
  const auto phi = dofs_->to_vertex(f.phi);
  const auto phi_tilde = dofs_->to_vertex(f.phi_tilde);

  r.u.assign(2 * nn, 0.0);
  r.phi.assign(nn, 0.0);
  const bool with_matrix = sys != nullptr;
  if (with_matrix) {
    sys->uu = pattern_uu_;
    sys->phiu = pattern_phiu_;
    sys->phiphi = pattern_phiphi_;
  }
  const auto& leaves = mesh_->leaves();
  const int nl = static_cast<int>(leaves.size());
  if (exec == Execution::serial) {
    Local loc;
    for (int k = 0; k < nl; ++k) {
      compute_local(leaves[k], ux, uy, phi, phi_tilde, loads, with_matrix, loc);
      scatter(leaves[k], loc, with_matrix, r, sys);
    }
  } else {
    std::vector<Local> locals(nl);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < nl; ++k) {
      compute_local(leaves[k], ux, uy, phi, phi_tilde, loads, with_matrix, locals[k]);
    }
    for (int k = 0; k < nl; ++k) scatter(leaves[k], locals[k], with_matrix, r, sys);
  }
  add_traction(r);
}

BlockResidual Assembler::assemble_residual(const FieldView& f, const LoadState& loads,
                                           Execution exec) const {
  BlockResidual r;
  assemble(f, loads, exec, r, nullptr);
  return r;
}

BlockSystem Assembler::assemble_jacobian(const FieldView& f, const LoadState& loads,
                                         Execution exec) const {
  BlockSystem sys;
  BlockResidual r;
  assemble(f, loads, exec, r, &sys);
  sys.rhs_u = std::move(r.u);
  sys.rhs_phi = std::move(r.phi);
  return sys;
}

EnergyParts Assembler::energy(std::span<const double> u, std::span<const double> phi_nodes,
                              const LoadState& loads) const {
  const int nn = dofs_->n_nodes();
  if (static_cast<int>(u.size()) != 2 * nn || static_cast<int>(phi_nodes.size()) != nn) {
    throw std::invalid_argument("Assembler::energy: field size mismatch");
  }
  std::vector<double> uxn(nn), uyn(nn);
  for (int n = 0; n < nn; ++n) {
    uxn[n] = u[2 * n];
    uyn[n] = u[2 * n + 1];
  }
  const auto ux = dofs_->to_vertex(uxn);
  const auto uy = dofs_->to_vertex(uyn);
  const auto phi = dofs_->to_vertex(phi_nodes);
  const auto& pp = params_;
  const double thermal_coef = 3.0 * pp.thermal_alpha * pp.elastic.bulk + loads.c_theta;

  EnergyParts e;
  for (int leaf : mesh_->leaves()) {
    const auto& cell = mesh_->cell(leaf);
    const double h = mesh_->cell_size(leaf);
    const Vec2 o = mesh_->cell_origin(leaf);
    const double wq = 0.25 * h * h;
    for (double t : kGaussPts) {
      for (double s : kGaussPts) {
        const Shape sh = shape_at(s, t, h);
        const Vec2 x{o.x + s * h, o.y + t * h};
        Strain2 eps;
        Vec2 uq, gphi;
        double ph = 0.0;
        for (int a = 0; a < 4; ++a) {
          const int v = cell.vertices[a];
          eps.xx += sh.dx[a] * ux[v];
          eps.yy += sh.dy[a] * uy[v];
          eps.xy += 0.5 * (sh.dy[a] * ux[v] + sh.dx[a] * uy[v]);
          uq.x += sh.n[a] * ux[v];
          uq.y += sh.n[a] * uy[v];
          ph += sh.n[a] * phi[v];
          gphi.x += sh.dx[a] * phi[v];
          gphi.y += sh.dy[a] * phi[v];
        }
        const double php = std::max(ph, 0.0);
        const SplitEnergies se = split_energy(eps, pp.elastic, pp.split);
        e.mechanical += wq * (degradation(php, pp.kappa_reg) * se.psi_plus + se.psi_minus);
        const double load_div =
            -(pp.biot_alpha - 1.0) * loads.dp_at(x) - thermal_coef * loads.dtheta_at(x);
        const Vec2 load_grad = loads.grad_dp + loads.c_theta * loads.grad_dtheta;
        e.coupling += wq * php * php * (load_div * eps.trace() + dot(load_grad, uq));
        e.fracture += wq * pp.fracture_toughness * crack_density(ph, gphi, pp.eps);
      }
    }
  }
  BlockResidual tr;
  tr.u.assign(2 * nn, 0.0);
  tr.phi.assign(nn, 0.0);
  add_traction(tr);
  e.external = -dot(tr.u, u);
  return e;
}

std::vector<double> Assembler::lumped_mass() const {
  std::vector<double> m(dofs_->n_nodes(), 0.0);
  for (int leaf : mesh_->leaves()) {
    const double h = mesh_->cell_size(leaf);
    for (int v : mesh_->cell(leaf).vertices) {
      for (const auto& t : dofs_->expansion(v)) m[t.node] += t.weight * 0.25 * h * h;
    }
  }
  return m;
}

void apply_constraints(BlockSystem& sys, const ConstraintSet& c) {
  if (c.active_phi.size() != c.active_values.size()) {
    throw std::invalid_argument("apply_constraints: active set and values differ in size");
  }
  auto& uu = sys.uu;
  for (int d : c.dirichlet_u) {
    for (int k = uu.row_ptr[d]; k < uu.row_ptr[d + 1]; ++k) {
      const int col = uu.col_idx[k];
      if (col != d) {
        const int kt = uu.find(col, d);
        if (kt >= 0) uu.values[kt] = 0.0;
      }
      uu.values[k] = col == d ? 1.0 : 0.0;
    }
    sys.rhs_u[d] = 0.0;
  }
  if (!c.dirichlet_u.empty()) {
    std::vector<char> fixed(uu.rows, 0);
    for (int d : c.dirichlet_u) fixed[d] = 1;
    for (int k = 0; k < sys.phiu.nnz(); ++k) {
      if (fixed[sys.phiu.col_idx[k]]) sys.phiu.values[k] = 0.0;
    }
  }
  auto& pp = sys.phiphi;
  for (std::size_t a = 0; a < c.active_phi.size(); ++a) {
    const int i = c.active_phi[a];
    const double v = c.active_values[a];
    for (int k = pp.row_ptr[i]; k < pp.row_ptr[i + 1]; ++k) {
      const int r = pp.col_idx[k];
      if (r == i) continue;
      const int kt = pp.find(r, i);
      if (kt >= 0) {
        sys.rhs_phi[r] -= pp.values[kt] * v;
        pp.values[kt] = 0.0;
      }
    }
    for (int k = pp.row_ptr[i]; k < pp.row_ptr[i + 1]; ++k) {
      pp.values[k] = pp.col_idx[k] == i ? 1.0 : 0.0;
    }
    for (int k = sys.phiu.row_ptr[i]; k < sys.phiu.row_ptr[i + 1]; ++k) sys.phiu.values[k] = 0.0;
    sys.rhs_phi[i] = v;
  }
}

void mask_residual(BlockResidual& r, const ConstraintSet& c) {
  for (int d : c.dirichlet_u) r.u[d] = 0.0;
  for (int i : c.active_phi) r.phi[i] = 0.0;
}

std::vector<double> extrapolate_phase(std::span<const double> phi_nm1,
                                      std::span<const double> phi_nm2, double t_nm1,
                                      double t_nm2, double t_n) {
  if (phi_nm1.size() != phi_nm2.size()) {
    throw std::invalid_argument("extrapolate_phase: size mismatch");
  }
  if (t_nm1 == t_nm2) throw std::invalid_argument("extrapolate_phase: coincident times");
  const double r = (t_n - t_nm1) / (t_nm1 - t_nm2);
  std::vector<double> out(phi_nm1.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = phi_nm1[i] + r * (phi_nm1[i] - phi_nm2[i]);
  }
  return out;
}

}  // namespace thermofrac

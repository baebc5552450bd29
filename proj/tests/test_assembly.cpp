#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "thermofrac/assembly.hpp"

using namespace thermofrac;

namespace {

PhysicsParams test_params(SplitMode split) {
  PhysicsParams p;
  p.elastic = derive_lame(1.5e10, 0.15);
  p.kappa_reg = 1e-3;
  p.fracture_toughness = 2.0e6;
  p.eps = 1.5;
  p.split = split;
  p.biot_alpha = 0.3;
  p.thermal_alpha = 1e-5;
  return p;
}

LoadState test_loads() {
  LoadState l;
  l.dp = 2.0e6;
  l.grad_dp = {1.0e4, -2.0e4};
  l.dtheta = -40.0;
  l.grad_dtheta = {0.5, 0.25};
  l.c_theta = 3.0e4;
  return l;
}

QuadMesh hanging_mesh() {
  QuadMesh m = QuadMesh::uniform(8.0, 2);
  m = m.refine(std::vector<int>{m.locate({3.9, 3.9})}).first;
  m = m.refine(std::vector<int>{m.locate({3.6, 3.6})}).first;
  return m;
}

struct Fields {
  std::vector<double> u, phi, phi_tilde;
  FieldView view() const { return {u, phi, phi_tilde}; }
};

Fields random_fields(const DofMap& d, std::uint64_t seed, double u_scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 1.0);
  Fields f;
  f.u.resize(d.n_u());
  f.phi.resize(d.n_phi());
  for (auto& x : f.u) x = u_scale * uni(rng);
  for (auto& x : f.phi) x = pos(rng);
  f.phi_tilde = f.phi;
  return f;
}

std::vector<double> flat_rhs(const BlockResidual& r) {
  std::vector<double> out = r.u;
  out.insert(out.end(), r.phi.begin(), r.phi.end());
  return out;
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Plane-strain Q4 stiffness from E and nu with 3x3 Gauss-Legendre quadrature.
std::array<std::array<double, 8>, 8> reference_element_stiffness(double E, double nu, double h) {
  const double f = E / ((1 + nu) * (1 - 2 * nu));
  const double D[3][3] = {{f * (1 - nu), f * nu, 0}, {f * nu, f * (1 - nu), 0},
                          {0, 0, f * (1 - 2 * nu) / 2}};
  const double gp[3] = {0.5 - 0.5 * std::sqrt(0.6), 0.5, 0.5 + 0.5 * std::sqrt(0.6)};
  const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
  const double xi[4] = {0, 1, 1, 0};
  const double eta[4] = {0, 0, 1, 1};
  std::array<std::array<double, 8>, 8> k{};
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      const double s = gp[p], t = gp[q];
      double B[3][8] = {};
      for (int a = 0; a < 4; ++a) {
        const double dndx = (2 * xi[a] - 1) * (eta[a] ? t : 1 - t) / h;
        const double dndy = (2 * eta[a] - 1) * (xi[a] ? s : 1 - s) / h;
        B[0][2 * a] = dndx;
        B[1][2 * a + 1] = dndy;
        B[2][2 * a] = dndy;
        B[2][2 * a + 1] = dndx;
      }
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) {
          double v = 0;
          for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) v += B[r][i] * D[r][c] * B[c][j];
          k[i][j] += gw[p] * gw[q] * h * h * v;
        }
    }
  }
  return k;
}

}  // namespace

TEST(Assembly, UnloadedStateHasZeroResidual) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  std::vector<double> u(d.n_u(), 0.0), phi(d.n_phi(), 1.0);
  const auto r = as.assemble_residual({u, phi, phi}, LoadState{});
  EXPECT_EQ(max_abs(r.u), 0.0);
  // phi = 1 is reproduced by the shape functions up to rounding only.
  EXPECT_LE(max_abs(r.phi), 1e-12 * 2.0e6 / 1.5 * 4.0);
}

TEST(Assembly, ConstantPressureLoadsOnlyTheBoundary) {
  const QuadMesh m = QuadMesh::uniform(4.0, 2);
  const DofMap d(m);
  auto p = test_params(SplitMode::voldev);
  p.biot_alpha = 0.0;
  const Assembler as(m, d, BoundarySpec::all_clamped(), p);
  std::vector<double> u(d.n_u(), 0.0), phi(d.n_phi(), 1.0);
  LoadState l;
  l.dp = 3.0e5;
  const auto r = as.assemble_residual({u, phi, phi}, l);
  const double h = 1.0;
  for (int n = 0; n < d.n_nodes(); ++n) {
    const Vec2 x = m.vertex(d.vertex_of_node(n));
    // -dE/du = -dp * int div(w) = -dp * (boundary flux of w)
    double fx = 0.0, fy = 0.0;
    const double wx = (x.x == 0.0 || x.x == 4.0) ? ((x.y == 0.0 || x.y == 4.0) ? 0.5 * h : h) : 0;
    const double wy = (x.y == 0.0 || x.y == 4.0) ? ((x.x == 0.0 || x.x == 4.0) ? 0.5 * h : h) : 0;
    if (x.x == 0.0) fx = l.dp * wx;
    if (x.x == 4.0) fx = -l.dp * wx;
    if (x.y == 0.0) fy = l.dp * wy;
    if (x.y == 4.0) fy = -l.dp * wy;
    EXPECT_NEAR(r.u[2 * n], fx, 1e-9 * l.dp) << x.x << "," << x.y;
    EXPECT_NEAR(r.u[2 * n + 1], fy, 1e-9 * l.dp) << x.x << "," << x.y;
  }
}

TEST(Assembly, StiffnessMatchesIndependentPlaneStrainElement) {
  for (SplitMode split : {SplitMode::none, SplitMode::voldev}) {
    const QuadMesh m = QuadMesh::uniform(2.0, 1);
    const DofMap d(m);
    auto p = test_params(split);
    p.kappa_reg = 0.0;
    const Assembler as(m, d, BoundarySpec::all_clamped(), p);
    std::vector<double> u(d.n_u(), 0.0), phi(d.n_phi(), 1.0);
    const auto sys = as.assemble_jacobian({u, phi, phi}, LoadState{});
    const auto ke = reference_element_stiffness(1.5e10, 0.15, 1.0);
    std::vector<double> k(d.n_u() * d.n_u(), 0.0);
    for (int leaf : m.leaves()) {
      const auto& c = m.cell(leaf);
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
          for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
              const int r = 2 * d.node_of_vertex(c.vertices[a]) + i;
              const int s = 2 * d.node_of_vertex(c.vertices[b]) + j;
              k[r * d.n_u() + s] += ke[2 * a + i][2 * b + j];
            }
    }
    const double scale = max_abs(k);
    for (int r = 0; r < d.n_u(); ++r)
      for (int s = 0; s < d.n_u(); ++s)
        ASSERT_NEAR(sys.uu.get(r, s), k[r * d.n_u() + s], 1e-12 * scale) << r << "," << s;
  }
}

TEST(Assembly, ResidualIsNegativeEnergyGradient) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  BoundarySpec bc;
  bc.clamped = {true, false, true, false};
  bc.traction[1] = {2.0e5, -1.0e5};
  bc.traction[3] = {0.0, 4.0e5};
  for (SplitMode split : {SplitMode::none, SplitMode::voldev}) {
    const Assembler as(m, d, bc, test_params(split));
    const auto loads = test_loads();
    Fields f = random_fields(d, 11, 1e-3);
    const auto r = flat_rhs(as.assemble_residual(f.view(), loads));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> du(d.n_u()), dphi(d.n_phi());
      for (auto& x : du) x = 1e-3 * uni(rng);
      for (auto& x : dphi) x = 0.1 * uni(rng);
      const double step = 1e-5;
      auto energy_at = [&](double s) {
        std::vector<double> u = f.u, phi = f.phi;
        axpy(s, du, u);
        axpy(s, dphi, phi);
        return as.energy(u, phi, loads).total();
      };
      const double fd = (energy_at(step) - energy_at(-step)) / (2 * step);
      double an = 0.0;
      for (int i = 0; i < d.n_u(); ++i) an -= r[i] * du[i];
      for (int i = 0; i < d.n_phi(); ++i) an -= r[d.n_u() + i] * dphi[i];
      EXPECT_NEAR(fd, an, 1e-6 * std::abs(an)) << "trial " << trial;
    }
  }
}

TEST(Assembly, JacobianMatchesFiniteDifferences) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  for (SplitMode split : {SplitMode::none, SplitMode::voldev}) {
    const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(split));
    const auto loads = test_loads();
    Fields f = random_fields(d, 5, 1e-3);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uni(-0.1, 1.0);
    for (auto& x : f.phi_tilde) x = uni(rng);  // includes negative extrapolations
    const auto sys = as.assemble_jacobian(f.view(), loads);
    std::uniform_real_distribution<double> dir(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x(d.n_total());
      for (int i = 0; i < d.n_u(); ++i) x[i] = 1e-3 * dir(rng);
      for (int i = d.n_u(); i < d.n_total(); ++i) x[i] = 0.1 * dir(rng);
      std::vector<double> mx(d.n_total());
      sys.multiply(x, mx);
      const double step = 1e-6;
      auto rhs_at = [&](double s) {
        Fields g = f;
        for (int i = 0; i < d.n_u(); ++i) g.u[i] += s * x[i];
        for (int i = 0; i < d.n_phi(); ++i) g.phi[i] += s * x[d.n_u() + i];
        return flat_rhs(as.assemble_residual(g.view(), loads));
      };
      const auto rp = rhs_at(step), rm = rhs_at(-step);
      std::vector<double> fd(d.n_total());
      for (int i = 0; i < d.n_total(); ++i) fd[i] = -(rp[i] - rm[i]) / (2 * step);
      std::vector<double> diff = fd;
      axpy(-1.0, mx, diff);
      EXPECT_LE(norm2(diff), 1e-5 * norm2(mx)) << "trial " << trial;
    }
  }
}

TEST(Assembly, BlocksAreSymmetric) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  Fields f = random_fields(d, 2, 1e-3);
  const auto sys = as.assemble_jacobian(f.view(), test_loads());
  EXPECT_TRUE(sys.uu.is_symmetric(1e-12));
  EXPECT_TRUE(sys.phiphi.is_symmetric(1e-12));
}

TEST(Assembly, CouplingBlockVanishesForUnloadedUndeformedState) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  std::vector<double> u(d.n_u(), 0.0), phi(d.n_phi(), 0.7);
  const auto sys = as.assemble_jacobian({u, phi, phi}, LoadState{});
  EXPECT_EQ(max_abs(sys.phiu.values), 0.0);
}

TEST(Assembly, LumpedMassOnUniformMesh) {
  const QuadMesh m = QuadMesh::uniform(4.0, 2);
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  const auto mass = as.lumped_mass();
  double total = 0.0;
  for (int n = 0; n < d.n_nodes(); ++n) {
    const Vec2 x = m.vertex(d.vertex_of_node(n));
    const int on_edge = (x.x == 0.0 || x.x == 4.0) + (x.y == 0.0 || x.y == 4.0);
    const double expected = on_edge == 0 ? 1.0 : (on_edge == 1 ? 0.5 : 0.25);
    EXPECT_DOUBLE_EQ(mass[n], expected);
    total += mass[n];
  }
  EXPECT_DOUBLE_EQ(total, 16.0);
}

TEST(Assembly, LumpedMassIntegratesTheDomainWithHangingNodes) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  const auto mass = as.lumped_mass();
  double total = 0.0;
  for (double x : mass) total += x;
  EXPECT_NEAR(total, 64.0, 1e-12);
}

TEST(Assembly, SerialAndParallelAreBitwiseIdentical) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  Fields f = random_fields(d, 8, 1e-3);
  const auto a = as.assemble_jacobian(f.view(), test_loads(), Execution::serial);
  const auto b = as.assemble_jacobian(f.view(), test_loads(), Execution::parallel);
  EXPECT_EQ(a.uu.values, b.uu.values);
  EXPECT_EQ(a.phiu.values, b.phiu.values);
  EXPECT_EQ(a.phiphi.values, b.phiphi.values);
  EXPECT_EQ(a.rhs_u, b.rhs_u);
  EXPECT_EQ(a.rhs_phi, b.rhs_phi);
}

TEST(Assembly, ClampedBoundaryDofs) {
  const QuadMesh m = QuadMesh::uniform(4.0, 2);
  const DofMap d(m);
  const Assembler all(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  EXPECT_EQ(all.dirichlet_u_dofs().size(), 2u * 16u);
  BoundarySpec left_only;
  left_only.clamped = {true, false, false, false};
  const Assembler left(m, d, left_only, test_params(SplitMode::voldev));
  EXPECT_EQ(left.dirichlet_u_dofs().size(), 2u * 5u);
}

TEST(Constraints, AreIdempotentAndProduceIdentityRows) {
  const QuadMesh m = hanging_mesh();
  const DofMap d(m);
  const Assembler as(m, d, BoundarySpec::all_clamped(), test_params(SplitMode::voldev));
  Fields f = random_fields(d, 4, 1e-3);
  BlockSystem sys = as.assemble_jacobian(f.view(), test_loads());
  ConstraintSet c;
  c.dirichlet_u = as.dirichlet_u_dofs();
  c.active_phi = {3, 10, 20};
  c.active_values = {-0.1, 0.0, 0.25};
  apply_constraints(sys, c);
  const BlockSystem once = sys;
  apply_constraints(sys, c);
  EXPECT_EQ(sys.uu.values, once.uu.values);
  EXPECT_EQ(sys.phiphi.values, once.phiphi.values);
  EXPECT_EQ(sys.phiu.values, once.phiu.values);
  EXPECT_EQ(sys.rhs_phi, once.rhs_phi);
  EXPECT_TRUE(sys.uu.is_symmetric(1e-12));
  EXPECT_TRUE(sys.phiphi.is_symmetric(1e-12));
  for (int dof : c.dirichlet_u) {
    EXPECT_EQ(sys.uu.get(dof, dof), 1.0);
    EXPECT_EQ(sys.rhs_u[dof], 0.0);
  }
  for (std::size_t k = 0; k < c.active_phi.size(); ++k) {
    const int i = c.active_phi[k];
    EXPECT_EQ(sys.phiphi.get(i, i), 1.0);
    EXPECT_EQ(sys.rhs_phi[i], c.active_values[k]);
    for (int j = sys.phiu.row_ptr[i]; j < sys.phiu.row_ptr[i + 1]; ++j) {
      EXPECT_EQ(sys.phiu.values[j], 0.0);
    }
  }
  BlockResidual r{std::vector<double>(d.n_u(), 1.0), std::vector<double>(d.n_phi(), 1.0)};
  mask_residual(r, c);
  EXPECT_EQ(r.phi[10], 0.0);
  EXPECT_EQ(r.phi[11], 1.0);
  EXPECT_EQ(r.u[c.dirichlet_u.front()], 0.0);
}

TEST(Constraints, RejectMismatchedActiveValues) {
  BlockSystem sys;
  ConstraintSet c;
  c.active_phi = {1};
  EXPECT_THROW(apply_constraints(sys, c), std::invalid_argument);
}

TEST(Extrapolation, IsLinearInTime) {
  const std::vector<double> a{1.0, 0.5, 0.0}, b{1.0, 0.75, 0.25};
  const auto e = extrapolate_phase(a, b, 2.0, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(e[0], 1.0);
  EXPECT_DOUBLE_EQ(e[1], 0.25);
  EXPECT_DOUBLE_EQ(e[2], -0.25);
  EXPECT_THROW(extrapolate_phase(a, b, 1.0, 1.0, 2.0), std::invalid_argument);
}

TEST(Energy, UniformDilationStoresTwiceBulkTimesStrainSquared) {
  const double a = 4.0, e = 1e-4;
  const QuadMesh m = generate_uniform(a, 3);
  const DofMap d(m);
  for (SplitMode split : {SplitMode::none, SplitMode::voldev}) {
    const auto p = test_params(split);
    const Assembler as(m, d, BoundarySpec::all_clamped(), p);
    std::vector<double> u(d.n_u()), phi(d.n_phi(), 1.0);
    for (int n = 0; n < d.n_nodes(); ++n) {
      const Vec2 x = m.vertex(d.vertex_of_node(n));
      u[2 * n] = e * (x.x - a);
      u[2 * n + 1] = e * (x.y - a);
    }
    const double expected = 2.0 * p.elastic.bulk * e * e * (2 * a) * (2 * a);
    EXPECT_NEAR(as.energy(u, phi, LoadState{}).mechanical, expected, 1e-12 * expected);
  }
}

TEST(Energy, FracturePartOfOneDimensionalProfileIsToughnessTimesLength) {
  const double a = 100.0;
  const QuadMesh m = generate_uniform(a, 7);
  const DofMap d(m);
  auto p = test_params(SplitMode::voldev);
  p.eps = 4.0 * m.h_min();
  const Assembler as(m, d, BoundarySpec::all_clamped(), p);
  std::vector<double> u(d.n_u(), 0.0), phi(d.n_phi());
  for (int n = 0; n < d.n_nodes(); ++n) {
    phi[n] = 1.0 - std::exp(-std::abs(m.vertex(d.vertex_of_node(n)).y - a) / p.eps);
  }
  const double expected = p.fracture_toughness * 2.0 * a;
  EXPECT_NEAR(as.energy(u, phi, LoadState{}).fracture, expected, 0.03 * expected);
}

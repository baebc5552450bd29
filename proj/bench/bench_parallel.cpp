#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <vector>

#include "thermofrac/assembly.hpp"
#include "thermofrac/mesh.hpp"

using namespace thermofrac;

namespace {

struct Problem {
  QuadMesh mesh;
  DofMap dofs;
  Assembler assembler;
  std::vector<double> u, phi;

  explicit Problem(int level)
      : mesh(generate_uniform(100.0, level)),
        dofs(mesh),
        assembler(mesh, dofs, BoundarySpec::all_clamped(),
                  PhysicsParams::from_config(scenario_preset("case_d"))) {
    u.resize(dofs.n_u());
    phi.resize(dofs.n_phi());
    for (int n = 0; n < dofs.n_nodes(); ++n) {
      const Vec2 x = mesh.vertex(dofs.vertex_of_node(n));
      u[2 * n] = 1e-4 * std::sin(0.05 * x.x) * x.y;
      u[2 * n + 1] = 1e-4 * std::cos(0.03 * x.y) * x.x;
      phi[n] = 0.5 + 0.5 * std::tanh((std::abs(x.y - 100.0) - 5.0) / 3.0);
    }
  }

  LoadState loads() const {
    LoadState l;
    l.dp = 3.7e6;
    l.dtheta = -220.0;
    l.c_theta = 5e4;
    return l;
  }
};

Problem& problem() {
  static Problem p(8);
  return p;
}

Execution mode(const benchmark::State& state) {
  const int threads = static_cast<int>(state.range(0));
  omp_set_num_threads(threads);
  return threads > 1 ? Execution::parallel : Execution::serial;
}

void BM_AssembleJacobian(benchmark::State& state) {
  auto& p = problem();
  const Execution exec = mode(state);
  for (auto _ : state) {
    auto sys = p.assembler.assemble_jacobian({p.u, p.phi, p.phi}, p.loads(), exec);
    benchmark::DoNotOptimize(sys.uu.values.data());
  }
  state.counters["cells"] = p.mesh.n_leaves();
}

void BM_AssembleResidual(benchmark::State& state) {
  auto& p = problem();
  const Execution exec = mode(state);
  for (auto _ : state) {
    auto r = p.assembler.assemble_residual({p.u, p.phi, p.phi}, p.loads(), exec);
    benchmark::DoNotOptimize(r.u.data());
  }
}

void BM_SpMV(benchmark::State& state) {
  auto& p = problem();
  const Execution exec = mode(state);
  const auto sys = p.assembler.assemble_jacobian({p.u, p.phi, p.phi}, p.loads());
  std::vector<double> y(sys.uu.rows);
  for (auto _ : state) {
    sys.uu.multiply(p.u, y, exec);
    benchmark::DoNotOptimize(y.data());
  }
  state.counters["nnz"] = sys.uu.nnz();
}

}  // namespace

BENCHMARK(BM_AssembleJacobian)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleResidual)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SpMV)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();

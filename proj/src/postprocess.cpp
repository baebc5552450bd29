#include "thermofrac/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "thermofrac/physics.hpp"

namespace thermofrac {

namespace {

void check_sizes(const QuadMesh& mesh, const VertexFields& f) {
  const auto n = static_cast<std::size_t>(mesh.n_vertices());
  if (f.ux.size() != n || f.uy.size() != n || f.phi.size() != n) {
    throw std::invalid_argument("postprocess: field size does not match the mesh");
  }
}

// u . grad(phi) of the bilinear interpolants of one leaf at local (s, t).
double cod_integrand(const QuadMesh& mesh, const VertexFields& f, int leaf, double s, double t) {
  const auto& v = mesh.cell(leaf).vertices;
  const double h = mesh.cell_size(leaf);
  const std::array<double, 4> n{(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
  double ux = 0.0, uy = 0.0;
  for (int a = 0; a < 4; ++a) {
    ux += n[a] * f.ux[v[a]];
    uy += n[a] * f.uy[v[a]];
  }
  const double p0 = f.phi[v[0]], p1 = f.phi[v[1]], p2 = f.phi[v[2]], p3 = f.phi[v[3]];
  const double dpx = ((1 - t) * (p1 - p0) + t * (p2 - p3)) / h;
  const double dpy = ((1 - s) * (p3 - p0) + s * (p2 - p1)) / h;
  return ux * dpx + uy * dpy;
}

}  // namespace

double cod_at(const QuadMesh& mesh, const VertexFields& f, double x0) {
  check_sizes(mesh, f);
  const double L = mesh.domain_size();
  if (x0 < 0.0 || x0 > L) throw DomainError("cod_at: abscissa outside the domain");
  const double step_max = 0.5 * mesh.h_min();
  double y = 0.0;
  double total = 0.0;
  while (y < L) {
    const int leaf = mesh.locate({x0, y});
    const Vec2 o = mesh.cell_origin(leaf);
    const double h = mesh.cell_size(leaf);
    const double s = std::clamp((x0 - o.x) / h, 0.0, 1.0);
    const int m = std::max(1, static_cast<int>(std::ceil(h / step_max - 1e-9)));
    double acc = 0.5 * (cod_integrand(mesh, f, leaf, s, 0.0) + cod_integrand(mesh, f, leaf, s, 1.0));
    for (int k = 1; k < m; ++k) acc += cod_integrand(mesh, f, leaf, s, static_cast<double>(k) / m);
    total += acc * h / m;
    y = o.y + h;
  }
  return total;
}

std::vector<CodSample> cod_profile(const QuadMesh& mesh, const VertexFields& f, double x_begin,
                                   double x_end, int n) {
  if (n < 2) throw std::invalid_argument("cod_profile: need at least two samples");
  std::vector<CodSample> out(n);
  for (int k = 0; k < n; ++k) {
    const double x = x_begin + (x_end - x_begin) * k / (n - 1);
    out[k] = {x, cod_at(mesh, f, x)};
  }
  return out;
}

double crack_length(const QuadMesh& mesh, std::span<const double> phi, double y0) {
  if (phi.size() != static_cast<std::size_t>(mesh.n_vertices())) {
    throw std::invalid_argument("crack_length: field size does not match the mesh");
  }
  const double L = mesh.domain_size();
  const double step = 0.5 * mesh.h_min();
  const int n = static_cast<int>(std::llround(L / step));
  int count = 0;
  for (int k = 0; k < n; ++k) {
    if (interpolate(mesh, phi, {(k + 0.5) * step, y0}) <= 0.5) ++count;
  }
  return count * step;
}

std::vector<double> tensile_indicator(const QuadMesh& mesh, const VertexFields& f) {
  check_sizes(mesh, f);
  constexpr double g = 0.21132486540518711775;
  std::vector<double> out;
  out.reserve(mesh.n_leaves());
  for (int leaf : mesh.leaves()) {
    const auto& v = mesh.cell(leaf).vertices;
    const double h = mesh.cell_size(leaf);
    double acc = 0.0;
    for (double t : {g, 1.0 - g}) {
      for (double s : {g, 1.0 - g}) {
        const double exx = ((1 - t) * (f.ux[v[1]] - f.ux[v[0]]) + t * (f.ux[v[2]] - f.ux[v[3]])) / h;
        const double eyy = ((1 - s) * (f.uy[v[3]] - f.uy[v[0]]) + s * (f.uy[v[2]] - f.uy[v[1]])) / h;
        acc += heaviside_plus(exx + eyy);
      }
    }
    out.push_back(0.25 * acc);
  }
  return out;
}

void write_vtk(const std::filesystem::path& path, const QuadMesh& mesh, const VertexFields& f) {
  check_sizes(mesh, f);
  std::FILE* fp = std::fopen(path.string().c_str(), "w");
  if (!fp) throw std::runtime_error("write_vtk: cannot open " + path.string());
  const int nv = mesh.n_vertices();
  const int nc = mesh.n_leaves();
  std::fprintf(fp, "# vtk DataFile Version 3.0\nthermofrac solution\nASCII\n");
  std::fprintf(fp, "DATASET UNSTRUCTURED_GRID\nPOINTS %d double\n", nv);
  for (int v = 0; v < nv; ++v) {
    const Vec2 p = mesh.vertex(v);
    std::fprintf(fp, "%.17g %.17g 0\n", p.x, p.y);
  }
  std::fprintf(fp, "CELLS %d %d\n", nc, 5 * nc);
  for (int leaf : mesh.leaves()) {
    const auto& c = mesh.cell(leaf).vertices;
    std::fprintf(fp, "4 %d %d %d %d\n", c[0], c[1], c[2], c[3]);
  }
  std::fprintf(fp, "CELL_TYPES %d\n", nc);
  for (int k = 0; k < nc; ++k) std::fprintf(fp, "9\n");
  std::fprintf(fp, "POINT_DATA %d\nVECTORS displacement double\n", nv);
  for (int v = 0; v < nv; ++v) std::fprintf(fp, "%.17g %.17g 0\n", f.ux[v], f.uy[v]);
  std::fprintf(fp, "SCALARS phi double 1\nLOOKUP_TABLE default\n");
  for (int v = 0; v < nv; ++v) std::fprintf(fp, "%.17g\n", f.phi[v]);
  std::fprintf(fp, "CELL_DATA %d\nSCALARS theta_u double 1\nLOOKUP_TABLE default\n", nc);
  for (double t : tensile_indicator(mesh, f)) std::fprintf(fp, "%.17g\n", t);
  std::fprintf(fp, "SCALARS level int 1\nLOOKUP_TABLE default\n");
  for (int leaf : mesh.leaves()) std::fprintf(fp, "%d\n", mesh.cell(leaf).level);
  const bool ok = std::fclose(fp) == 0;
  if (!ok) throw std::runtime_error("write_vtk: failed writing " + path.string());
}

std::string format_timeseries_row(const TimeseriesRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%d", r.step, r.time,
                r.max_cod, r.crack_length, r.e_mech, r.e_frac, r.newton_iters, r.gmres_avg,
                r.active_set_size);
  return buf;
}

void write_csv(const std::filesystem::path& path, std::span<const TimeseriesRow> rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  out << kTimeseriesHeader << '\n';
  for (const auto& r : rows) out << format_timeseries_row(r) << '\n';
  if (!out) throw std::runtime_error("write_csv: failed writing " + path.string());
}

}  // namespace thermofrac

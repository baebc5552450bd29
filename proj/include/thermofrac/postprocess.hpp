#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "thermofrac/mesh.hpp"
#include "thermofrac/params.hpp"

namespace thermofrac {

/// Full-vertex fields of a solution snapshot.
struct VertexFields {
  std::span<const double> ux;
  std::span<const double> uy;
  std::span<const double> phi;
};

/// Crack opening displacement at x0: the line integral of u . grad(phi)
/// along the vertical line x = x0 across the whole domain.
double cod_at(const QuadMesh& mesh, const VertexFields& f, double x0);

struct CodSample {
  double x = 0.0;
  double cod = 0.0;
};

/// COD at n equally spaced abscissae in [x_begin, x_end].
std::vector<CodSample> cod_profile(const QuadMesh& mesh, const VertexFields& f, double x_begin,
                                   double x_end, int n);

/// Length of the set {phi <= 0.5} on the line y = y0, sampled at h_min / 2.
double crack_length(const QuadMesh& mesh, std::span<const double> phi, double y0);

/// Cell-averaged indicator of tensile volumetric strain, one value per leaf.
std::vector<double> tensile_indicator(const QuadMesh& mesh, const VertexFields& f);

/// Legacy ASCII VTK unstructured grid with displacement, phase field and the
/// tensile indicator.
void write_vtk(const std::filesystem::path& path, const QuadMesh& mesh, const VertexFields& f);

struct TimeseriesRow {
  int step = 0;
  double time = 0.0;
  double max_cod = 0.0;
  double crack_length = 0.0;
  double e_mech = 0.0;
  double e_frac = 0.0;
  int newton_iters = 0;
  double gmres_avg = 0.0;
  int active_set_size = 0;
};

inline constexpr const char* kTimeseriesHeader =
    "step,time,max_cod,crack_length,E_mech,E_frac,newton_iters,gmres_avg,active_set_size";

std::string format_timeseries_row(const TimeseriesRow& row);
void write_csv(const std::filesystem::path& path, std::span<const TimeseriesRow> rows);

}  // namespace thermofrac

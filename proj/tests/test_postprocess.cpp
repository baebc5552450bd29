#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "thermofrac/analytic.hpp"
#include "thermofrac/mesh.hpp"
#include "thermofrac/postprocess.hpp"
#include "thermofrac/thermal.hpp"

using namespace thermofrac;

namespace {

struct Snapshot {
  std::vector<double> ux, uy, phi;
  VertexFields view() const { return {ux, uy, phi}; }
};

// Opening w across y = a with an exponential phase-field profile of width eps.
Snapshot manufactured_opening(const QuadMesh& m, double a, double w, double eps) {
  Snapshot s;
  const int n = m.n_vertices();
  s.ux.assign(n, 0.0);
  s.uy.resize(n);
  s.phi.resize(n);
  for (int v = 0; v < n; ++v) {
    const double dy = m.vertex(v).y - a;
    s.uy[v] = dy > 0 ? 0.5 * w : (dy < 0 ? -0.5 * w : 0.0);
    s.phi[v] = 1.0 - std::exp(-std::abs(dy) / eps);
  }
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("thermofrac_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST(Cod, VanishesForZeroDisplacement) {
  const QuadMesh m = generate_uniform(100.0, 4);
  Snapshot s = manufactured_opening(m, 100.0, 0.0, 10.0);
  EXPECT_EQ(cod_at(m, s.view(), 100.0), 0.0);
}

TEST(Cod, MatchesExactIntegralOfDiscreteOpening) {
  const double a = 100.0, w = 3.0e-3;
  const QuadMesh m = generate_uniform(a, 7);
  const double h = m.h_min();
  const double eps = 4.0 * h;
  const Snapshot s = manufactured_opening(m, a, w, eps);
  // Along a vertical line both u_y and phi are piecewise linear in y, so the
  // integral of u_y dphi/dy is exact cell by cell.
  double exact = 0.0;
  for (int j = 0; j < 128; ++j) {
    const double y0 = j * h - a, y1 = (j + 1) * h - a;
    auto uy = [&](double dy) { return dy > 0 ? 0.5 * w : (dy < 0 ? -0.5 * w : 0.0); };
    auto ph = [&](double dy) { return 1.0 - std::exp(-std::abs(dy) / eps); };
    exact += (ph(y1) - ph(y0)) * 0.5 * (uy(y0) + uy(y1));
  }
  for (double x : {100.0, 37.3, 150.0}) {
    EXPECT_NEAR(cod_at(m, s.view(), x), exact, 1e-12 * w) << "x = " << x;
  }
  EXPECT_THROW(cod_at(m, s.view(), -1.0), DomainError);
  EXPECT_THROW(cod_at(m, s.view(), 201.0), DomainError);
}

TEST(Cod, ApproachesOpeningAsProfileIsResolved) {
  const double a = 100.0, w = 3.0e-3;
  const QuadMesh m = generate_uniform(a, 8);
  double prev = 1.0;
  for (double ratio : {4.0, 8.0, 16.0}) {
    const Snapshot s = manufactured_opening(m, a, w, ratio * m.h_min());
    const double err = std::abs(cod_at(m, s.view(), a) - w) / w;
    EXPECT_LT(err, prev);
    EXPECT_LT(err, 0.6 / ratio);
    prev = err;
  }
}

TEST(Cod, ProfileSamplesEndpointsInclusive) {
  const QuadMesh m = generate_uniform(100.0, 5);
  const Snapshot s = manufactured_opening(m, 100.0, 1e-3, 12.5);
  const auto prof = cod_profile(m, s.view(), 90.0, 110.0, 5);
  ASSERT_EQ(prof.size(), 5u);
  EXPECT_DOUBLE_EQ(prof.front().x, 90.0);
  EXPECT_DOUBLE_EQ(prof[2].x, 100.0);
  EXPECT_DOUBLE_EQ(prof.back().x, 110.0);
  EXPECT_NEAR(prof[2].cod, cod_at(m, s.view(), 100.0), 1e-18);
  EXPECT_THROW(cod_profile(m, s.view(), 0.0, 1.0, 1), std::invalid_argument);
}

TEST(CrackLength, MeasuresZeroBandOnTheCrackLine) {
  const double a = 100.0;
  const QuadMesh m = generate_uniform(a, 6);
  const double h = m.h_min();
  std::vector<double> phi(m.n_vertices(), 1.0);
  for (int v = 0; v < m.n_vertices(); ++v) {
    const Vec2 p = m.vertex(v);
    if (std::abs(p.x - a) <= 25.0 && std::abs(p.y - a) <= h) phi[v] = 0.0;
  }
  // Vertices at |x - a| <= 25 lie on the grid 0, h, ..., so the zero set spans
  // 2 * floor(25 / h) h plus up to h of the interpolated ramps.
  const double core = 2.0 * std::floor(25.0 / h) * h;
  const double len = crack_length(m, phi, a);
  EXPECT_GE(len, core - 1e-12);
  EXPECT_LE(len, core + h + 1e-12);
  EXPECT_EQ(crack_length(m, std::vector<double>(m.n_vertices(), 1.0), a), 0.0);
}

TEST(TensileIndicator, SeparatesDilationFromCompression) {
  const QuadMesh m = QuadMesh::uniform(4.0, 2);
  Snapshot s;
  s.phi.assign(m.n_vertices(), 1.0);
  for (double sign : {1.0, -1.0}) {
    s.ux.resize(m.n_vertices());
    s.uy.resize(m.n_vertices());
    for (int v = 0; v < m.n_vertices(); ++v) {
      s.ux[v] = sign * 1e-3 * m.vertex(v).x;
      s.uy[v] = sign * 1e-3 * m.vertex(v).y;
    }
    const auto t = tensile_indicator(m, s.view());
    ASSERT_EQ(static_cast<int>(t.size()), m.n_leaves());
    for (double x : t) EXPECT_EQ(x, sign > 0 ? 1.0 : 0.0);
  }
}

TEST(Vtk, RoundTripsFieldsAndTopology) {
  QuadMesh m = QuadMesh::uniform(8.0, 2);
  m = m.refine(std::vector<int>{m.locate({1.0, 1.0})}).first;
  Snapshot s;
  for (int v = 0; v < m.n_vertices(); ++v) {
    const Vec2 p = m.vertex(v);
    s.ux.push_back(1e-4 * p.x + 1.0 / 3.0);
    s.uy.push_back(-2e-4 * p.y);
    s.phi.push_back(std::sin(p.x) * 0.5 + 0.5);
  }
  const auto dir = temp_dir("vtk");
  const auto file = dir / "snap.vtk";
  write_vtk(file, m, s.view());

  std::ifstream in(file);
  std::string line, word;
  int n_points = -1, n_cells = -1;
  std::vector<double> phi_read, ux_read, theta_read;
  std::vector<int> levels;
  while (std::getline(in >> std::ws, line)) {
    std::istringstream ls(line);
    word.clear();
    ls >> word;
    if (word == "POINTS") {
      ls >> n_points;
      for (int i = 0; i < n_points; ++i) std::getline(in, line);
    } else if (word == "CELLS") {
      ls >> n_cells;
      for (int i = 0; i < n_cells; ++i) {
        std::getline(in, line);
        std::istringstream cs(line);
        int k;
        cs >> k;
        EXPECT_EQ(k, 4);
      }
    } else if (word == "CELL_TYPES") {
      for (int i = 0; i < n_cells; ++i) {
        std::getline(in, line);
        EXPECT_EQ(line, "9");
      }
    } else if (word == "VECTORS") {
      for (int i = 0; i < n_points; ++i) {
        double x, y, z;
        in >> x >> y >> z;
        ux_read.push_back(x);
      }
    } else if (word == "SCALARS") {
      std::string name;
      ls >> name;
      std::getline(in, line);  // LOOKUP_TABLE
      if (name == "phi") {
        phi_read.resize(n_points);
        for (auto& x : phi_read) in >> x;
      } else if (name == "theta_u") {
        theta_read.resize(n_cells);
        for (auto& x : theta_read) in >> x;
      } else if (name == "level") {
        levels.resize(n_cells);
        for (auto& x : levels) in >> x;
      }
    }
  }
  EXPECT_EQ(n_points, m.n_vertices());
  EXPECT_EQ(n_cells, m.n_leaves());
  EXPECT_EQ(phi_read, s.phi);
  EXPECT_EQ(ux_read, s.ux);
  EXPECT_EQ(theta_read.size(), static_cast<std::size_t>(m.n_leaves()));
  ASSERT_EQ(levels.size(), static_cast<std::size_t>(m.n_leaves()));
  EXPECT_EQ(*std::max_element(levels.begin(), levels.end()), 3);
  std::filesystem::remove_all(dir);
}

TEST(Csv, HeaderAndRowFormat) {
  TimeseriesRow r;
  r.step = 3;
  r.time = 0.1;
  r.max_cod = 1.0 / 3.0;
  r.crack_length = 20.0;
  r.newton_iters = 7;
  r.gmres_avg = 12.5;
  r.active_set_size = 42;
  const std::string s = format_timeseries_row(r);
  EXPECT_EQ(s, "3,0.10000000000000001,0.33333333333333331,20,0,0,7,12.5,42");
  const auto dir = temp_dir("csv");
  const std::vector<TimeseriesRow> rows{r, r};
  write_csv(dir / "ts.csv", rows);
  std::ifstream in(dir / "ts.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kTimeseriesHeader);
  int n = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(line, s);
    ++n;
  }
  EXPECT_EQ(n, 2);
  std::filesystem::remove_all(dir);
}

TEST(Analytic, CentreOpeningOfCaseA) {
  const Config cfg = scenario_preset("case_a");
  const double load = cfg.loads.p_bar - cfg.loads.p0;
  const double E = cfg.material.youngs_modulus, nu = cfg.material.poisson_ratio;
  const double w = cod_analytic_2d(0.0, cfg.geometry.l0, E, nu, load);
  EXPECT_NEAR(w, 1.30333e-9, 1e-14);
  EXPECT_NEAR(w, 2.0 * (1 - nu * nu) * cfg.geometry.l0 / E * load, 1e-24);
}

TEST(Analytic, EllipticProfileAndSupport) {
  const double l0 = 10.0, E = 1.5e10, nu = 0.15, p = 1e6;
  const double w0 = cod_analytic_2d(0.0, l0, E, nu, p);
  EXPECT_NEAR(cod_analytic_2d(6.0, l0, E, nu, p), 0.8 * w0, 1e-15 * w0);
  EXPECT_NEAR(cod_analytic_2d(-6.0, l0, E, nu, p), 0.8 * w0, 1e-15 * w0);
  EXPECT_EQ(cod_analytic_2d(10.0, l0, E, nu, p), 0.0);
  EXPECT_EQ(cod_analytic_2d(12.0, l0, E, nu, p), 0.0);
  EXPECT_THROW(cod_analytic_2d(0.0, l0, -1.0, nu, p), DomainError);
  EXPECT_THROW(cod_analytic_2d(0.0, l0, E, 0.5, p), DomainError);
  EXPECT_THROW(cod_analytic_2d(0.0, 0.0, E, nu, p), DomainError);
}

TEST(Analytic, PennyShapedToPlaneStrainRatio) {
  for (double x : {0.0, 3.0, 9.0}) {
    const double w2 = cod_analytic_2d(x, 10.0, 1.5e10, 0.15, 2e6);
    EXPECT_NEAR(cod_analytic_3d(x, 10.0, 1.5e10, 0.15, 2e6), 2.0 / kPi * w2, 1e-15 * w2);
  }
}

TEST(Analytic, EffectiveLoad) {
  EXPECT_DOUBLE_EQ(effective_load(5.0, 2.0, 0.0, 10.0, 20.0), 3.0);
  EXPECT_DOUBLE_EQ(effective_load(5.0, 2.0, 0.5, 10.0, 20.0), 8.0);
}

TEST(Analytic, WidthSeriesOfCoolingCase) {
  const Config cfg = scenario_preset("case_c");
  const auto series = max_width_series(cfg, false);
  ASSERT_EQ(static_cast<int>(series.size()), cfg.model.n_steps + 1);
  const double E = cfg.material.youngs_modulus, nu = cfg.material.poisson_ratio;
  for (const auto& s : series) {
    const double ct = thermal_coupling(s.time, cfg).c_theta;
    EXPECT_DOUBLE_EQ(s.pressure, cfg.loads.pressure(s.time, cfg.model.dt));
    EXPECT_DOUBLE_EQ(s.c_theta, ct);
    const double load = s.pressure - cfg.loads.p0 - ct * (cfg.loads.theta - cfg.loads.theta0);
    EXPECT_NEAR(s.max_width, 2 * (1 - nu * nu) * cfg.geometry.l0 / E * load,
                1e-12 * std::abs(s.max_width));
  }
  for (std::size_t k = 1; k < series.size(); ++k) {
    EXPECT_DOUBLE_EQ(series[k].time, k * cfg.model.dt);
    EXPECT_GE(series[k].max_width, series[k - 1].max_width);
  }
  const auto s3 = max_width_series(cfg, true);
  EXPECT_NEAR(s3.back().max_width, 2.0 / kPi * series.back().max_width,
              1e-15 * series.back().max_width);
}

TEST(Analytic, CoolingCaseWidthAfterOneYear) {
  const Config cfg = scenario_preset("case_c");
  const double t = 365.0 * 86400.0;
  const double ct = thermal_coupling(t, cfg).c_theta;
  EXPECT_NEAR(ct, 5.99e4, 5e-3 * 5.99e4);
  const double load = effective_load(cfg.loads.pressure(t, cfg.model.dt), cfg.loads.p0, ct,
                                     cfg.loads.theta, cfg.loads.theta0);
  const double w = cod_analytic_2d(0.0, cfg.geometry.l0, cfg.material.youngs_modulus,
                                   cfg.material.poisson_ratio, load);
  EXPECT_NEAR(w, 7.17e-3, 5e-3 * 7.17e-3);
}

#include "thermofrac/verification.hpp"

#include <cmath>
#include <string>

#include "thermofrac/analytic.hpp"
#include "thermofrac/thermal.hpp"

namespace thermofrac {

namespace {

bool is_time_series(std::string_view id) { return id == "c"; }

double analytic_width(const Config& cfg, double t, double x) {
  const auto& l = cfg.loads;
  const double c = l.lambda_theta_mode == ThermalMode::off ? 0.0 : thermal_coupling(t, cfg).c_theta;
  const double load = effective_load(l.pressure(t, cfg.model.dt), l.p0, c, l.theta, l.theta0);
  return cod_analytic_2d(x, cfg.geometry.l0, cfg.material.youngs_modulus,
                         cfg.material.poisson_ratio, load);
}

}  // namespace

Config verification_config(std::string_view case_id, int level) {
  if (case_id != "a" && case_id != "b" && case_id != "c") {
    throw ConfigError("case", 0, "unknown verification case '" + std::string(case_id) + "'");
  }
  Config cfg = scenario_preset("case_" + std::string(case_id));
  if (level < 1 || level + kVerifyLocalLevels > QuadMesh::kMaxLevel - 1) {
    throw ConfigError("levels", 0, "refinement level out of range");
  }
  cfg.model.initial_level = level;
  cfg.model.max_level = level + kVerifyLocalLevels;
  cfg.model.eps = 2.0 * cfg.geometry.domain_size() / static_cast<double>(1 << cfg.model.max_level);
  cfg.validate();
  return cfg;
}

VerifyOutcome run_verification(std::string_view case_id, int level, Execution exec,
                               const StepCallback& on_step) {
  const Config cfg = verification_config(case_id, level);
  Simulation sim(cfg, BoundarySpec::all_clamped(), exec);
  VerifyOutcome out;
  while (!sim.finished()) {
    StepResult r = sim.advance();
    out.series.push_back({r.row.time, r.row.max_cod, analytic_width(cfg, r.row.time, 0.0)});
    if (on_step) on_step(sim, r);
    out.steps.push_back(std::move(r));
  }
  const double t = sim.time();
  auto& row = out.row;
  row.level = level;
  row.h = sim.mesh().h_min();
  row.max_cod_num = out.series.back().num;
  row.max_cod_ana = out.series.back().ana;
  if (is_time_series(case_id)) {
    row.rel_err = 0.0;
    for (const auto& s : out.series) {
      row.rel_err = std::max(row.rel_err, std::abs(s.num - s.ana) / std::abs(s.ana));
    }
  } else {
    row.rel_err = std::abs(row.max_cod_num - row.max_cod_ana) / std::abs(row.max_cod_ana);
  }
  const double a = cfg.geometry.a;
  const double l0 = cfg.geometry.l0;
  const auto profile = cod_profile(sim.mesh(), sim.fields(), a - l0, a + l0, kVerifyProfileSamples);
  double num = 0.0, den = 0.0;
  for (const auto& p : profile) {
    const double ana = analytic_width(cfg, t, p.x - a);
    num += (p.cod - ana) * (p.cod - ana);
    den += ana * ana;
  }
  row.l2_profile_err = std::sqrt(num / den);
  return out;
}

bool verification_passed(std::string_view case_id, const std::vector<VerifyOutcome>& runs) {
  if (runs.empty()) return false;
  if (is_time_series(case_id)) {
    for (const auto& r : runs) {
      if (r.row.rel_err > kVerifySeriesRelErr) return false;
      for (std::size_t k = 1; k < r.series.size(); ++k) {
        if (!(r.series[k].num > r.series[k - 1].num)) return false;
      }
    }
    return true;
  }
  if (runs.back().row.rel_err > kVerifyMaxRelErr) return false;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (!(runs[k].row.rel_err < runs[k - 1].row.rel_err)) return false;
    if (!(runs[k].row.l2_profile_err < runs[k - 1].row.l2_profile_err)) return false;
  }
  return true;
}

}  // namespace thermofrac

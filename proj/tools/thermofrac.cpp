#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <string>

#include "thermofrac/analytic.hpp"
#include "thermofrac/params.hpp"
#include "thermofrac/postprocess.hpp"
#include "thermofrac/simulation.hpp"
#include "thermofrac/verification.hpp"

#ifndef THERMOFRAC_BUILD_ID
#define THERMOFRAC_BUILD_ID "unknown"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace thermofrac;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

void write_manifest(const fs::path& out, const Config& cfg, const json& steps,
                    const json& failure) {
  json m;
  m["build"] = THERMOFRAC_BUILD_ID;
  m["output_dir"] = fs::absolute(out).string();
  m["config"] = to_config_text(cfg);
  m["wall_seconds_per_step"] = steps;
  if (!failure.is_null()) m["failure"] = failure;
  std::ofstream f(out / "manifest.json");
  f << m.dump(2) << '\n';
}

Execution configure_threads(int threads) {
  omp_set_num_threads(threads);
  return threads > 1 ? Execution::parallel : Execution::serial;
}

int cmd_run(const std::string& config_path, const fs::path& out, int steps, int threads) {
  Config cfg;
  try {
    cfg = load_config(config_path);
    if (steps > 0) cfg.model.n_steps = steps;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    std::cerr << "cannot create output directory " << out << ": " << ec.message() << '\n';
    return kExitConfig;
  }
  const Execution exec = configure_threads(threads);
  json step_times = json::array();
  write_manifest(out, cfg, step_times, nullptr);

  std::vector<TimeseriesRow> rows;
  Simulation sim(cfg, BoundarySpec::all_clamped(), exec);
  while (!sim.finished()) {
    const auto start = std::chrono::steady_clock::now();
    StepResult r;
    try {
      r = sim.advance();
    } catch (const StepFailure& e) {
      const int failed = sim.step() + 1;
      std::cerr << "solver failure at step " << failed << ": " << e.what() << '\n';
      write_csv(out / "timeseries.csv", rows);
      write_manifest(out, cfg, step_times,
                     json{{"step", failed}, {"message", e.what()},
                          {"newton_iterations", e.report().iterations.size()}});
      return kExitSolver;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(r.row);
    char name[32];
    std::snprintf(name, sizeof name, "step_%05d.vtk", r.row.step);
    write_vtk(out / name, sim.mesh(), sim.fields());
    write_csv(out / "timeseries.csv", rows);
    step_times.push_back(secs);
    write_manifest(out, cfg, step_times, nullptr);
    std::cout << "step " << r.row.step << " t=" << r.row.time << " cod=" << r.row.max_cod
              << " length=" << r.row.crack_length << " newton=" << r.row.newton_iters
              << " gmres=" << r.row.gmres_avg << " cells=" << r.n_leaves << '\n';
  }
  return 0;
}

int parse_levels(const std::string& spec, int& lo, int& hi) {
  const auto colon = spec.find(':');
  try {
    if (colon == std::string::npos) {
      lo = hi = std::stoi(spec);
    } else {
      lo = std::stoi(spec.substr(0, colon));
      hi = std::stoi(spec.substr(colon + 1));
    }
  } catch (const std::exception&) {
    return kExitConfig;
  }
  return lo <= hi ? 0 : kExitConfig;
}

int cmd_verify(const std::string& case_id, const std::string& levels, const fs::path& out,
               int threads) {
  int lo = 0, hi = 0;
  if (parse_levels(levels, lo, hi) != 0) {
    std::cerr << "config error: invalid level range '" << levels << "'\n";
    return kExitConfig;
  }
  try {
    for (int l = lo; l <= hi; ++l) verification_config(case_id, l);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  std::error_code ec;
  fs::create_directories(out, ec);
  const Execution exec = configure_threads(threads);
  std::vector<VerifyOutcome> runs;
  for (int l = lo; l <= hi; ++l) {
    try {
      runs.push_back(run_verification(case_id, l, exec));
    } catch (const StepFailure& e) {
      std::cerr << "solver failure at level " << l << ": " << e.what() << '\n';
      return kExitSolver;
    }
    const auto& r = runs.back().row;
    std::cout << "level " << l << " h=" << r.h << " cod=" << r.max_cod_num
              << " analytic=" << r.max_cod_ana << " rel_err=" << r.rel_err
              << " l2=" << r.l2_profile_err << '\n';
  }
  std::ofstream csv(out / "verify.csv");
  csv << "level,h,max_cod_num,max_cod_ana,rel_err,l2_profile_err\n";
  char buf[256];
  for (const auto& run : runs) {
    const auto& r = run.row;
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.level, r.h,
                  r.max_cod_num, r.max_cod_ana, r.rel_err, r.l2_profile_err);
    csv << buf;
  }
  return verification_passed(case_id, runs) ? 0 : 1;
}

int cmd_analytic(const std::string& case_id, double t_end, const fs::path& out) {
  Config cfg;
  bool three_d = false;
  if (case_id == "a" || case_id == "b" || case_id == "c") {
    cfg = scenario_preset("case_" + case_id);
  } else if (case_id == "f") {
    cfg = scenario_preset("case_c");
    three_d = true;
  } else {
    std::cerr << "config error: unknown analytic case '" << case_id << "'\n";
    return kExitConfig;
  }
  if (t_end > 0.0) cfg.model.n_steps = static_cast<int>(std::llround(t_end / cfg.model.dt));
  std::error_code ec;
  fs::create_directories(out, ec);
  const auto series = max_width_series(cfg, three_d);
  std::ofstream csv(out / ("analytic_" + case_id + ".csv"));
  csv << "time,pressure,c_theta,max_width\n";
  char buf[256];
  for (const auto& s : series) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.time, s.pressure, s.c_theta,
                  s.max_width);
    csv << buf;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field simulator for pressurised, cooled fractures"};
  app.require_subcommand(1);

  std::string config_path;
  fs::path run_out = "out";
  int steps = 0;
  int threads = 1;
  auto* run = app.add_subcommand("run", "Run a scenario");
  run->add_option("--config", config_path, "Configuration file")->required();
  run->add_option("--out", run_out, "Output directory");
  run->add_option("--steps", steps, "Override the number of time steps")->check(CLI::PositiveNumber);
  run->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);

  std::string verify_case;
  std::string levels = "4:6";
  fs::path verify_out = ".";
  auto* verify = app.add_subcommand("verify", "Convergence study against the analytic widths");
  verify->add_option("--case", verify_case, "a, b or c")->required();
  verify->add_option("--levels", levels, "Level range L1:L2");
  verify->add_option("--out", verify_out, "Output directory");
  verify->add_option("--threads", threads, "OpenMP threads")->check(CLI::PositiveNumber);

  std::string analytic_case;
  double t_end = 0.0;
  fs::path analytic_out = ".";
  auto* analytic = app.add_subcommand("analytic", "Analytic width series");
  analytic->add_option("--case", analytic_case, "a, b, c or f")->required();
  analytic->add_option("--t-end", t_end, "End time in seconds");
  analytic->add_option("--out", analytic_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (*run) return cmd_run(config_path, run_out, steps, threads);
  if (*verify) return cmd_verify(verify_case, levels, verify_out, threads);
  return cmd_analytic(analytic_case, t_end, analytic_out);
}

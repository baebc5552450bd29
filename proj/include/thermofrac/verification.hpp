#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "thermofrac/params.hpp"
#include "thermofrac/simulation.hpp"

namespace thermofrac {

/// Scenario configuration for a convergence study: base uniform level
/// `level`, four further local levels around the crack and eps = 2 h_min.
Config verification_config(std::string_view case_id, int level);

struct VerifyRow {
  int level = 0;
  double h = 0.0;  // finest cell size
  double max_cod_num = 0.0;
  double max_cod_ana = 0.0;
  double rel_err = 0.0;
  double l2_profile_err = 0.0;
};

struct SeriesPoint {
  double time = 0.0;
  double num = 0.0;
  double ana = 0.0;
};

struct VerifyOutcome {
  VerifyRow row;
  std::vector<SeriesPoint> series;  // max COD per step
  std::vector<StepResult> steps;
};

using StepCallback = std::function<void(const Simulation&, const StepResult&)>;

/// Runs the scenario to completion and compares against the analytic widths.
/// For time series cases rel_err is the largest pointwise relative error.
VerifyOutcome run_verification(std::string_view case_id, int level,
                               Execution exec = Execution::serial,
                               const StepCallback& on_step = {});

/// Thresholds of the convergence studies: for stationary cases the finest
/// level is within 15% and both error measures decrease strictly with level;
/// for time series cases the numerical series increases monotonically and
/// stays within 20% pointwise.
bool verification_passed(std::string_view case_id, const std::vector<VerifyOutcome>& runs);

inline constexpr int kVerifyLocalLevels = 4;
inline constexpr int kVerifyProfileSamples = 41;
inline constexpr double kVerifyMaxRelErr = 0.15;
inline constexpr double kVerifySeriesRelErr = 0.20;

}  // namespace thermofrac

#pragma once

#include <string>
#include <vector>

#include "filtfit/estimators.hpp"
#include "filtfit/scenarios.hpp"

namespace filtfit {

/// Full experiment description: scenario, estimator/setup grid, solver knobs
/// and output locations. Parsed from a JSON file; any key can be overridden
/// from the command line with --key=value (dotted paths).
struct ExperimentConfig {
  Scenario scenario;
  std::vector<EstimatorKind> estimators = {EstimatorKind::ConUF};
  std::vector<SetupKind> setups = {SetupKind::L2};  // primal setup preset per run

  double r_bar = std::numeric_limits<double>::quiet_NaN();   // NaN = 2 dim(S)
  double lambda = std::numeric_limits<double>::quiet_NaN();  // NaN = theory default
  double delta = 0.05;
  StoppingRule stopping;
  int max_iter = 500;
  std::optional<double> stepsize;
  double suffix_fraction = 1.0;
  bool adaptive = false;
  double stat_constant = 1.0;

  int threads = 1;
  std::string out_dir = ".";
  std::string prefix = "bench";

  static ExperimentConfig from_json_text(const std::string& text,
                                         const std::string& origin = "<config>");
  static ExperimentConfig from_json_file(const std::string& path);
};

/// Applies "--a.b.c=value" style overrides onto the raw JSON before parsing.
std::string apply_config_overrides(const std::string& json_text,
                                   const std::vector<std::string>& overrides,
                                   const std::string& origin = "<config>");

struct IterPoint {
  int iteration = 0;
  double objective = 0.0;
  double certificate = 0.0;
  double rel_accuracy = 0.0;
  double l2_loss = 0.0;
  double linf_fourier_loss = 0.0;
};

struct TrialCurve {
  std::string estimator;
  std::string setup;
  int trial = 0;
  std::vector<IterPoint> points;
  int stop_iteration = 0;
  double solver_seconds = 0.0;
  LossPair final_losses;
  double eps_star = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;
  std::string error;
};

struct ExperimentResult {
  std::vector<TrialCurve> curves;
  std::string csv_path;
  std::string summary_path;
};

/// Runs every (estimator, setup, trial) cell, sharing the generated (x, y)
/// across cells within a trial, and emits the per-iteration CSV plus the JSON
/// summary. Failed trials are recorded and the run continues.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Deterministic empirical quantile: sorted[ceil(p*N)-1]. NaNs are dropped.
double empirical_quantile(std::vector<double> values, double p);

}  // namespace filtfit

#pragma once

#include "qcs/common.hpp"
#include "qcs/model.hpp"
#include "qcs/quantize.hpp"
#include "qcs/solve.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qcs {

enum class SolverKind { Constrained, Unconstrained, Pbp };
enum class SweepVariable { M, Delta };

std::string to_string(SolverKind kind);
std::string to_string(EnsembleKind kind);

struct ExperimentConfig {
  std::string experiment_id;
  StructureSpec signal = StructureSpec::sparse(256, 5);
  int corruption_sparsity = 5;  // 0 disables corruption
  MeasurementEnsemble ensemble;
  QuantizationScheme scheme = QuantizationScheme::uniform(0.1);
  double epsilon = 0.0;
  SweepVariable sweep = SweepVariable::M;
  std::vector<double> sweep_values;  // m values or delta values, increasing
  int fixed_m = 0;                   // required for a delta sweep
  int trials = 100;
  SolverKind solver = SolverKind::Constrained;
  PlanMode plan_mode = PlanMode::Fig2;
  std::uint64_t master_seed = 0;
  int threads = 0;  // 0 = hardware concurrency
  void validate() const;
};

// One CSV row. err_x is the l2 (Frobenius for matrices) distance to the true
// signal, err_v likewise for the corruption, err_joint their Pythagorean sum.
struct SweepRow {
  std::string experiment_id;
  int m = 0;
  int n = 0;
  int s = 0;
  int rho = 0;
  int d = 0;
  int k = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string solver;
  double err_x = 0.0;
  double err_v = 0.0;
  double err_joint = 0.0;
  int iters = 0;
  double kkt_residual = 0.0;
  bool converged = false;
  double runtime_ms = 0.0;
};

struct SweepSummaryPoint {
  double sweep_value = 0.0;
  double mean_err_joint = 0.0;
  double std_err_joint = 0.0;
  int trials = 0;
};

struct SweepResultTable {
  std::vector<SweepRow> rows;  // sorted by sweep value, then trial
  std::vector<SweepSummaryPoint> summary;
};

SweepRow run_trial(const ExperimentConfig& config, double sweep_value,
                   int trial_index);

// Runs all (sweep value, trial) pairs, possibly concurrently, aggregates the
// per-value means, and writes the CSV when csv_path is nonempty.
SweepResultTable run_sweep(const ExperimentConfig& config,
                           const std::string& csv_path = "");

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(const std::string& path);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares on (log value, log error); needs >= 3 strictly
// positive points.
LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points);

struct ReproduceResult {
  std::vector<std::string> csv_paths;
  std::string summary_text;
};

// Instantiates the preset configuration for one of the named experiments
// (fig1a, fig1b, fig1c, fig2a, fig2b, fig2c, fig3a, fig3b, fig3c, intro),
// runs its sweeps, and writes one CSV per configuration plus a summary file
// with fitted slopes into out_dir.
ReproduceResult reproduce(const std::string& figure, EnsembleKind ensemble,
                          const std::string& out_dir, int trials = 100,
                          std::uint64_t master_seed = 0, int threads = 0);

std::vector<std::string> reproduce_figure_names();

}  // namespace qcs

#include "qcs/harness.hpp"

#include "qcs/prox.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace qcs {

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Constrained: return "constrained";
    case SolverKind::Unconstrained: return "unconstrained";
    case SolverKind::Pbp: return "pbp";
  }
  return "unknown";
}

std::string to_string(EnsembleKind kind) {
  return kind == EnsembleKind::Gaussian ? "gaussian" : "rademacher";
}

void ExperimentConfig::validate() const {
  signal.validate();
  scheme.validate();
  if (corruption_sparsity < 0)
    throw ParameterError("experiment config: corruption sparsity must be >= 0");
  if (trials < 1) throw ParameterError("experiment config: trials must be >= 1");
  if (epsilon < 0) throw ParameterError("experiment config: epsilon must be >= 0");
  if (sweep_values.empty())
    throw ParameterError("experiment config: sweep value list must be nonempty");
  for (std::size_t i = 0; i + 1 < sweep_values.size(); ++i)
    if (!(sweep_values[i] < sweep_values[i + 1]))
      throw ParameterError("experiment config: sweep values must be strictly increasing");
  if (sweep == SweepVariable::M) {
    for (double v : sweep_values)
      if (v < 1 || v != std::floor(v))
        throw ParameterError("experiment config: m values must be positive integers");
  } else {
    if (fixed_m < 1)
      throw ParameterError("experiment config: delta sweep requires fixed_m >= 1");
    if (scheme.nonlinearity != Nonlinearity::UniformQuantizer)
      throw ParameterError("experiment config: delta sweep requires the uniform quantizer");
    for (double v : sweep_values)
      if (!(v > 0)) throw ParameterError("experiment config: delta values must be positive");
  }
}

namespace {

// The nonlinearities of the no-dither comparison experiment; ground truths
// are normalized to unit norm for these schemes only.
bool intro_nonlinearity(const QuantizationScheme& scheme) {
  switch (scheme.nonlinearity) {
    case Nonlinearity::Sign:
    case Nonlinearity::Tanh:
      return true;
    case Nonlinearity::UniformQuantizer:
      return !scheme.dithered;
    case Nonlinearity::Identity:
      return false;
  }
  return false;
}

enum SeedTag : std::uint64_t {
  kTagTruth = 1,
  kTagMatrix = 2,
  kTagNoise = 3,
  kTagDither = 4,
};

}  // namespace

SweepRow run_trial(const ExperimentConfig& config, double sweep_value,
                   int trial_index) {
  config.validate();
  const int m = config.sweep == SweepVariable::M ? static_cast<int>(sweep_value)
                                                 : config.fixed_m;
  QuantizationScheme scheme = config.scheme;
  if (config.sweep == SweepVariable::Delta) scheme.delta = sweep_value;

  const std::uint64_t trial_seed =
      mix_seed({config.master_seed, std::bit_cast<std::uint64_t>(sweep_value),
                static_cast<std::uint64_t>(trial_index)});

  const auto corruption = StructureSpec::sparse(m, config.corruption_sparsity);
  GroundTruth truth = generate_ground_truth(config.signal, corruption,
                                            mix_seed({trial_seed, kTagTruth}));
  if (intro_nonlinearity(scheme)) {
    const double xn = truth.x_star.norm();
    if (xn > 0) truth.x_star /= xn;
    const double vn = truth.v_star.norm();
    if (vn > 0) truth.v_star /= vn;
  }

  const Matrix phi = sample_matrix(config.ensemble, m, config.signal.dim,
                                   mix_seed({trial_seed, kTagMatrix}));
  const Vector noise =
      sample_noise({config.epsilon}, m, mix_seed({trial_seed, kTagNoise}));
  const Vector y_bar = linear_observe(phi, truth, noise);
  const Observation obs = observe(y_bar, scheme, mix_seed({trial_seed, kTagDither}));

  const auto f = norm_for(config.signal);
  const auto g = norm_for(corruption);

  const auto start = std::chrono::steady_clock::now();
  RecoverySolution sol;
  switch (config.solver) {
    case SolverKind::Constrained:
      sol = solve_constrained(phi, obs.y, *f, f->evaluate(truth.x_star), *g,
                              g->evaluate(truth.v_star));
      break;
    case SolverKind::Unconstrained: {
      const auto plan = plan_lambdas(config.signal, corruption, m, scheme.delta,
                                     config.epsilon, config.ensemble.nominal_K,
                                     config.plan_mode);
      sol = solve_unconstrained(phi, obs.y, *f, *g, plan);
      break;
    }
    case SolverKind::Pbp:
      sol = solve_pbp(phi, obs.y, *f, f->evaluate(truth.x_star), *g,
                      g->evaluate(truth.v_star));
      break;
  }
  const auto stop = std::chrono::steady_clock::now();

  SweepRow row;
  row.experiment_id = config.experiment_id;
  row.m = m;
  row.n = config.signal.dim;
  row.s = config.signal.is_sparse() ? config.signal.sparsity : 0;
  row.rho = config.signal.is_sparse() ? 0 : config.signal.rank;
  row.d = config.signal.is_sparse() ? 0 : config.signal.side;
  row.k = config.corruption_sparsity;
  row.delta = scheme.nonlinearity == Nonlinearity::UniformQuantizer ? scheme.delta : 0.0;
  row.epsilon = config.epsilon;
  row.trial = trial_index;
  row.seed = trial_seed;
  row.solver = to_string(config.solver);
  row.err_x = (sol.x_hat - truth.x_star).norm();
  row.err_v = (sol.v_hat - truth.v_star).norm();
  row.err_joint = std::hypot(row.err_x, row.err_v);
  row.iters = sol.iters;
  row.kkt_residual = sol.kkt_residual;
  row.converged = sol.converged;
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return row;
}

SweepResultTable run_sweep(const ExperimentConfig& config,
                           const std::string& csv_path) {
  config.validate();
  const std::size_t n_values = config.sweep_values.size();
  const std::size_t n_tasks = n_values * static_cast<std::size_t>(config.trials);

  SweepResultTable table;
  table.rows.resize(n_tasks);

  unsigned n_threads = config.threads > 0
                           ? static_cast<unsigned>(config.threads)
                           : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min<unsigned>(n_threads, static_cast<unsigned>(n_tasks));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= n_tasks) return;
      const std::size_t vi = task / config.trials;
      const int trial = static_cast<int>(task % config.trials);
      try {
        table.rows[task] = run_trial(config, config.sweep_values[vi], trial);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_tasks);
        return;
      }
    }
  };

  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  table.summary.reserve(n_values);
  for (std::size_t vi = 0; vi < n_values; ++vi) {
    SweepSummaryPoint point;
    point.sweep_value = config.sweep_values[vi];
    point.trials = config.trials;
    double mean = 0.0;
    for (int t = 0; t < config.trials; ++t)
      mean += table.rows[vi * config.trials + t].err_joint;
    mean /= config.trials;
    double var = 0.0;
    for (int t = 0; t < config.trials; ++t) {
      const double dev = table.rows[vi * config.trials + t].err_joint - mean;
      var += dev * dev;
    }
    point.mean_err_joint = mean;
    point.std_err_joint = config.trials > 1 ? std::sqrt(var / (config.trials - 1)) : 0.0;
    table.summary.push_back(point);
  }

  if (!csv_path.empty()) write_sweep_csv(csv_path, table.rows);
  return table;
}

namespace {

constexpr const char* kCsvHeader =
    "experiment_id,m,n,s,rho,d,k,delta,epsilon,trial,seed,solver,"
    "err_x,err_v,err_joint,iters,kkt_residual,converged,runtime_ms";

std::string format_row(const SweepRow& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%s,%d,%d,%d,%d,%d,%d,%.17g,%.17g,%d,%llu,%s,%.17g,%.17g,%.17g,"
                "%d,%.17g,%d,%.17g",
                r.experiment_id.c_str(), r.m, r.n, r.s, r.rho, r.d, r.k, r.delta,
                r.epsilon, r.trial, static_cast<unsigned long long>(r.seed),
                r.solver.c_str(), r.err_x, r.err_v, r.err_joint, r.iters,
                r.kkt_residual, r.converged ? 1 : 0, r.runtime_ms);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << kCsvHeader << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<SweepRow> read_sweep_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV: " + path);
  if (line != kCsvHeader) throw IoError("unexpected CSV header in: " + path);
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 19) throw IoError("malformed CSV row in: " + path);
    SweepRow r;
    r.experiment_id = fields[0];
    r.m = std::stoi(fields[1]);
    r.n = std::stoi(fields[2]);
    r.s = std::stoi(fields[3]);
    r.rho = std::stoi(fields[4]);
    r.d = std::stoi(fields[5]);
    r.k = std::stoi(fields[6]);
    r.delta = std::stod(fields[7]);
    r.epsilon = std::stod(fields[8]);
    r.trial = std::stoi(fields[9]);
    r.seed = std::stoull(fields[10]);
    r.solver = fields[11];
    r.err_x = std::stod(fields[12]);
    r.err_v = std::stod(fields[13]);
    r.err_joint = std::stod(fields[14]);
    r.iters = std::stoi(fields[15]);
    r.kkt_residual = std::stod(fields[16]);
    r.converged = fields[17] == "1";
    r.runtime_ms = std::stod(fields[18]);
    rows.push_back(std::move(r));
  }
  return rows;
}

LogLogFit fit_loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3)
    throw ParameterError("fit_loglog_slope: need at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& [x, y] : points) {
    if (!(x > 0) || !(y > 0))
      throw ParameterError("fit_loglog_slope: values and errors must be positive");
    sx += std::log(x);
    sy += std::log(y);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : points) {
    const double dx = std::log(x) - mx;
    const double dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0) throw ParameterError("fit_loglog_slope: sweep values are all equal");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  const double ss_res = syy - fit.slope * sxy;
  fit.r2 = syy > 0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

namespace {

std::vector<double> m_grid_100_500() { return {100, 200, 300, 400, 500}; }
std::vector<double> m_grid_250_1250() { return {250, 500, 750, 1000, 1250}; }

std::vector<double> delta_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 13; ++i) grid.push_back(0.05 + 0.25 * i);
  return grid;
}

ExperimentConfig base_config(EnsembleKind ensemble, int trials,
                             std::uint64_t master_seed, int threads) {
  ExperimentConfig config;
  config.ensemble.kind = ensemble;
  config.trials = trials;
  config.master_seed = master_seed;
  config.threads = threads;
  return config;
}

}  // namespace

std::vector<std::string> reproduce_figure_names() {
  return {"fig1a", "fig1b", "fig1c", "fig2a", "fig2b",
          "fig2c", "fig3a", "fig3b", "fig3c", "intro"};
}

ReproduceResult reproduce(const std::string& figure, EnsembleKind ensemble,
                          const std::string& out_dir, int trials,
                          std::uint64_t master_seed, int threads) {
  std::vector<ExperimentConfig> configs;
  const auto base = [&] { return base_config(ensemble, trials, master_seed, threads); };
  const std::string suffix = "_" + to_string(ensemble);

  if (figure == "fig1a" || figure == "fig2a") {
    for (auto [s, k] : {std::pair{5, 5}, {10, 10}, {15, 15}}) {
      auto config = base();
      config.experiment_id = figure + "_s" + std::to_string(s) + "_k" + std::to_string(k) + suffix;
      config.signal = StructureSpec::sparse(256, s);
      config.corruption_sparsity = k;
      config.scheme = QuantizationScheme::uniform(0.1);
      config.sweep_values = m_grid_100_500();
      config.solver = figure == "fig1a" ? SolverKind::Constrained : SolverKind::Unconstrained;
      configs.push_back(config);
    }
  } else if (figure == "fig1b" || figure == "fig2b") {
    for (auto [rho, p] : {std::pair{1, 5}, {2, 10}, {3, 15}}) {
      auto config = base();
      config.experiment_id = figure + "_rho" + std::to_string(rho) + "_p" + std::to_string(p) + suffix;
      config.signal = StructureSpec::low_rank(16, rho);
      config.corruption_sparsity = p;
      config.scheme = QuantizationScheme::uniform(0.1);
      config.sweep_values = m_grid_250_1250();
      config.solver = figure == "fig1b" ? SolverKind::Constrained : SolverKind::Unconstrained;
      configs.push_back(config);
    }
  } else if (figure == "fig1c" || figure == "fig2c") {
    for (double eps : {0.05, 0.1, 0.15}) {
      auto config = base();
      std::ostringstream id;
      id << figure << "_eps" << eps << suffix;
      config.experiment_id = id.str();
      config.signal = StructureSpec::sparse(256, 5);
      config.corruption_sparsity = 5;
      config.scheme = QuantizationScheme::uniform(0.1);
      config.epsilon = eps;
      config.sweep_values = m_grid_100_500();
      config.solver = figure == "fig1c" ? SolverKind::Constrained : SolverKind::Unconstrained;
      configs.push_back(config);
    }
  } else if (figure == "fig3a" || figure == "fig3b") {
    for (auto solver : {SolverKind::Constrained, SolverKind::Pbp}) {
      auto config = base();
      config.experiment_id = figure + "_" + to_string(solver) + suffix;
      if (figure == "fig3a") {
        config.signal = StructureSpec::sparse(256, 5);
        config.corruption_sparsity = 5;
        config.sweep_values = m_grid_100_500();
      } else {
        config.signal = StructureSpec::low_rank(16, 1);
        config.corruption_sparsity = 5;
        config.sweep_values = m_grid_250_1250();
      }
      config.scheme = QuantizationScheme::uniform(0.1);
      config.solver = solver;
      configs.push_back(config);
    }
  } else if (figure == "fig3c") {
    for (auto solver : {SolverKind::Constrained, SolverKind::Pbp}) {
      auto config = base();
      config.experiment_id = figure + "_" + to_string(solver) + suffix;
      config.signal = StructureSpec::sparse(256, 5);
      config.corruption_sparsity = 5;
      config.scheme = QuantizationScheme::uniform(0.1);
      config.sweep = SweepVariable::Delta;
      config.sweep_values = delta_grid();
      config.fixed_m = 500;
      config.solver = solver;
      configs.push_back(config);
    }
  } else if (figure == "intro") {
    const std::vector<std::pair<std::string, QuantizationScheme>> schemes = {
        {"uniform", QuantizationScheme::uniform(0.3, /*dithered=*/false)},
        {"sign", QuantizationScheme::sign()},
        {"tanh", QuantizationScheme::tanh()}};
    for (const auto& [name, scheme] : schemes) {
      for (int k : {5, 0}) {
        auto config = base();
        config.experiment_id = "intro_" + name +
                               (k > 0 ? "_corrupted" : "_corruption_free") + suffix;
        config.signal = StructureSpec::sparse(128, 5);
        config.corruption_sparsity = k;
        config.scheme = scheme;
        config.sweep_values = m_grid_100_500();
        config.solver = SolverKind::Constrained;
        configs.push_back(config);
      }
    }
  } else {
    std::string names;
    for (const auto& name : reproduce_figure_names()) names += " " + name;
    throw ParameterError("unknown figure '" + figure + "'; valid names:" + names);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  ReproduceResult result;
  std::ostringstream summary;
  for (const auto& config : configs) {
    const std::string csv_path =
        (std::filesystem::path(out_dir) / (config.experiment_id + ".csv")).string();
    const auto table = run_sweep(config, csv_path);
    result.csv_paths.push_back(csv_path);

    summary << config.experiment_id << "\n";
    std::vector<std::pair<double, double>> points;
    for (const auto& point : table.summary) {
      summary << "  " << (config.sweep == SweepVariable::M ? "m" : "delta") << "="
              << point.sweep_value << "  mean_err_joint=" << point.mean_err_joint
              << "  std=" << point.std_err_joint << "  trials=" << point.trials
              << "\n";
      points.emplace_back(point.sweep_value, point.mean_err_joint);
    }
    try {
      const auto fit = fit_loglog_slope(points);
      summary << "  loglog slope=" << fit.slope << "  r2=" << fit.r2 << "\n";
    } catch (const ParameterError&) {
      summary << "  loglog slope: not available\n";
    }
  }

  result.summary_text = summary.str();
  const std::string summary_path =
      (std::filesystem::path(out_dir) / ("summary_" + figure + "_" + to_string(ensemble) + ".txt")).string();
  std::ofstream out(summary_path);
  if (!out) throw IoError("cannot open for writing: " + summary_path);
  out << result.summary_text;
  return result;
}

}  // namespace qcs

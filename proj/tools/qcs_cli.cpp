// Command-line front end: instance generation, single solves, trial sweeps,
// geometry reports, lambda planning, and the preset experiment suites.

#include "CLI11.hpp"

#include "qcs/geometry.hpp"
#include "qcs/harness.hpp"
#include "qcs/model.hpp"
#include "qcs/prox.hpp"
#include "qcs/quantize.hpp"
#include "qcs/solve.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

using namespace qcs;

namespace {

struct StrictNonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructureFlags {
  std::string kind = "sparse";
  int n = 256;
  int s = 5;
  int d = 16;
  int rho = 1;

  StructureSpec to_spec() const {
    if (kind == "sparse") return StructureSpec::sparse(n, s);
    if (kind == "lowrank") return StructureSpec::low_rank(d, rho);
    throw ParameterError("--kind must be 'sparse' or 'lowrank'");
  }
};

struct SchemeFlags {
  std::string nonlinearity = "uniform";
  double delta = 0.1;
  bool dithered = true;

  QuantizationScheme to_scheme() const {
    if (nonlinearity == "uniform") return QuantizationScheme::uniform(delta, dithered);
    if (nonlinearity == "sign") return QuantizationScheme::sign();
    if (nonlinearity == "tanh") return QuantizationScheme::tanh();
    if (nonlinearity == "identity") return QuantizationScheme::identity();
    throw ParameterError("--nonlinearity must be uniform|sign|tanh|identity");
  }
};

EnsembleKind parse_ensemble(const std::string& name) {
  if (name == "gaussian") return EnsembleKind::Gaussian;
  if (name == "rademacher" || name == "bernoulli") return EnsembleKind::Rademacher;
  throw ParameterError("--ensemble must be 'gaussian' or 'rademacher'");
}

SolverKind parse_solver(const std::string& name) {
  if (name == "constrained") return SolverKind::Constrained;
  if (name == "unconstrained") return SolverKind::Unconstrained;
  if (name == "pbp") return SolverKind::Pbp;
  throw ParameterError("--solver must be constrained|unconstrained|pbp");
}

PlanMode parse_plan_mode(const std::string& name) {
  if (name == "fig2") return PlanMode::Fig2;
  if (name == "corollary") return PlanMode::Corollary;
  throw ParameterError("--plan-mode must be 'fig2' or 'corollary'");
}

void add_structure_options(CLI::App* cmd, StructureFlags& flags) {
  cmd->add_option("--kind", flags.kind, "Signal structure: sparse or lowrank");
  cmd->add_option("--n", flags.n, "Signal dimension (sparse)");
  cmd->add_option("--s", flags.s, "Signal sparsity (sparse)");
  cmd->add_option("--d", flags.d, "Matrix side (lowrank)");
  cmd->add_option("--rho", flags.rho, "Matrix rank (lowrank)");
}

void add_scheme_options(CLI::App* cmd, SchemeFlags& flags) {
  cmd->add_option("--nonlinearity", flags.nonlinearity,
                  "uniform, sign, tanh, or identity");
  cmd->add_option("--delta", flags.delta, "Quantizer resolution");
  cmd->add_flag("--dithered,!--no-dither", flags.dithered, "Add uniform dither");
}

void write_vector_csv(const std::string& path, const Vector& v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", v[i]);
    out << buf;
  }
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      out << buf << (j + 1 == m.cols() ? "\n" : ",");
    }
  }
}

struct InstanceFlags {
  StructureFlags structure;
  SchemeFlags scheme;
  int k = 5;
  int m = 500;
  std::string ensemble = "gaussian";
  double epsilon = 0.0;
};

struct Instance {
  GroundTruth truth;
  Matrix phi;
  Vector noise;
  Vector y_bar;
  Observation obs;
};

Instance build_instance(const InstanceFlags& flags, std::uint64_t seed) {
  Instance inst;
  const auto signal = flags.structure.to_spec();
  const auto corruption = StructureSpec::sparse(flags.m, flags.k);
  inst.truth = generate_ground_truth(signal, corruption, mix_seed({seed, 1}));
  inst.phi = sample_matrix({parse_ensemble(flags.ensemble)}, flags.m, signal.dim,
                           mix_seed({seed, 2}));
  inst.noise = sample_noise({flags.epsilon}, flags.m, mix_seed({seed, 3}));
  inst.y_bar = linear_observe(inst.phi, inst.truth, inst.noise);
  inst.obs = observe(inst.y_bar, flags.scheme.to_scheme(), mix_seed({seed, 4}));
  return inst;
}

int run_app(int argc, char** argv) {
  CLI::App app{"Structured recovery from dithered quantized measurements"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand name
  app.set_config("--config", "", "Key-value config file (command-line flags win)");

  std::uint64_t seed = 0;
  int trials = 100;
  std::string out;
  int threads = 0;
  bool strict = false;
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--trials", trials, "Trials per sweep point");
  app.add_option("--out", out, "Output path (file or directory per command)");
  app.add_option("--threads", threads, "Worker threads (0 = hardware)");
  app.add_flag("--strict", strict, "Exit 3 if any trial fails to converge");

  // --- gen ---
  auto* gen = app.add_subcommand("gen", "Generate one problem instance as CSV files");
  auto gen_flags = std::make_shared<InstanceFlags>();
  add_structure_options(gen, gen_flags->structure);
  add_scheme_options(gen, gen_flags->scheme);
  gen->add_option("--k", gen_flags->k, "Corruption sparsity");
  gen->add_option("--m", gen_flags->m, "Number of measurements");
  gen->add_option("--ensemble", gen_flags->ensemble, "gaussian or rademacher");
  gen->add_option("--epsilon", gen_flags->epsilon, "Noise sup-norm");
  gen->callback([&, gen_flags] {
    const std::string dir = out.empty() ? "instance" : out;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory: " + dir);
    const auto inst = build_instance(*gen_flags, seed);
    const auto path = [&](const char* name) {
      return (std::filesystem::path(dir) / name).string();
    };
    write_matrix_csv(path("phi.csv"), inst.phi);
    write_vector_csv(path("x_star.csv"), inst.truth.x_star);
    write_vector_csv(path("v_star.csv"), inst.truth.v_star);
    write_vector_csv(path("noise.csv"), inst.noise);
    write_vector_csv(path("y_bar.csv"), inst.y_bar);
    write_vector_csv(path("y.csv"), inst.obs.y);
    write_vector_csv(path("dither.csv"), inst.obs.dither);
    std::ofstream meta(path("meta.txt"));
    if (!meta) throw IoError("cannot open for writing: " + path("meta.txt"));
    meta << "m=" << gen_flags->m << "\nn=" << gen_flags->structure.to_spec().dim
         << "\nk=" << gen_flags->k << "\nepsilon=" << gen_flags->epsilon
         << "\nseed=" << seed << "\n";
    std::cout << "instance written to " << dir << "\n";
  });

  // --- solve ---
  auto* solve = app.add_subcommand("solve", "Generate one instance and solve it");
  auto solve_flags = std::make_shared<InstanceFlags>();
  auto solver_name = std::make_shared<std::string>("constrained");
  auto plan_mode_name = std::make_shared<std::string>("fig2");
  add_structure_options(solve, solve_flags->structure);
  add_scheme_options(solve, solve_flags->scheme);
  solve->add_option("--k", solve_flags->k, "Corruption sparsity");
  solve->add_option("--m", solve_flags->m, "Number of measurements");
  solve->add_option("--ensemble", solve_flags->ensemble, "gaussian or rademacher");
  solve->add_option("--epsilon", solve_flags->epsilon, "Noise sup-norm");
  solve->add_option("--solver", *solver_name, "constrained|unconstrained|pbp");
  solve->add_option("--plan-mode", *plan_mode_name, "fig2 or corollary");
  auto solver_cfg = std::make_shared<SolverConfig>();
  solve->add_option("--max-iters", solver_cfg->max_iters, "Iteration cap");
  solve->add_option("--rel-tol", solver_cfg->rel_tol, "Relative iterate tolerance");
  solve->callback([&, solve_flags, solver_name, plan_mode_name, solver_cfg] {
    const auto inst = build_instance(*solve_flags, seed);
    const auto signal = solve_flags->structure.to_spec();
    const auto corruption = StructureSpec::sparse(solve_flags->m, solve_flags->k);
    const auto f = norm_for(signal);
    const auto g = norm_for(corruption);
    RecoverySolution sol;
    switch (parse_solver(*solver_name)) {
      case SolverKind::Constrained:
        sol = solve_constrained(inst.phi, inst.obs.y, *f,
                                f->evaluate(inst.truth.x_star), *g,
                                g->evaluate(inst.truth.v_star), *solver_cfg);
        break;
      case SolverKind::Unconstrained: {
        const auto plan = plan_lambdas(signal, corruption, solve_flags->m,
                                       solve_flags->scheme.delta,
                                       solve_flags->epsilon, 1.0,
                                       parse_plan_mode(*plan_mode_name));
        sol = solve_unconstrained(inst.phi, inst.obs.y, *f, *g, plan, *solver_cfg);
        break;
      }
      case SolverKind::Pbp:
        sol = solve_pbp(inst.phi, inst.obs.y, *f, f->evaluate(inst.truth.x_star),
                        *g, g->evaluate(inst.truth.v_star));
        break;
    }
    const double err_x = (sol.x_hat - inst.truth.x_star).norm();
    const double err_v = (sol.v_hat - inst.truth.v_star).norm();
    std::printf("solver        %s\n", solver_name->c_str());
    std::printf("err_x         %.6g\n", err_x);
    std::printf("err_v         %.6g\n", err_v);
    std::printf("err_joint     %.6g\n", std::hypot(err_x, err_v));
    std::printf("objective     %.6g\n", sol.objective);
    std::printf("kkt_residual  %.6g\n", sol.kkt_residual);
    std::printf("iters         %d\n", sol.iters);
    std::printf("converged     %s\n", sol.converged ? "yes" : "no");
    if (!out.empty()) {
      std::error_code ec;
      std::filesystem::create_directories(out, ec);
      if (ec) throw IoError("cannot create output directory: " + out);
      write_vector_csv((std::filesystem::path(out) / "x_hat.csv").string(), sol.x_hat);
      write_vector_csv((std::filesystem::path(out) / "v_hat.csv").string(), sol.v_hat);
    }
    if (strict && !sol.converged)
      throw StrictNonConvergence("solver did not converge");
  });

  // --- sweep ---
  auto* sweep = app.add_subcommand("sweep", "Run a trial sweep and write a CSV");
  auto sweep_structure = std::make_shared<StructureFlags>();
  auto sweep_scheme = std::make_shared<SchemeFlags>();
  auto sweep_opts = std::make_shared<std::tuple<int, std::string, double, std::string,
                                                std::vector<double>, int, std::string,
                                                std::string>>(
      5, "gaussian", 0.0, "m", std::vector<double>{100, 200, 300, 400, 500}, 500,
      "constrained", "fig2");
  auto sweep_id = std::make_shared<std::string>("sweep");
  add_structure_options(sweep, *sweep_structure);
  add_scheme_options(sweep, *sweep_scheme);
  sweep->add_option("--id", *sweep_id, "Experiment id for the CSV rows");
  sweep->add_option("--k", std::get<0>(*sweep_opts), "Corruption sparsity");
  sweep->add_option("--ensemble", std::get<1>(*sweep_opts), "gaussian or rademacher");
  sweep->add_option("--epsilon", std::get<2>(*sweep_opts), "Noise sup-norm");
  sweep->add_option("--sweep", std::get<3>(*sweep_opts), "Sweep variable: m or delta");
  sweep->add_option("--values", std::get<4>(*sweep_opts), "Sweep values, increasing")
      ->expected(-1);
  sweep->add_option("--fixed-m", std::get<5>(*sweep_opts), "m for a delta sweep");
  sweep->add_option("--solver", std::get<6>(*sweep_opts), "constrained|unconstrained|pbp");
  sweep->add_option("--plan-mode", std::get<7>(*sweep_opts), "fig2 or corollary");
  sweep->callback([&, sweep_structure, sweep_scheme, sweep_opts, sweep_id] {
    ExperimentConfig config;
    config.experiment_id = *sweep_id;
    config.signal = sweep_structure->to_spec();
    config.corruption_sparsity = std::get<0>(*sweep_opts);
    config.ensemble.kind = parse_ensemble(std::get<1>(*sweep_opts));
    config.scheme = sweep_scheme->to_scheme();
    config.epsilon = std::get<2>(*sweep_opts);
    const std::string& sweep_var = std::get<3>(*sweep_opts);
    if (sweep_var == "m")
      config.sweep = SweepVariable::M;
    else if (sweep_var == "delta")
      config.sweep = SweepVariable::Delta;
    else
      throw ParameterError("--sweep must be 'm' or 'delta'");
    config.sweep_values = std::get<4>(*sweep_opts);
    config.fixed_m = std::get<5>(*sweep_opts);
    config.trials = trials;
    config.solver = parse_solver(std::get<6>(*sweep_opts));
    config.plan_mode = parse_plan_mode(std::get<7>(*sweep_opts));
    config.master_seed = seed;
    config.threads = threads;

    const auto table = run_sweep(config, out);
    bool all_converged = true;
    for (const auto& row : table.rows) all_converged = all_converged && row.converged;
    for (const auto& point : table.summary)
      std::printf("%s=%-8g mean_err_joint=%-12.6g std=%-12.6g trials=%d\n",
                  config.sweep == SweepVariable::M ? "m" : "delta",
                  point.sweep_value, point.mean_err_joint, point.std_err_joint,
                  point.trials);
    if (table.summary.size() >= 3) {
      std::vector<std::pair<double, double>> points;
      for (const auto& point : table.summary)
        points.emplace_back(point.sweep_value, point.mean_err_joint);
      const auto fit = fit_loglog_slope(points);
      std::printf("loglog slope=%.4g intercept=%.4g r2=%.4g\n", fit.slope,
                  fit.intercept, fit.r2);
    }
    if (!out.empty()) std::printf("csv written to %s\n", out.c_str());
    if (strict && !all_converged)
      throw StrictNonConvergence("some trials did not converge");
  });

  // --- geometry ---
  auto* geometry = app.add_subcommand("geometry", "Print a geometry report");
  auto geo_structure = std::make_shared<StructureFlags>();
  auto geo_opts = std::make_shared<std::tuple<int, int, double, double, double,
                                              std::string, int, std::string>>(
      5, 500, 0.1, 0.0, 1.0, "fig2", 10000, "");
  add_structure_options(geometry, *geo_structure);
  geometry->add_option("--k", std::get<0>(*geo_opts), "Corruption sparsity");
  geometry->add_option("--m", std::get<1>(*geo_opts), "Number of measurements");
  geometry->add_option("--delta", std::get<2>(*geo_opts), "Quantizer resolution");
  geometry->add_option("--epsilon", std::get<3>(*geo_opts), "Noise sup-norm");
  geometry->add_option("--K", std::get<4>(*geo_opts), "Sub-Gaussian row norm");
  geometry->add_option("--plan-mode", std::get<5>(*geo_opts), "fig2 or corollary");
  geometry->add_option("--samples", std::get<6>(*geo_opts), "Monte Carlo samples");
  geometry->add_option("--csv", std::get<7>(*geo_opts), "Also write the report as CSV");
  geometry->callback([&, geo_structure, geo_opts] {
    const auto report = make_geometry_report(
        geo_structure->to_spec(),
        StructureSpec::sparse(std::get<1>(*geo_opts), std::get<0>(*geo_opts)),
        std::get<1>(*geo_opts), std::get<2>(*geo_opts), std::get<3>(*geo_opts),
        std::get<4>(*geo_opts), parse_plan_mode(std::get<5>(*geo_opts)),
        std::get<6>(*geo_opts), seed);
    std::cout << to_text(report);
    const std::string& csv_path = std::get<7>(*geo_opts);
    if (!csv_path.empty()) {
      std::ofstream csv(csv_path);
      if (!csv) throw IoError("cannot open for writing: " + csv_path);
      csv << to_csv(report);
    }
  });

  // --- plan-lambda ---
  auto* plan_cmd = app.add_subcommand("plan-lambda", "Print regularization parameters");
  auto plan_structure = std::make_shared<StructureFlags>();
  auto plan_opts = std::make_shared<std::tuple<int, int, double, double, double,
                                               std::string, double, double>>(
      5, 500, 0.1, 0.0, 1.0, "fig2", 1.0, 1.0);
  add_structure_options(plan_cmd, *plan_structure);
  plan_cmd->add_option("--k", std::get<0>(*plan_opts), "Corruption sparsity");
  plan_cmd->add_option("--m", std::get<1>(*plan_opts), "Number of measurements");
  plan_cmd->add_option("--delta", std::get<2>(*plan_opts), "Quantizer resolution");
  plan_cmd->add_option("--epsilon", std::get<3>(*plan_opts), "Noise sup-norm");
  plan_cmd->add_option("--K", std::get<4>(*plan_opts), "Sub-Gaussian row norm");
  plan_cmd->add_option("--plan-mode", std::get<5>(*plan_opts), "fig2 or corollary");
  plan_cmd->add_option("--c1", std::get<6>(*plan_opts), "Signal constant (corollary)");
  plan_cmd->add_option("--c2", std::get<7>(*plan_opts), "Corruption constant (corollary)");
  plan_cmd->callback([&, plan_structure, plan_opts] {
    const int m = std::get<1>(*plan_opts);
    const auto plan = plan_lambdas(
        plan_structure->to_spec(), StructureSpec::sparse(m, std::get<0>(*plan_opts)),
        m, std::get<2>(*plan_opts), std::get<3>(*plan_opts), std::get<4>(*plan_opts),
        parse_plan_mode(std::get<5>(*plan_opts)), std::get<6>(*plan_opts),
        std::get<7>(*plan_opts));
    std::printf("lambda1  %.17g\n", plan.lambda1);
    std::printf("lambda2  %.17g\n", plan.lambda2);
    std::printf("kappa    %.17g\n", plan.kappa);
  });

  // --- reproduce ---
  auto* repro = app.add_subcommand("reproduce", "Run a preset experiment suite");
  auto repro_opts = std::make_shared<std::pair<std::string, std::string>>("", "gaussian");
  repro->add_option("--figure", repro_opts->first, "Experiment name (fig1a..fig3c, intro)")
      ->required();
  repro->add_option("--ensemble", repro_opts->second, "gaussian or rademacher");
  repro->callback([&, repro_opts] {
    const std::string dir = out.empty() ? "out" : out;
    const auto result = reproduce(repro_opts->first, parse_ensemble(repro_opts->second),
                                  dir, trials, seed, threads);
    std::cout << result.summary_text;
    for (const auto& path : result.csv_paths) std::cout << "csv: " << path << "\n";
    if (strict) {
      bool all_converged = true;
      for (const auto& path : result.csv_paths)
        for (const auto& row : read_sweep_csv(path))
          all_converged = all_converged && row.converged;
      if (!all_converged) throw StrictNonConvergence("some trials did not converge");
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const StrictNonConvergence& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

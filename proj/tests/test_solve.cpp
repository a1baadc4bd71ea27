#include "doctest.h"

#include "qcs/model.hpp"
#include "qcs/prox.hpp"
#include "qcs/solve.hpp"

#include <cmath>

using namespace qcs;

namespace {

Vector random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("constrained solver recovers exactly under linear observations") {
  const int n = 64, m = 128;
  const auto signal = StructureSpec::sparse(n, 5);
  const auto corruption = StructureSpec::sparse(m, 0);
  const auto truth = generate_ground_truth(signal, corruption, 21);
  const auto phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 22);
  const Vector y = linear_observe(phi, truth, Vector::Zero(m));

  const L1Norm f, g;
  const auto sol = solve_constrained(phi, y, f, truth.x_star.lpNorm<1>(), g, 0.0);
  CHECK(sol.converged);
  CHECK((sol.x_hat - truth.x_star).norm() <= 1e-6);
  CHECK(sol.v_hat.isZero(0.0));
}

TEST_CASE("constrained output is feasible") {
  auto rng = make_rng(23);
  const int n = 12, m = 8;
  const Matrix phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 24);
  const Vector y = random_vector(m, rng, 3.0);
  const L1Norm f, g;
  const double r1 = 0.7, r2 = 0.4;
  const auto sol = solve_constrained(phi, y, f, r1, g, r2);
  CHECK(f.evaluate(sol.x_hat) <= r1 * (1.0 + 1e-9));
  CHECK(g.evaluate(sol.v_hat) <= r2 * (1.0 + 1e-9));
}

TEST_CASE("constrained objective beats sampled feasible points") {
  auto rng = make_rng(25);
  const int n = 2, m = 3;
  const Matrix phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 26);
  const Vector y = random_vector(m, rng, 2.0);
  const L1Norm f, g;
  const double r1 = 1.0, r2 = 0.5;
  const auto sol = solve_constrained(phi, y, f, r1, g, r2);
  const double sm = std::sqrt(static_cast<double>(m));
  const double best = (y - phi * sol.x_hat - sm * sol.v_hat).norm();
  CHECK(best == doctest::Approx(sol.objective).epsilon(1e-9));
  for (int i = 0; i < 1000; ++i) {
    const Vector x = project_l1_ball(random_vector(n, rng, 2.0), r1);
    const Vector v = project_l1_ball(random_vector(m, rng, 2.0), r2);
    CHECK((y - phi * x - sm * v).norm() >= best - 1e-7);
  }
}

TEST_CASE("scalar unconstrained lasso matches the closed form") {
  Matrix phi(1, 1);
  phi << 1.0;
  Vector y(1);
  y << 2.0;
  const L1Norm f, g;
  const auto sol = solve_unconstrained(phi, y, f, g, {0.5, 10.0, 1.0});
  CHECK(sol.converged);
  CHECK(sol.x_hat[0] == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(std::abs(sol.v_hat[0]) < 1e-10);
}

TEST_CASE("large regularization drives the solution to zero") {
  auto rng = make_rng(27);
  const int n = 10, m = 15;
  const Matrix phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 28);
  const Vector y = random_vector(m, rng, 2.0);
  const L1Norm f, g;
  const double sm = std::sqrt(static_cast<double>(m));
  const double lambda1 = 2.0 * (phi.transpose() * y).lpNorm<Eigen::Infinity>();
  const double lambda2 = 2.0 * sm * y.lpNorm<Eigen::Infinity>();
  const auto sol = solve_unconstrained(phi, y, f, g, {lambda1, lambda2, 1.0});
  CHECK(sol.x_hat.lpNorm<Eigen::Infinity>() < 1e-10);
  CHECK(sol.v_hat.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("unconstrained objective dominates the truth and the penalty inequality holds") {
  const int n = 40, m = 60;
  const auto signal = StructureSpec::sparse(n, 4);
  const auto corruption = StructureSpec::sparse(m, 3);
  const auto truth = generate_ground_truth(signal, corruption, 29);
  const auto phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 30);
  const Vector y = linear_observe(phi, truth, Vector::Zero(m));
  const L1Norm f, g;
  const RegularizationPlan plan{3.0, 4.0, 1.0};
  const auto sol = solve_unconstrained(phi, y, f, g, plan);

  const double sm = std::sqrt(static_cast<double>(m));
  const auto objective = [&](const Vector& x, const Vector& v) {
    return 0.5 * (y - phi * x - sm * v).squaredNorm() + plan.lambda1 * f.evaluate(x) +
           plan.lambda2 * g.evaluate(v);
  };
  CHECK(sol.objective <= objective(truth.x_star, truth.v_star) + 1e-9);

  // Optimality of the returned pair forces the penalty comparison inequality.
  const double truth_residual =
      0.5 * (y - phi * truth.x_star - sm * truth.v_star).squaredNorm();
  CHECK(plan.lambda1 * f.evaluate(sol.x_hat) + plan.lambda2 * g.evaluate(sol.v_hat) <=
        plan.lambda1 * f.evaluate(truth.x_star) + plan.lambda2 * g.evaluate(truth.v_star) +
            truth_residual + 1e-9);
}

TEST_CASE("iterative solvers never exceed the objective at zero") {
  auto rng = make_rng(31);
  const int n = 20, m = 30;
  const Matrix phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 32);
  const Vector y = random_vector(m, rng, 2.0);
  const L1Norm f, g;
  const double sm = std::sqrt(static_cast<double>(m));

  const auto con = solve_constrained(phi, y, f, 0.8, g, 0.6);
  CHECK(con.objective <= y.norm() + 1e-12);

  const RegularizationPlan plan{1.0, 2.0, 1.0};
  const auto un = solve_unconstrained(phi, y, f, g, plan);
  CHECK(un.objective <= 0.5 * y.squaredNorm() + 1e-12);
  (void)sm;
}

TEST_CASE("kkt residual is small at convergence") {
  const int n = 32, m = 64;
  const auto signal = StructureSpec::sparse(n, 3);
  const auto corruption = StructureSpec::sparse(m, 2);
  const auto truth = generate_ground_truth(signal, corruption, 33);
  const auto phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 34);
  const Vector y = linear_observe(phi, truth, Vector::Zero(m));
  const L1Norm f, g;
  const auto con = solve_constrained(phi, y, f, f.evaluate(truth.x_star), g,
                                     g.evaluate(truth.v_star));
  CHECK(con.converged);
  CHECK(con.kkt_residual < 1e-6 * (1.0 + y.norm()));
  const auto un = solve_unconstrained(phi, y, f, g, {2.0, 3.0, 1.0});
  CHECK(un.converged);
  CHECK(un.kkt_residual < 1e-6 * (1.0 + y.norm()));
}

TEST_CASE("solver outputs scale linearly with the data") {
  const int n = 16, m = 24;
  const auto signal = StructureSpec::sparse(n, 3);
  const auto corruption = StructureSpec::sparse(m, 2);
  const auto truth = generate_ground_truth(signal, corruption, 35);
  const auto phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 36);
  const Vector y = linear_observe(phi, truth, Vector::Zero(m));
  const L1Norm f, g;
  const double c = 3.0;

  const double r1 = f.evaluate(truth.x_star), r2 = g.evaluate(truth.v_star);
  const auto base = solve_constrained(phi, y, f, r1, g, r2);
  const auto scaled = solve_constrained(phi, c * y, f, c * r1, g, c * r2);
  CHECK((scaled.x_hat - c * base.x_hat).norm() <= 1e-8 * (1.0 + c * base.x_hat.norm()));
  CHECK((scaled.v_hat - c * base.v_hat).norm() <= 1e-8 * (1.0 + c * base.v_hat.norm()));

  const RegularizationPlan plan{1.5, 2.5, 1.0};
  const RegularizationPlan plan_scaled{c * 1.5, c * 2.5, 1.0};
  const auto ubase = solve_unconstrained(phi, y, f, g, plan);
  const auto uscaled = solve_unconstrained(phi, c * y, f, g, plan_scaled);
  CHECK((uscaled.x_hat - c * ubase.x_hat).norm() <= 1e-8 * (1.0 + c * ubase.x_hat.norm()));
  CHECK((uscaled.v_hat - c * ubase.v_hat).norm() <= 1e-8 * (1.0 + c * ubase.v_hat.norm()));
}

TEST_CASE("non-convergence is reported, never silent") {
  auto rng = make_rng(37);
  const int n = 30, m = 40;
  const Matrix phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 38);
  const Vector y = random_vector(m, rng, 5.0);
  const L1Norm f, g;
  SolverConfig cfg;
  cfg.max_iters = 3;
  const auto sol = solve_constrained(phi, y, f, 2.0, g, 2.0, cfg);
  CHECK_FALSE(sol.converged);
  CHECK(sol.iters == 3);
}

TEST_CASE("pbp identities") {
  const L1Norm f, g;
  const int n = 8, m = 8;
  const Matrix phi = std::sqrt(static_cast<double>(m)) * Matrix::Identity(m, n);
  const auto zero = solve_pbp(phi, Vector::Zero(m), f, 1.0, g, 1.0);
  CHECK(zero.x_hat.isZero(0.0));
  CHECK(zero.v_hat.isZero(0.0));

  // sqrt(m) * orthogonal matrix back-projects exactly.
  const auto signal = StructureSpec::sparse(n, 2);
  const auto truth = generate_ground_truth(signal, StructureSpec::sparse(m, 0), 39);
  const Vector y = phi * truth.x_star;
  const auto sol = solve_pbp(phi, y, f, 1e6, g, 0.0);
  CHECK((sol.x_hat - truth.x_star).norm() < 1e-12);
}

TEST_CASE("pbp projects each block independently") {
  auto rng = make_rng(40);
  const int n = 10, m = 12;
  const Matrix phi = sample_matrix({EnsembleKind::Gaussian}, m, n, 41);
  const Vector y = random_vector(m, rng, 4.0);
  const L1Norm f, g;
  const double r1 = 1.2, r2 = 0.9;
  const auto sol = solve_pbp(phi, y, f, r1, g, r2);
  const Vector bx = (phi.transpose() * y) / m;
  const Vector bv = y / std::sqrt(static_cast<double>(m));
  const double joint = (sol.x_hat - bx).squaredNorm() + (sol.v_hat - bv).squaredNorm();
  // Any feasible pair must be at least as far from the back projection.
  for (int i = 0; i < 500; ++i) {
    const Vector x = project_l1_ball(random_vector(n, rng, 2.0), r1);
    const Vector v = project_l1_ball(random_vector(m, rng, 2.0), r2);
    CHECK((x - bx).squaredNorm() + (v - bv).squaredNorm() >= joint - 1e-10);
  }
}

TEST_CASE("lambda planning follows the published choices") {
  const auto sparse = StructureSpec::sparse(256, 5);
  const auto corruption = StructureSpec::sparse(400, 5);
  const auto plan = plan_lambdas(sparse, corruption, 400, 0.1, 0.0, 1.0, PlanMode::Fig2);
  CHECK(plan.lambda1 == doctest::Approx(0.1 * std::sqrt(400.0 * std::log(256.0))).epsilon(1e-12));
  CHECK(plan.lambda1 == doctest::Approx(4.7096).epsilon(1e-4));
  CHECK(plan.lambda2 == doctest::Approx(0.1 * std::sqrt(400.0 * std::log(400.0))).epsilon(1e-12));

  const auto lowrank = StructureSpec::low_rank(16, 1);
  const auto plan_lr = plan_lambdas(lowrank, corruption, 400, 0.1, 0.0, 1.0, PlanMode::Fig2);
  CHECK(plan_lr.lambda1 == doctest::Approx(16.0).epsilon(1e-12));

  // kappa * lambda1 depends only on the signal dimension.
  for (int m : {100, 400, 900}) {
    for (double delta : {0.05, 0.3}) {
      const auto p = plan_lambdas(sparse, StructureSpec::sparse(m, 5), m, delta, 0.0,
                                  1.0, PlanMode::Fig2);
      CHECK(p.kappa * p.lambda1 ==
            doctest::Approx(2.0 * std::sqrt(std::log(256.0))).epsilon(1e-12));
    }
  }

  CHECK_THROWS_AS(plan_lambdas(sparse, corruption, 400, 0.0, 0.0, 1.0, PlanMode::Fig2),
                  ParameterError);
}

TEST_CASE("corollary mode scales the plan by K and the user constants") {
  const auto sparse = StructureSpec::sparse(256, 5);
  const auto corruption = StructureSpec::sparse(400, 5);
  const auto unit = plan_lambdas(sparse, corruption, 400, 0.1, 0.0, 1.0, PlanMode::Fig2);
  const auto scaled =
      plan_lambdas(sparse, corruption, 400, 0.1, 0.0, 2.0, PlanMode::Corollary, 3.0, 5.0);
  CHECK(scaled.lambda1 == doctest::Approx(6.0 * unit.lambda1).epsilon(1e-12));
  CHECK(scaled.lambda2 == doctest::Approx(10.0 * unit.lambda2).epsilon(1e-12));
  CHECK(scaled.kappa == doctest::Approx(unit.kappa).epsilon(1e-12));
}

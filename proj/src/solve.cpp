#include "qcs/solve.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace qcs {

void SolverConfig::validate() const {
  if (max_iters < 1) throw ParameterError("solver config: max_iters must be >= 1");
  if (!(rel_tol > 0)) throw ParameterError("solver config: rel_tol must be positive");
  if (!(step_safety > 0) || step_safety > 1.0)
    throw ParameterError("solver config: step_safety must be in (0, 1]");
}

void RegularizationPlan::validate() const {
  if (!(lambda1 > 0) || !(lambda2 > 0))
    throw ParameterError("regularization plan: lambda1 and lambda2 must be positive");
}

namespace {

// Accelerated gradient on 1/2 ||Phi x + sm v - y||^2 + penalty(x, v), where
// the nonsmooth part enters through `update` (a projection or prox step).
// Restarts the momentum whenever the composite objective would increase; the
// plain step it falls back to is a guaranteed descent step for step <= 1/L.
struct CompositeProblem {
  const Matrix& phi;
  const Vector& y;
  double sm;  // sqrt(m)
  std::function<Vector(const Vector&, double)> update_x;  // (point, step)
  std::function<Vector(const Vector&, double)> update_v;
  std::function<double(const Vector&, const Vector&)> penalty;
};

RecoverySolution run_accelerated(const CompositeProblem& p, const SolverConfig& cfg) {
  cfg.validate();
  const auto m = p.phi.rows();
  const auto n = p.phi.cols();

  // sigma_max([Phi, sm I])^2 = sigma_max(Phi)^2 + m; inflate slightly so the
  // step stays a descent step despite the power-iteration underestimate.
  const double sigma = operator_norm(p.phi, 1e-9);
  const double lips = (sigma * sigma + static_cast<double>(m)) * (1.0 + 1e-5);
  const double step = cfg.step_safety / lips;

  Vector x = Vector::Zero(n), v = Vector::Zero(m);
  Vector ax = Vector::Zero(m);  // Phi x + sm v
  double obj = 0.5 * p.y.squaredNorm() + p.penalty(x, v);

  Vector zx = x, zv = v, az = ax;
  Vector grad_buf(m);
  double t = 1.0;
  int settled_streak = 0;  // momentum reversals can make one change tiny
  RecoverySolution sol;

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    grad_buf = az - p.y;
    Vector x_new = p.update_x(zx - step * (p.phi.transpose() * grad_buf), step);
    Vector v_new = p.update_v(zv - (step * p.sm) * grad_buf, step);
    Vector ax_new = p.phi * x_new + p.sm * v_new;
    double obj_new = 0.5 * (ax_new - p.y).squaredNorm() + p.penalty(x_new, v_new);

    if (obj_new > obj) {
      // Monotone restart: plain step from the previous iterate.
      t = 1.0;
      grad_buf = ax - p.y;
      x_new = p.update_x(x - step * (p.phi.transpose() * grad_buf), step);
      v_new = p.update_v(v - (step * p.sm) * grad_buf, step);
      ax_new.noalias() = p.phi * x_new;
      ax_new += p.sm * v_new;
      obj_new = 0.5 * (ax_new - p.y).squaredNorm() + p.penalty(x_new, v_new);
    }

    const double delta_sq = (x_new - x).squaredNorm() + (v_new - v).squaredNorm();
    const double norm_sq = x_new.squaredNorm() + v_new.squaredNorm();
    settled_streak =
        std::sqrt(delta_sq) <= cfg.rel_tol * std::max(1.0, std::sqrt(norm_sq))
            ? settled_streak + 1
            : 0;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    zx = x_new + beta * (x_new - x);
    zv = v_new + beta * (v_new - v);
    az = ax_new + beta * (ax_new - ax);
    t = t_next;

    x.swap(x_new);
    v.swap(v_new);
    ax.swap(ax_new);
    obj = obj_new;
    sol.iters = iter;
    if (settled_streak >= 2) {
      sol.converged = true;
      break;
    }
  }

  // Gradient mapping at the final iterate with the canonical step 1/L.
  const double h = 1.0 / lips;
  grad_buf = ax - p.y;
  Vector px = p.update_x(x - h * (p.phi.transpose() * grad_buf), h);
  Vector pv = p.update_v(v - (h * p.sm) * grad_buf, h);
  sol.kkt_residual =
      lips * std::sqrt((x - px).squaredNorm() + (v - pv).squaredNorm());
  sol.objective = 0.5 * grad_buf.squaredNorm() + p.penalty(x, v);
  sol.x_hat = std::move(x);
  sol.v_hat = std::move(v);
  return sol;
}

}  // namespace

RecoverySolution solve_constrained(const Matrix& phi, const Vector& y,
                                   const Norm& f, double r1, const Norm& g,
                                   double r2, const SolverConfig& cfg) {
  if (y.size() != phi.rows()) throw ParameterError("solve_constrained: y length mismatch");
  if (r1 < 0 || r2 < 0) throw ParameterError("solve_constrained: radii must be >= 0");
  const double sm = std::sqrt(static_cast<double>(phi.rows()));
  CompositeProblem p{
      phi, y, sm,
      [&](const Vector& u, double) { return f.project_ball(u, r1); },
      [&](const Vector& u, double) { return g.project_ball(u, r2); },
      [](const Vector&, const Vector&) { return 0.0; }};
  RecoverySolution sol = run_accelerated(p, cfg);
  sol.objective = std::sqrt(2.0 * sol.objective);  // report the residual norm
  return sol;
}

RecoverySolution solve_unconstrained(const Matrix& phi, const Vector& y,
                                     const Norm& f, const Norm& g,
                                     const RegularizationPlan& plan,
                                     const SolverConfig& cfg) {
  if (y.size() != phi.rows()) throw ParameterError("solve_unconstrained: y length mismatch");
  plan.validate();
  const double sm = std::sqrt(static_cast<double>(phi.rows()));
  CompositeProblem p{
      phi, y, sm,
      [&](const Vector& u, double step) { return f.prox(u, step * plan.lambda1); },
      [&](const Vector& u, double step) { return g.prox(u, step * plan.lambda2); },
      [&](const Vector& x, const Vector& v) {
        return plan.lambda1 * f.evaluate(x) + plan.lambda2 * g.evaluate(v);
      }};
  return run_accelerated(p, cfg);
}

RecoverySolution solve_pbp(const Matrix& phi, const Vector& y, const Norm& f,
                           double r1, const Norm& g, double r2) {
  if (y.size() != phi.rows()) throw ParameterError("solve_pbp: y length mismatch");
  if (r1 < 0 || r2 < 0) throw ParameterError("solve_pbp: radii must be >= 0");
  const double m = static_cast<double>(phi.rows());
  const double sm = std::sqrt(m);
  RecoverySolution sol;
  sol.x_hat = f.project_ball((phi.transpose() * y) / m, r1);
  sol.v_hat = g.project_ball(y / sm, r2);
  sol.iters = 0;
  sol.converged = true;
  sol.kkt_residual = 0.0;
  sol.objective = (y - phi * sol.x_hat - sm * sol.v_hat).norm();
  return sol;
}

RegularizationPlan plan_lambdas(const StructureSpec& signal_spec,
                                const StructureSpec& corruption_spec, int m,
                                double delta, double eps, double ensemble_k,
                                PlanMode mode, double c1, double c2) {
  if (m < 1) throw ParameterError("plan_lambdas: m must be >= 1");
  if (!corruption_spec.is_sparse())
    throw ParameterError("plan_lambdas: corruption structure must be sparse");
  const double level = delta + eps;
  if (!(level > 0))
    throw ParameterError("plan_lambdas: delta + eps must be positive (plan undefined)");

  const double md = static_cast<double>(m);
  const double scale = mode == PlanMode::Fig2 ? 1.0 : ensemble_k;
  RegularizationPlan plan;
  if (signal_spec.is_sparse()) {
    plan.lambda1 = (mode == PlanMode::Fig2 ? 1.0 : c1) * scale * level *
                   std::sqrt(md * std::log(static_cast<double>(signal_spec.dim)));
  } else {
    plan.lambda1 = (mode == PlanMode::Fig2 ? 2.0 : c1) * scale * level *
                   std::sqrt(md * static_cast<double>(signal_spec.side));
  }
  plan.lambda2 = (mode == PlanMode::Fig2 ? 1.0 : c2) * scale * level *
                 std::sqrt(md * std::log(md));
  plan.kappa = 2.0 / (level * std::sqrt(md));
  plan.validate();
  return plan;
}

}  // namespace qcs

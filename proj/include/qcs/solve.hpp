#pragma once

#include "qcs/common.hpp"
#include "qcs/model.hpp"
#include "qcs/prox.hpp"

namespace qcs {

struct SolverConfig {
  int max_iters = 20000;
  double rel_tol = 1e-9;      // relative iterate change
  double step_safety = 1.0;   // multiplies 1/L, must stay in (0, 1]
  void validate() const;
};

// Output of any recovery procedure. `objective` is the residual norm
// ||y - Phi x - sqrt(m) v||_2 for the constrained solver and PBP, and the
// composite penalized value for the unconstrained solver. `kkt_residual` is
// the norm of the projected/proximal gradient mapping at the final iterate.
struct RecoverySolution {
  Vector x_hat;
  Vector v_hat;
  int iters = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  bool converged = false;
};

struct RegularizationPlan {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double kappa = 0.0;  // scaling constant used by the cone-complexity bound
  void validate() const;
};

enum class PlanMode { Corollary, Fig2 };

// Minimizes ||y - Phi x - sqrt(m) v||_2 over {f(x) <= r1} x {g(v) <= r2} by
// accelerated projected gradient on the squared residual (same minimizers).
// A radius of 0 pins the corresponding block to zero.
RecoverySolution solve_constrained(const Matrix& phi, const Vector& y,
                                   const Norm& f, double r1, const Norm& g,
                                   double r2, const SolverConfig& cfg = {});

// Minimizes 1/2 ||y - Phi x - sqrt(m) v||_2^2 + lambda1 f(x) + lambda2 g(v)
// by accelerated proximal gradient with function-value monotone restart.
RecoverySolution solve_unconstrained(const Matrix& phi, const Vector& y,
                                     const Norm& f, const Norm& g,
                                     const RegularizationPlan& plan,
                                     const SolverConfig& cfg = {});

// Projected back projection: projects ((1/m) Phi^T y, y / sqrt(m)) onto the
// product constraint set in one shot.
RecoverySolution solve_pbp(const Matrix& phi, const Vector& y, const Norm& f,
                           double r1, const Norm& g, double r2);

// Regularization parameters for the penalized procedure. Fig2 mode uses unit
// constants: sparse signals get lambda1 = (delta+eps) sqrt(m log n), low-rank
// signals lambda1 = 2 (delta+eps) sqrt(m d), and both get
// lambda2 = (delta+eps) sqrt(m log m). Corollary mode multiplies by the
// sub-Gaussian norm K and caller-supplied constants c1, c2. Logs are natural.
// kappa = 2 / ((delta+eps) sqrt(m)) in both modes.
RegularizationPlan plan_lambdas(const StructureSpec& signal_spec,
                                const StructureSpec& corruption_spec, int m,
                                double delta, double eps, double ensemble_k,
                                PlanMode mode, double c1 = 1.0, double c2 = 1.0);

}  // namespace qcs

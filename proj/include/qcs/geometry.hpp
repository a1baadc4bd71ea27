#pragma once

#include "qcs/common.hpp"
#include "qcs/model.hpp"
#include "qcs/prox.hpp"
#include "qcs/solve.hpp"

#include <string>

namespace qcs {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Closed-form upper bound on the squared spherical width of the descent cone:
// sparse -> 2 s log(n/s) + 1.5 s, low-rank -> 3 rho (2d - rho). A sparsity of
// 0 (zero vector, cone {0}) yields 0.
double width_bound_closed_form(const StructureSpec& spec);

// Closed-form upper bound on the Gaussian squared distance to the scaled
// subdifferential: sparse -> (lambda^2 + 3) s for lambda >= sqrt(2 log(n/s)),
// low-rank -> lambda^2 rho + 2d (rho + 1) for lambda >= 2 sqrt(d). Throws
// ParameterError naming the violated validity condition.
double eta2_bound_closed_form(const StructureSpec& spec, double lambda);

// 2 (omega_f + omega_g + 1); inputs are widths, not squared widths.
double cone_gamma_bound(double omega_f, double omega_g);

// 2 [ sqrt(eta2_f + eta2_g) + (kl1 alpha_f + kl2 alpha_g) / 2 + 1 ]
double c2_gamma_bound(double eta2_f, double eta2_g, double kl1, double kl2,
                      double alpha_f, double alpha_g);

// Gaussian complexity of the unit ball of `norm`: Monte Carlo average of the
// dual norm of a standard Gaussian vector. samples >= 100.
McEstimate mc_gaussian_complexity_ball(const Norm& norm, int dim, int samples,
                                       std::uint64_t seed);

// Squared distance of one Gaussian draw to lambda * (l1 subdifferential at a
// point with the given support signs): support coordinates contribute
// (g_i - lambda sign_i)^2, off-support max(|g_i| - lambda, 0)^2.
double eta2_l1_sample(const Vector& g, const Vector& support_signs, double lambda);

McEstimate mc_eta2_l1(const Vector& support_signs, double lambda, int samples,
                      std::uint64_t seed);

// Monte Carlo width of the l1 descent cone intersected with the sphere, via
// exact Euclidean projection of Gaussian draws onto the cone.
McEstimate mc_width_l1_descent_cone(const Vector& support_signs, int samples,
                                    std::uint64_t seed);

// Monte Carlo E ||g||_2 (width of the unit sphere).
McEstimate mc_sphere_width(int dim, int samples, std::uint64_t seed);

// K (delta + eps) gamma_cone / sqrt(m); the unspecified absolute constant is
// taken as 1, so this is a bound shape for slope and ratio checks only.
double theorem1_rhs(double ensemble_k, double delta, double eps, int m,
                    double gamma_cone);

// Whether (omega + witness)/3 - slack <= gamma <= 2 (omega + witness) + slack.
bool sandwich_check(double omega, double gamma, double witness_norm,
                    double slack = 0.0);

struct GeometryReport {
  double omega_f = 0.0;  // sqrt of the closed-form squared-width bound
  double omega_g = 0.0;
  double gamma_cone_bound = 0.0;
  double eta2_f = 0.0;
  double eta2_g = 0.0;
  double gamma_c2_bound = 0.0;
  double gamma_unit_ball_f = 0.0;  // Monte Carlo
  double gamma_unit_ball_g = 0.0;
  double theorem_error_bound = 0.0;
};

GeometryReport make_geometry_report(const StructureSpec& signal_spec,
                                    const StructureSpec& corruption_spec, int m,
                                    double delta, double eps, double ensemble_k,
                                    PlanMode mode, int samples,
                                    std::uint64_t seed);

std::string to_text(const GeometryReport& report);
std::string to_csv(const GeometryReport& report);

}  // namespace qcs

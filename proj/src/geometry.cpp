#include "qcs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace qcs {

namespace {

McEstimate summarize(const std::vector<double>& samples) {
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

Vector gaussian_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector g(dim);
  for (int i = 0; i < dim; ++i) g[i] = gauss(rng);
  return g;
}

}  // namespace

double width_bound_closed_form(const StructureSpec& spec) {
  spec.validate();
  if (spec.is_sparse()) {
    if (spec.sparsity == 0) return 0.0;
    const double s = spec.sparsity;
    const double n = spec.dim;
    return 2.0 * s * std::log(n / s) + 1.5 * s;
  }
  const double rho = spec.rank;
  const double d = spec.side;
  return 3.0 * rho * (2.0 * d - rho);
}

double eta2_bound_closed_form(const StructureSpec& spec, double lambda) {
  spec.validate();
  if (spec.is_sparse()) {
    if (spec.sparsity == 0)
      throw ParameterError("eta2 bound: no closed form for sparsity 0");
    const double s = spec.sparsity;
    const double n = spec.dim;
    const double threshold = std::sqrt(2.0 * std::log(n / s));
    if (lambda < threshold)
      throw ParameterError("eta2 bound: sparse case requires lambda >= sqrt(2 log(n/s)) = " +
                           std::to_string(threshold));
    return (lambda * lambda + 3.0) * s;
  }
  const double rho = spec.rank;
  const double d = spec.side;
  const double threshold = 2.0 * std::sqrt(d);
  if (lambda < threshold)
    throw ParameterError("eta2 bound: low-rank case requires lambda >= 2 sqrt(d) = " +
                         std::to_string(threshold));
  return lambda * lambda * rho + 2.0 * d * (rho + 1.0);
}

double cone_gamma_bound(double omega_f, double omega_g) {
  if (omega_f < 0 || omega_g < 0)
    throw ParameterError("cone_gamma_bound: widths must be >= 0");
  return 2.0 * (omega_f + omega_g + 1.0);
}

double c2_gamma_bound(double eta2_f, double eta2_g, double kl1, double kl2,
                      double alpha_f, double alpha_g) {
  if (eta2_f < 0 || eta2_g < 0 || kl1 < 0 || kl2 < 0 || alpha_f < 0 || alpha_g < 0)
    throw ParameterError("c2_gamma_bound: inputs must be >= 0");
  return 2.0 * (std::sqrt(eta2_f + eta2_g) + 0.5 * (kl1 * alpha_f + kl2 * alpha_g) + 1.0);
}

McEstimate mc_gaussian_complexity_ball(const Norm& norm, int dim, int samples,
                                       std::uint64_t seed) {
  if (samples < 100)
    throw ParameterError("mc_gaussian_complexity_ball: need at least 100 samples");
  auto rng = make_rng(mix_seed({seed, 0xBA77u}));
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i)
    values[i] = norm.dual_evaluate(gaussian_vector(dim, rng));
  return summarize(values);
}

double eta2_l1_sample(const Vector& g, const Vector& support_signs, double lambda) {
  if (g.size() != support_signs.size())
    throw ParameterError("eta2_l1_sample: length mismatch");
  if (lambda < 0) throw ParameterError("eta2_l1_sample: lambda must be >= 0");
  double total = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (support_signs[i] != 0.0) {
      const double sign = support_signs[i] > 0 ? 1.0 : -1.0;
      const double d = g[i] - lambda * sign;
      total += d * d;
    } else {
      const double d = std::max(std::abs(g[i]) - lambda, 0.0);
      total += d * d;
    }
  }
  return total;
}

McEstimate mc_eta2_l1(const Vector& support_signs, double lambda, int samples,
                      std::uint64_t seed) {
  if (samples < 100) throw ParameterError("mc_eta2_l1: need at least 100 samples");
  auto rng = make_rng(mix_seed({seed, 0xE7A2u}));
  const int n = static_cast<int>(support_signs.size());
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i)
    values[i] = eta2_l1_sample(gaussian_vector(n, rng), support_signs, lambda);
  return summarize(values);
}

namespace {

// Euclidean projection of g onto the descent cone of the l1 norm at a point
// with the given support signs: {u : <sign, u_S> + ||u_off||_1 <= 0}. The
// multiplier is found exactly by scanning the sorted off-support magnitudes.
Vector project_l1_descent_cone(const Vector& g, const Vector& support_signs) {
  double boundary = 0.0;
  int support_size = 0;
  std::vector<double> off;
  off.reserve(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (support_signs[i] != 0.0) {
      boundary += (support_signs[i] > 0 ? g[i] : -g[i]);
      ++support_size;
    } else {
      off.push_back(std::abs(g[i]));
    }
  }
  double off_l1 = 0.0;
  for (double a : off) off_l1 += a;
  if (boundary + off_l1 <= 0.0) return g;  // already in the cone
  if (support_size == 0) return Vector::Zero(g.size());

  std::sort(off.begin(), off.end(), std::greater<double>());
  double mu = 0.0;
  double prefix = 0.0;
  const double s = static_cast<double>(support_size);
  for (std::size_t j = 0; j <= off.size(); ++j) {
    const double hi = j == 0 ? std::numeric_limits<double>::infinity() : off[j - 1];
    const double lo = j == off.size() ? 0.0 : off[j];
    const double candidate = (boundary + prefix) / (s + static_cast<double>(j));
    if (candidate >= lo && candidate <= hi) {
      mu = candidate;
      break;
    }
    if (j < off.size()) prefix += off[j];
  }

  Vector u(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (support_signs[i] != 0.0)
      u[i] = g[i] - mu * (support_signs[i] > 0 ? 1.0 : -1.0);
    else
      u[i] = soft_threshold(g[i], mu);
  }
  return u;
}

}  // namespace

McEstimate mc_width_l1_descent_cone(const Vector& support_signs, int samples,
                                    std::uint64_t seed) {
  if (samples < 100)
    throw ParameterError("mc_width_l1_descent_cone: need at least 100 samples");
  auto rng = make_rng(mix_seed({seed, 0xDC0Eu}));
  const int n = static_cast<int>(support_signs.size());
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i)
    values[i] = project_l1_descent_cone(gaussian_vector(n, rng), support_signs).norm();
  return summarize(values);
}

McEstimate mc_sphere_width(int dim, int samples, std::uint64_t seed) {
  if (samples < 100) throw ParameterError("mc_sphere_width: need at least 100 samples");
  auto rng = make_rng(mix_seed({seed, 0x59E2u}));
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i) values[i] = gaussian_vector(dim, rng).norm();
  return summarize(values);
}

double theorem1_rhs(double ensemble_k, double delta, double eps, int m,
                    double gamma_cone) {
  if (m < 1) throw ParameterError("theorem1_rhs: m must be >= 1");
  return ensemble_k * (delta + eps) * gamma_cone / std::sqrt(static_cast<double>(m));
}

bool sandwich_check(double omega, double gamma, double witness_norm, double slack) {
  const double lower = (omega + witness_norm) / 3.0;
  const double upper = 2.0 * (omega + witness_norm);
  return gamma >= lower - slack && gamma <= upper + slack;
}

GeometryReport make_geometry_report(const StructureSpec& signal_spec,
                                    const StructureSpec& corruption_spec, int m,
                                    double delta, double eps, double ensemble_k,
                                    PlanMode mode, int samples,
                                    std::uint64_t seed) {
  GeometryReport report;
  report.omega_f = std::sqrt(width_bound_closed_form(signal_spec));
  report.omega_g = std::sqrt(width_bound_closed_form(corruption_spec));
  report.gamma_cone_bound = cone_gamma_bound(report.omega_f, report.omega_g);

  const auto plan = plan_lambdas(signal_spec, corruption_spec, m, delta, eps,
                                 ensemble_k, mode);
  const double kl1 = plan.kappa * plan.lambda1;
  const double kl2 = plan.kappa * plan.lambda2;
  report.eta2_f = eta2_bound_closed_form(signal_spec, kl1);
  report.eta2_g = eta2_bound_closed_form(corruption_spec, kl2);
  const auto f = norm_for(signal_spec);
  const auto g = norm_for(corruption_spec);
  report.gamma_c2_bound =
      c2_gamma_bound(report.eta2_f, report.eta2_g, kl1, kl2,
                     f->compatibility_alpha(signal_spec),
                     g->compatibility_alpha(corruption_spec));

  report.gamma_unit_ball_f =
      mc_gaussian_complexity_ball(*f, signal_spec.dim, samples, mix_seed({seed, 1})).mean;
  report.gamma_unit_ball_g =
      mc_gaussian_complexity_ball(*g, corruption_spec.dim, samples, mix_seed({seed, 2})).mean;
  report.theorem_error_bound =
      theorem1_rhs(ensemble_k, delta, eps, m, report.gamma_cone_bound);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string to_text(const GeometryReport& r) {
  std::ostringstream out;
  const auto line = [&out](const char* key, double value) {
    out << key;
    for (std::size_t i = std::string(key).size(); i < 22; ++i) out << ' ';
    out << fmt(value) << '\n';
  };
  line("omega_f", r.omega_f);
  line("omega_g", r.omega_g);
  line("gamma_cone_bound", r.gamma_cone_bound);
  line("eta2_f", r.eta2_f);
  line("eta2_g", r.eta2_g);
  line("gamma_c2_bound", r.gamma_c2_bound);
  line("gamma_unit_ball_f", r.gamma_unit_ball_f);
  line("gamma_unit_ball_g", r.gamma_unit_ball_g);
  line("theorem_error_bound", r.theorem_error_bound);
  return out.str();
}

std::string to_csv(const GeometryReport& r) {
  std::ostringstream out;
  out << "omega_f,omega_g,gamma_cone_bound,eta2_f,eta2_g,gamma_c2_bound,"
         "gamma_unit_ball_f,gamma_unit_ball_g,theorem_error_bound\n";
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                r.omega_f, r.omega_g, r.gamma_cone_bound, r.eta2_f, r.eta2_g,
                r.gamma_c2_bound, r.gamma_unit_ball_f, r.gamma_unit_ball_g,
                r.theorem_error_bound);
  out << buf;
  return out.str();
}

}  // namespace qcs

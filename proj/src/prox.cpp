#include "qcs/prox.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace qcs {

double soft_threshold(double x, double t) {
  if (t < 0) throw ParameterError("soft_threshold: t must be >= 0");
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

Vector soft_threshold(const Vector& v, double t) {
  if (t < 0) throw ParameterError("soft_threshold: t must be >= 0");
  return v.unaryExpr([t](double x) {
    return x > t ? x - t : (x < -t ? x + t : 0.0);
  });
}

Matrix svt(const Matrix& m, double t) {
  if (t < 0) throw ParameterError("svt: t must be >= 0");
  if (t == 0) return m;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("svt: SVD failed");
  Vector s = soft_threshold(svd.singularValues(), t);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

Vector project_l1_ball(const Vector& v, double r) {
  if (r < 0) throw ParameterError("project_l1_ball: radius must be >= 0");
  if (r == 0) return Vector::Zero(v.size());
  if (v.lpNorm<1>() <= r) return v;
  // Threshold search on the sorted magnitudes [Duchi et al.].
  std::vector<double> u(v.data(), v.data() + v.size());
  for (double& x : u) x = std::abs(x);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumulative += u[k];
    const double candidate = (cumulative - r) / static_cast<double>(k + 1);
    if (k + 1 == u.size() || u[k + 1] <= candidate) {
      theta = candidate;
      break;
    }
  }
  return soft_threshold(v, theta);
}

Matrix project_nuclear_ball(const Matrix& m, double r) {
  if (r < 0) throw ParameterError("project_nuclear_ball: radius must be >= 0");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("project_nuclear_ball: SVD failed");
  if (svd.singularValues().lpNorm<1>() <= r) return m;
  Vector s = project_l1_ball(svd.singularValues(), r);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

double operator_norm(const Matrix& a, double tol) {
  if (!(tol > 0)) throw ParameterError("operator_norm: tol must be positive");
  if (a.size() == 0 || a.cwiseAbs().maxCoeff() == 0.0) return 0.0;

  auto rng = make_rng(mix_seed({0x0Bu, static_cast<std::uint64_t>(a.rows()),
                                static_cast<std::uint64_t>(a.cols())}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector b(a.cols());
  for (Eigen::Index i = 0; i < b.size(); ++i) b[i] = gauss(rng);
  b.normalize();

  double estimate = 0.0;
  constexpr int kMaxIters = 10000;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    Vector w = a * b;
    const double next = w.norm();  // Rayleigh estimate, b is unit
    if (next == 0.0) return 0.0;   // b landed in the null space
    b.noalias() = a.transpose() * w;
    b.normalize();
    if (iter > 0 && std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  throw NumericError("operator_norm: power iteration did not reach tolerance");
}

// --- L1 ---

double L1Norm::evaluate(const Vector& v) const { return v.lpNorm<1>(); }

double L1Norm::dual_evaluate(const Vector& v) const {
  return v.lpNorm<Eigen::Infinity>();
}

Vector L1Norm::prox(const Vector& v, double t) const { return soft_threshold(v, t); }

Vector L1Norm::project_ball(const Vector& v, double radius) const {
  return project_l1_ball(v, radius);
}

double L1Norm::compatibility_alpha(const StructureSpec& spec) const {
  if (!spec.is_sparse())
    throw ParameterError("L1Norm: compatibility constant needs a sparse spec");
  return std::sqrt(static_cast<double>(spec.sparsity));
}

// --- Nuclear ---

NuclearNorm::NuclearNorm(int side) : side_(side) {
  if (side < 1) throw ParameterError("NuclearNorm: side must be >= 1");
}

Matrix NuclearNorm::as_matrix(const Vector& v) const {
  if (v.size() != static_cast<Eigen::Index>(side_) * side_)
    throw ParameterError("NuclearNorm: vector length must be side^2");
  return Eigen::Map<const Matrix>(v.data(), side_, side_);
}

double NuclearNorm::evaluate(const Vector& v) const {
  Eigen::JacobiSVD<Matrix> svd(as_matrix(v));
  return svd.singularValues().sum();
}

double NuclearNorm::dual_evaluate(const Vector& v) const {
  Eigen::JacobiSVD<Matrix> svd(as_matrix(v));
  return svd.singularValues()[0];
}

Vector NuclearNorm::prox(const Vector& v, double t) const {
  Matrix out = svt(as_matrix(v), t);
  return Eigen::Map<Vector>(out.data(), out.size());
}

Vector NuclearNorm::project_ball(const Vector& v, double radius) const {
  Matrix out = project_nuclear_ball(as_matrix(v), radius);
  return Eigen::Map<Vector>(out.data(), out.size());
}

double NuclearNorm::compatibility_alpha(const StructureSpec& spec) const {
  if (spec.is_sparse())
    throw ParameterError("NuclearNorm: compatibility constant needs a low-rank spec");
  return std::sqrt(static_cast<double>(spec.rank));
}

std::shared_ptr<const Norm> norm_for(const StructureSpec& spec) {
  if (spec.is_sparse()) return std::make_shared<L1Norm>();
  return std::make_shared<NuclearNorm>(spec.side);
}

}  // namespace qcs

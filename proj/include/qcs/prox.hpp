#pragma once

#include "qcs/common.hpp"
#include "qcs/model.hpp"

#include <memory>
#include <string>

namespace qcs {

double soft_threshold(double x, double t);
Vector soft_threshold(const Vector& v, double t);

// Prox of t * nuclear norm: SVD soft-thresholding of the spectrum.
Matrix svt(const Matrix& m, double t);

// Exact Euclidean projection onto {u : ||u||_1 <= r} via the sort-based
// threshold search. r = 0 projects onto the origin.
Vector project_l1_ball(const Vector& v, double r);

// Projects the singular-value vector onto the l1 ball and reassembles.
Matrix project_nuclear_ball(const Matrix& m, double r);

// Largest singular value by power iteration on A^T A, accurate to relative
// tol. Capped at 10000 iterations; throws NumericError if the tolerance is
// not met. Returns 0 for the zero matrix.
double operator_norm(const Matrix& a, double tol = 1e-10);

// A structure-promoting norm together with the pieces both solvers need.
// Vectors passed to the nuclear variant are column-major d x d matrices.
class Norm {
 public:
  virtual ~Norm() = default;
  virtual double evaluate(const Vector& v) const = 0;
  virtual double dual_evaluate(const Vector& v) const = 0;
  virtual Vector prox(const Vector& v, double t) const = 0;
  virtual Vector project_ball(const Vector& v, double radius) const = 0;
  virtual double compatibility_alpha(const StructureSpec& spec) const = 0;
  virtual std::string name() const = 0;
};

class L1Norm final : public Norm {
 public:
  double evaluate(const Vector& v) const override;
  double dual_evaluate(const Vector& v) const override;
  Vector prox(const Vector& v, double t) const override;
  Vector project_ball(const Vector& v, double radius) const override;
  double compatibility_alpha(const StructureSpec& spec) const override;
  std::string name() const override { return "l1"; }
};

class NuclearNorm final : public Norm {
 public:
  explicit NuclearNorm(int side);
  double evaluate(const Vector& v) const override;
  double dual_evaluate(const Vector& v) const override;
  Vector prox(const Vector& v, double t) const override;
  Vector project_ball(const Vector& v, double radius) const override;
  double compatibility_alpha(const StructureSpec& spec) const override;
  std::string name() const override { return "nuclear"; }
  int side() const { return side_; }

 private:
  Matrix as_matrix(const Vector& v) const;
  int side_;
};

std::shared_ptr<const Norm> norm_for(const StructureSpec& spec);

}  // namespace qcs

#pragma once

#include "qcs/common.hpp"

namespace qcs {

enum class StructureKind { SparseVector, LowRankMatrix };

// Declares a signal or corruption structure together with its generator
// parameters. Sparse vectors live in R^dim with at most `sparsity` nonzeros;
// low-rank matrices are side x side with rank at most `rank` and ambient
// dimension side^2.
struct StructureSpec {
  StructureKind kind = StructureKind::SparseVector;
  int dim = 0;       // ambient dimension (side^2 for matrices)
  int sparsity = 0;  // sparse only; 0 means the zero vector
  int side = 0;      // low-rank only
  int rank = 0;      // low-rank only

  static StructureSpec sparse(int dim, int sparsity);
  static StructureSpec low_rank(int side, int rank);

  bool is_sparse() const { return kind == StructureKind::SparseVector; }
  void validate() const;  // throws ParameterError
};

struct GroundTruth {
  Vector x_star;
  Vector v_star;
  StructureSpec signal_spec;
  StructureSpec corruption_spec;
};

enum class EnsembleKind { Gaussian, Rademacher };

// Both ensembles have i.i.d. unit-variance entries, so rows are centered and
// isotropic. nominal_K records the sub-Gaussian row norm used when evaluating
// theoretical bounds.
struct MeasurementEnsemble {
  EnsembleKind kind = EnsembleKind::Gaussian;
  double nominal_K = 1.0;
};

struct NoiseSpec {
  double epsilon = 0.0;  // exact l-infinity norm of the generated noise
};

// Sparse case: uniformly random support (partial Fisher-Yates), standard
// normal nonzeros. Low-rank case: product of two independent side x rank
// matrices with orthonormal columns (QR of Gaussian matrices), vectorized
// column-major. Deterministic given seed.
GroundTruth generate_ground_truth(const StructureSpec& signal_spec,
                                  const StructureSpec& corruption_spec,
                                  std::uint64_t seed);

Matrix sample_matrix(const MeasurementEnsemble& ensemble, int m, int n,
                     std::uint64_t seed);

// epsilon = 0 yields the zero vector; otherwise a standard Gaussian vector
// rescaled so that its l-infinity norm equals epsilon exactly.
Vector sample_noise(const NoiseSpec& spec, int m, std::uint64_t seed);

// y_bar = Phi x* + sqrt(m) v* + noise
Vector linear_observe(const Matrix& phi, const GroundTruth& truth,
                      const Vector& noise);

}  // namespace qcs

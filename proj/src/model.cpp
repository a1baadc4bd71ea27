#include "qcs/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace qcs {

StructureSpec StructureSpec::sparse(int dim, int sparsity) {
  StructureSpec spec;
  spec.kind = StructureKind::SparseVector;
  spec.dim = dim;
  spec.sparsity = sparsity;
  spec.validate();
  return spec;
}

StructureSpec StructureSpec::low_rank(int side, int rank) {
  StructureSpec spec;
  spec.kind = StructureKind::LowRankMatrix;
  spec.dim = side * side;
  spec.side = side;
  spec.rank = rank;
  spec.validate();
  return spec;
}

void StructureSpec::validate() const {
  if (kind == StructureKind::SparseVector) {
    if (dim < 1) throw ParameterError("sparse structure: dim must be >= 1");
    if (sparsity < 0 || sparsity > dim)
      throw ParameterError("sparse structure: need 0 <= sparsity <= dim, got s=" +
                           std::to_string(sparsity) + ", n=" + std::to_string(dim));
  } else {
    if (side < 1) throw ParameterError("low-rank structure: side must be >= 1");
    if (rank < 1 || rank > side)
      throw ParameterError("low-rank structure: need 1 <= rank <= side, got rank=" +
                           std::to_string(rank) + ", side=" + std::to_string(side));
    if (dim != side * side)
      throw ParameterError("low-rank structure: ambient dim must equal side^2");
  }
}

namespace {

Vector sample_sparse_vector(int n, int s, std::mt19937_64& rng) {
  Vector x = Vector::Zero(n);
  if (s == 0) return x;
  // Partial Fisher-Yates: exact uniform support without replacement.
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < s; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
    x[idx[i]] = gauss(rng);
  }
  return x;
}

Matrix orthonormal_columns(int d, int rank, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(d, rank);
  for (int j = 0; j < rank; ++j)
    for (int i = 0; i < d; ++i) g(i, j) = gauss(rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(d, rank);
}

}  // namespace

GroundTruth generate_ground_truth(const StructureSpec& signal_spec,
                                  const StructureSpec& corruption_spec,
                                  std::uint64_t seed) {
  signal_spec.validate();
  corruption_spec.validate();
  if (!corruption_spec.is_sparse())
    throw ParameterError("corruption structure must be a sparse vector");

  GroundTruth truth;
  truth.signal_spec = signal_spec;
  truth.corruption_spec = corruption_spec;

  auto rng_signal = make_rng(mix_seed({seed, 0x5167u}));
  if (signal_spec.is_sparse()) {
    truth.x_star = sample_sparse_vector(signal_spec.dim, signal_spec.sparsity, rng_signal);
  } else {
    const int d = signal_spec.side;
    Matrix u1 = orthonormal_columns(d, signal_spec.rank, rng_signal);
    Matrix u2 = orthonormal_columns(d, signal_spec.rank, rng_signal);
    Matrix x = u1 * u2.transpose();
    truth.x_star = Eigen::Map<Vector>(x.data(), x.size());
  }

  auto rng_corruption = make_rng(mix_seed({seed, 0xC027u}));
  truth.v_star = sample_sparse_vector(corruption_spec.dim, corruption_spec.sparsity,
                                      rng_corruption);
  return truth;
}

Matrix sample_matrix(const MeasurementEnsemble& ensemble, int m, int n,
                     std::uint64_t seed) {
  if (m < 1 || n < 1) throw ParameterError("sample_matrix: m and n must be >= 1");
  auto rng = make_rng(mix_seed({seed, 0x3A72u}));
  Matrix phi(m, n);
  if (ensemble.kind == EnsembleKind::Gaussian) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) phi(i, j) = gauss(rng);
  } else {
    std::bernoulli_distribution coin(0.5);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < m; ++i) phi(i, j) = coin(rng) ? 1.0 : -1.0;
  }
  return phi;
}

Vector sample_noise(const NoiseSpec& spec, int m, std::uint64_t seed) {
  if (m < 1) throw ParameterError("sample_noise: m must be >= 1");
  if (spec.epsilon < 0) throw ParameterError("sample_noise: epsilon must be >= 0");
  if (spec.epsilon == 0.0) return Vector::Zero(m);
  auto rng = make_rng(mix_seed({seed, 0x901Eu}));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(m);
  for (int i = 0; i < m; ++i) z[i] = gauss(rng);
  const double linf = z.cwiseAbs().maxCoeff();
  return z * (spec.epsilon / linf);
}

Vector linear_observe(const Matrix& phi, const GroundTruth& truth,
                      const Vector& noise) {
  const auto m = phi.rows();
  if (truth.x_star.size() != phi.cols())
    throw ParameterError("linear_observe: signal length does not match matrix columns");
  if (truth.v_star.size() != m)
    throw ParameterError("linear_observe: corruption length does not match matrix rows");
  if (noise.size() != m)
    throw ParameterError("linear_observe: noise length does not match matrix rows");
  return phi * truth.x_star + std::sqrt(static_cast<double>(m)) * truth.v_star + noise;
}

}  // namespace qcs

#include "qcs/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qcs {

QuantizationScheme QuantizationScheme::uniform(double delta, bool dithered) {
  QuantizationScheme s;
  s.nonlinearity = Nonlinearity::UniformQuantizer;
  s.delta = delta;
  s.dithered = dithered;
  s.validate();
  return s;
}

QuantizationScheme QuantizationScheme::sign() {
  return {Nonlinearity::Sign, 0.0, false};
}

QuantizationScheme QuantizationScheme::tanh() {
  return {Nonlinearity::Tanh, 0.0, false};
}

QuantizationScheme QuantizationScheme::identity() {
  return {Nonlinearity::Identity, 0.0, false};
}

void QuantizationScheme::validate() const {
  if (nonlinearity == Nonlinearity::UniformQuantizer &&
      !(delta > 0.0 && std::isfinite(delta)))
    throw ParameterError("quantization scheme: delta must be positive and finite");
}

double quantize_uniform(double x, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ParameterError("quantize_uniform: delta must be positive and finite");
  if (!std::isfinite(x)) throw ParameterError("quantize_uniform: input must be finite");
  return delta * (std::floor(x / delta) + 0.5);
}

Vector quantize_uniform(const Vector& x, double delta) {
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = quantize_uniform(x[i], delta);
  return y;
}

Vector sample_dither(int m, double delta, std::uint64_t seed) {
  if (m < 1) throw ParameterError("sample_dither: m must be >= 1");
  if (!(delta > 0.0)) throw ParameterError("sample_dither: delta must be positive");
  auto rng = make_rng(mix_seed({seed, 0xD17Eu}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector tau(m);
  for (int i = 0; i < m; ++i) tau[i] = delta * (unit(rng) - 0.5);
  return tau;
}

Observation observe(const Vector& y_bar, const QuantizationScheme& scheme,
                    std::uint64_t seed) {
  scheme.validate();
  Observation obs;
  obs.dither = Vector::Zero(y_bar.size());
  switch (scheme.nonlinearity) {
    case Nonlinearity::UniformQuantizer:
      if (scheme.dithered) {
        obs.dither = sample_dither(static_cast<int>(y_bar.size()), scheme.delta, seed);
        obs.y = quantize_uniform(y_bar + obs.dither, scheme.delta);
      } else {
        obs.y = quantize_uniform(y_bar, scheme.delta);
      }
      break;
    case Nonlinearity::Sign:
      obs.y = y_bar.unaryExpr([](double t) { return t >= 0.0 ? 1.0 : -1.0; });
      break;
    case Nonlinearity::Tanh:
      obs.y = y_bar.unaryExpr([](double t) { return std::tanh(t); });
      break;
    case Nonlinearity::Identity:
      obs.y = y_bar;
      break;
  }
  return obs;
}

QuantizationErrorReport quantization_error_diagnostics(const Vector& y_bar,
                                                       const Vector& y,
                                                       const Vector& dither,
                                                       double delta) {
  const auto m = y_bar.size();
  if (y.size() != m || dither.size() != m)
    throw ParameterError("quantization_error_diagnostics: length mismatch");
  if (m < 2) throw ParameterError("quantization_error_diagnostics: need at least 2 samples");
  if (!(delta > 0.0)) throw ParameterError("quantization_error_diagnostics: delta must be positive");

  const Vector z = y - y_bar - dither;
  QuantizationErrorReport report;
  report.mean = z.mean();
  const Vector zc = z.array() - report.mean;
  report.variance = zc.squaredNorm() / static_cast<double>(m - 1);
  report.max_abs = z.cwiseAbs().maxCoeff();

  const double input_mean = y_bar.mean();
  const Vector yc = y_bar.array() - input_mean;
  // A numerically constant input has no meaningful correlation.
  const double input_scale = std::max(1.0, std::abs(input_mean));
  if (yc.cwiseAbs().maxCoeff() <= 1e-12 * input_scale) {
    report.input_correlation = 0.0;
    return report;
  }
  const double denom = std::sqrt(zc.squaredNorm() * yc.squaredNorm());
  report.input_correlation = denom > 0.0 ? zc.dot(yc) / denom : 0.0;
  return report;
}

double ks_distance_uniform(const Vector& samples, double delta) {
  if (samples.size() < 1) throw ParameterError("ks_distance_uniform: empty sample");
  if (!(delta > 0.0)) throw ParameterError("ks_distance_uniform: delta must be positive");
  std::vector<double> z(samples.data(), samples.data() + samples.size());
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double cdf = std::clamp((z[i] + delta / 2.0) / delta, 0.0, 1.0);
    dist = std::max(dist, std::abs((static_cast<double>(i) + 1.0) / n - cdf));
    dist = std::max(dist, std::abs(cdf - static_cast<double>(i) / n));
  }
  return dist;
}

}  // namespace qcs

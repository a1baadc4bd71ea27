#pragma once

#include "qcs/common.hpp"

namespace qcs {

enum class Nonlinearity { UniformQuantizer, Sign, Tanh, Identity };

struct QuantizationScheme {
  Nonlinearity nonlinearity = Nonlinearity::UniformQuantizer;
  double delta = 0.1;    // cell width, UniformQuantizer only
  bool dithered = true;  // UniformQuantizer only; dither amplitude delta/2

  static QuantizationScheme uniform(double delta, bool dithered = true);
  static QuantizationScheme sign();
  static QuantizationScheme tanh();
  static QuantizationScheme identity();
  void validate() const;
};

// Maps x to the midpoint of its cell: delta * (floor(x/delta) + 1/2).
// Inputs on a cell boundary take the upper cell (floor semantics).
double quantize_uniform(double x, double delta);
Vector quantize_uniform(const Vector& x, double delta);

// i.i.d. uniform on [-delta/2, delta/2), deterministic given seed.
Vector sample_dither(int m, double delta, std::uint64_t seed);

struct Observation {
  Vector y;
  Vector dither;  // zero vector unless the scheme dithers
};

Observation observe(const Vector& y_bar, const QuantizationScheme& scheme,
                    std::uint64_t seed);

// Statistics of the quantization error z = y - y_bar - dither.
struct QuantizationErrorReport {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double max_abs = 0.0;
  double input_correlation = 0.0;  // Pearson corr(z, y_bar); 0 if y_bar constant
};

QuantizationErrorReport quantization_error_diagnostics(const Vector& y_bar,
                                                       const Vector& y,
                                                       const Vector& dither,
                                                       double delta);

// Kolmogorov-Smirnov distance between the samples and Unif(-delta/2, delta/2].
double ks_distance_uniform(const Vector& samples, double delta);

}  // namespace qcs

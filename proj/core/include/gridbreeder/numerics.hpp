#pragma once

#include <complex>
#include <span>
#include <vector>

namespace gridbreeder {

/// A complex number carried as (ln|z|, arg z). Overlap kernels of strongly
/// squeezed states produce factors like exp(-xi^2 (j-k)^2 / (4 Delta^2)) that
/// underflow double precision long before they stop mattering relative to
/// each other, so magnitudes are accumulated in the log domain throughout.
struct LogComplex {
  double log_mag;  // ln|z|; -infinity encodes an exact zero
  double phase;    // radians, wrapped to [-pi, pi)

  static LogComplex zero();
  static LogComplex from(std::complex<double> z);
  /// May overflow/underflow for extreme log_mag; fine for |log_mag| < 700.
  std::complex<double> value() const;
};

/// Wrap an angle to [-pi, pi).
double wrap_angle(double theta);

/// ln I0(kappa) for kappa >= 0. Power series below kappa = 15, asymptotic
/// expansion above; relative error < 1e-12 across [0, 1e8].
double log_bessel_i0(double kappa);

/// I1(kappa)/I0(kappa) in [0, 1), strictly increasing. Continued fraction
/// below kappa = 15, quotient of asymptotic series above.
double bessel_ratio_i1_i0(double kappa);

/// Pal'tsev's two-sided bound exp(kappa -+ 1/(2 kappa)) / sqrt(2 pi kappa)
/// on I0(kappa), returned as logs so kappa ~ 1e3 does not overflow.
/// The upper bound extends to all kappa > 0 (not just kappa > (sqrt7+2)/3).
struct PaltsevBounds {
  double log_lower;
  double log_upper;
};
PaltsevBounds paltsev_bounds(double kappa);

/// Sum of log-domain complex terms, rescaled by the largest magnitude.
/// Empty input or all-zero terms give an exact zero. Compensated
/// accumulation keeps the result permutation invariant to ~1e-14.
LogComplex stable_complex_sum(std::span<const LogComplex> terms);

}  // namespace gridbreeder

#pragma once

#include <vector>

#include "gridbreeder/config.hpp"
#include "gridbreeder/rng.hpp"

namespace gridbreeder {

/// Approximate grid state closed under breeding: a von Mises wave function
/// of concentration kappa and mean mu over the periodic p-shift, a wrapped
/// Gaussian of scale s_m * delta over the q-shift, at round m of an M-round
/// protocol with target spacing xi. scale() = sqrt(2^(m-M)); delta = 0 is
/// the infinite-squeezing model used for the von Mises simulation curve.
struct VonMisesGridState {
  double kappa = 0.0;
  double mu = 0.0;  // wrapped to [-pi, pi)
  int round = 0;    // m in 0..rounds_total
  int rounds_total = 0;
  double delta = 0.0;
  double xi = 0.0;

  double scale() const;  // s_m
};

/// Product of two von Mises wave functions is again one:
///   V_k1(x - mu1) V_k2(x - mu2) = prefactor * V_k(x - mu),
/// kappa^2 = k1^2 + k2^2 + 2 k1 k2 cos(mu1 - mu2),
/// mu = atan2(k1 sin mu1 + k2 sin mu2, k1 cos mu1 + k2 cos mu2),
/// prefactor = sqrt(I0(kappa) / (2 pi I0(k1) I0(k2))) (returned as a log).
struct VonMisesProduct {
  double kappa;
  double mu;
  double log_prefactor;
};
VonMisesProduct von_mises_product(double kappa1, double mu1, double kappa2,
                                  double mu2);

/// One breeding round in (kappa, mu) space. With ptilde =
/// 2 pi p_out / (xi s_{m+1}), the port wave functions shift to means
/// mu1 + ptilde and mu2 - ptilde before multiplying, so
///   kappa_out^2 = k1^2 + k2^2 + 2 k1 k2 cos(mu1 - mu2 + 2 ptilde),
/// clamped to kappa1 + kappa2 against roundoff. Inputs must share round,
/// delta, xi (ContractError otherwise); output has round m+1.
VonMisesGridState breed_step(const VonMisesGridState& s1,
                             const VonMisesGridState& s2, double p_out);

/// Outcome density of one round: P(p) ~ I0(kappa_out(p)) exp(-p^2 d^2/xi^2),
/// normalized numerically over the Gaussian envelope support. Evaluated in
/// the log domain so kappa ~ 1e3 cannot overflow.
struct MisesOutcomeDensity {
  double kappa1, kappa2, mu1, mu2;
  double delta, xi, scale_next;
  double log_norm;  // log of the normalization constant

  double log_unnormalized(double p) const;
  double value(double p) const;
};
MisesOutcomeDensity outcome_density(const VonMisesGridState& s1,
                                    const VonMisesGridState& s2);

/// Tabulated inverse CDF of the large-squeezing-limit outcome variable x,
/// with density P(x) = I0(kappa_out(x)) / (2 pi I0(k1) I0(k2)) on [-pi, pi).
class XSampler {
 public:
  XSampler(double kappa1, double kappa2);
  double sample(CounterRng& rng) const;

 private:
  std::vector<double> cdf_;
};

/// One-shot draw from the x-density; deterministic given the rng state.
/// Use XSampler directly when many draws share one (kappa1, kappa2).
double sample_x(double kappa1, double kappa2, CounterRng& rng);

/// Effective squeezing of the m = M von Mises state,
/// sqrt(ln(I0^2/I1^2)/pi); +inf at kappa = 0, ~ 1/sqrt(pi kappa) for
/// large kappa.
double effective_squeezing_from_kappa(double kappa);

/// Probability bound P(kappa_out >= (k1+k2)(1-eps)) >= delta with
/// delta = 1 - sqrt(2 pi k1 k2 / ((k1+k2)(1-eps))) exp(-eps(k1+k2+1) + 5/4).
/// Requires k1, k2 >= 1/(1-eps) and eps in (0,1); the bound may be vacuous
/// (delta < 0) and is returned as-is.
double improvement_probability_bound(double kappa1, double kappa2, double epsilon);

/// Variance form of the bound: Var_out <= v1 v2 / ((1-eps)(v1+v2)).
double variance_bound(double var1, double var2, double epsilon);

/// kappa with the same effective squeezing as the spacing-xi squeezed cat
/// at the given delta (the Fig.-4 calibration), by bisection to 1e-10.
double calibrate_kappa0(double delta, double xi);

/// All states of the binary-tree protocol, level by level:
/// levels[m] holds the 2^(M-m) round-m states; levels[M][0] is the root.
struct MisesTrajectory {
  std::vector<std::vector<VonMisesGridState>> levels;
  const VonMisesGridState& root() const { return levels.back().front(); }
};

/// Efficient breeding entirely in (kappa, mu) space with 2^M leaves of
/// concentration kappa0 and mu = 0. Leaves use delta = 0 (the x-density);
/// a finite delta switches to the full outcome density once
/// delta * s_m >= 0.3.
MisesTrajectory run_mises_protocol(const ProtocolConfig& config, double kappa0,
                                   CounterRng& rng);

/// Squared normalization constant of the wrapped-Gaussian x von Mises state
/// by quadrature; approaches 1 as scale * delta -> 0.
double mises_norm_squared(double kappa, double scale_delta);

}  // namespace gridbreeder

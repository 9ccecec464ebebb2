#include "gridbreeder/mises_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "gridbreeder/errors.hpp"
#include "gridbreeder/gaussian_state.hpp"
#include "gridbreeder/numerics.hpp"

namespace gridbreeder {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double kappa_out_at(double kappa1, double kappa2, double x) {
  double k2 = kappa1 * kappa1 + kappa2 * kappa2 +
              2.0 * kappa1 * kappa2 * std::cos(x);
  double k = std::sqrt(std::max(0.0, k2));
  return std::min(k, kappa1 + kappa2);  // triangle bound, exact in reals
}

void check_mergeable(const VonMisesGridState& a, const VonMisesGridState& b) {
  if (a.round != b.round || a.rounds_total != b.rounds_total)
    throw ContractError("breed_step: ports must sit at the same round");
  if (a.round >= a.rounds_total)
    throw ContractError("breed_step: protocol already finished");
  if (a.delta != b.delta || a.xi != b.xi)
    throw ContractError("breed_step: ports must share delta and xi");
  if (a.kappa < 0.0 || b.kappa < 0.0)
    throw std::domain_error("breed_step: kappa must be >= 0");
}

// Inverse-CDF draw from an unnormalized log-density over [lo, hi] tabulated
// on a uniform grid (trapezoid cells, doubled once for a convergence check).
double grid_inverse_cdf(const std::vector<double>& logf, double lo, double hi,
                        double u) {
  std::size_t n = logf.size() - 1;
  double peak = *std::max_element(logf.begin(), logf.end());
  std::vector<double> cdf(n + 1, 0.0);
  double h = (hi - lo) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = std::exp(logf[i] - peak);
    double b = std::exp(logf[i + 1] - peak);
    cdf[i + 1] = cdf[i] + 0.5 * h * (a + b);
  }
  double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  std::size_t idx = it == cdf.begin()
                        ? 0
                        : static_cast<std::size_t>(it - cdf.begin()) - 1;
  if (idx >= n) idx = n - 1;
  double mass = cdf[idx + 1] - cdf[idx];
  double frac = mass > 0.0 ? (target - cdf[idx]) / mass : 0.5;
  return lo + (static_cast<double>(idx) + frac) * h;
}

}  // namespace

double VonMisesGridState::scale() const {
  return std::sqrt(std::pow(2.0, round - rounds_total));
}

VonMisesProduct von_mises_product(double kappa1, double mu1, double kappa2,
                                  double mu2) {
  if (kappa1 < 0.0 || kappa2 < 0.0)
    throw std::domain_error("von_mises_product: kappa must be >= 0");
  double a = kappa1 * std::cos(mu1) + kappa2 * std::cos(mu2);
  double b = kappa1 * std::sin(mu1) + kappa2 * std::sin(mu2);
  double kappa = std::min(std::hypot(a, b), kappa1 + kappa2);
  double mu = (a == 0.0 && b == 0.0) ? 0.0 : std::atan2(b, a);
  double log_pref = 0.5 * (log_bessel_i0(kappa) - std::log(kTwoPi) -
                           log_bessel_i0(kappa1) - log_bessel_i0(kappa2));
  return {kappa, wrap_angle(mu), log_pref};
}

VonMisesGridState breed_step(const VonMisesGridState& s1,
                             const VonMisesGridState& s2, double p_out) {
  check_mergeable(s1, s2);
  VonMisesGridState out = s1;
  out.round = s1.round + 1;
  double ptilde = kTwoPi * p_out / (s1.xi * out.scale());
  VonMisesProduct prod = von_mises_product(s1.kappa, wrap_angle(s1.mu + ptilde),
                                           s2.kappa, wrap_angle(s2.mu - ptilde));
  out.kappa = prod.kappa;
  out.mu = prod.mu;
  return out;
}

double MisesOutcomeDensity::log_unnormalized(double p) const {
  double ptilde = kTwoPi * p / (xi * scale_next);
  double x = mu1 - mu2 + 2.0 * ptilde;
  double k = kappa_out_at(kappa1, kappa2, x);
  return log_bessel_i0(k) - p * p * delta * delta / (xi * xi);
}

double MisesOutcomeDensity::value(double p) const {
  return std::exp(log_unnormalized(p) - log_norm);
}

MisesOutcomeDensity outcome_density(const VonMisesGridState& s1,
                                    const VonMisesGridState& s2) {
  check_mergeable(s1, s2);
  if (!(s1.delta > 0.0))
    throw ContractError("outcome_density needs delta > 0; use the x-density");
  VonMisesGridState next = s1;
  next.round += 1;
  MisesOutcomeDensity d{s1.kappa, s2.kappa, s1.mu, s2.mu,
                        s1.delta, s1.xi,    next.scale(), 0.0};
  // Normalize over the envelope support by log-domain trapezoid quadrature.
  double span = 6.0 * s1.xi / s1.delta;
  std::size_t n = std::size_t{1} << 14;
  double h = 2.0 * span / static_cast<double>(n);
  std::vector<double> logf(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    logf[i] = d.log_unnormalized(-span + static_cast<double>(i) * h);
  double peak = *std::max_element(logf.begin(), logf.end());
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    acc += 0.5 * h * (std::exp(logf[i] - peak) + std::exp(logf[i + 1] - peak));
  d.log_norm = peak + std::log(acc);
  return d;
}

double sample_x(double kappa1, double kappa2, CounterRng& rng) {
  if (kappa1 < 0.0 || kappa2 < 0.0)
    throw std::domain_error("sample_x: kappa must be >= 0");
  double norm = std::log(kTwoPi) + log_bessel_i0(kappa1) + log_bessel_i0(kappa2);
  std::size_t n = std::size_t{1} << 14;
  std::vector<double> logf(n + 1);
  double h = kTwoPi / static_cast<double>(n);
  for (std::size_t i = 0; i <= n; ++i) {
    double x = -kPi + static_cast<double>(i) * h;
    logf[i] = log_bessel_i0(kappa_out_at(kappa1, kappa2, x)) - norm;
  }
  double x = grid_inverse_cdf(logf, -kPi, kPi, rng.next_double());
  return wrap_angle(x);
}

double effective_squeezing_from_kappa(double kappa) {
  if (kappa < 0.0)
    throw std::domain_error("effective_squeezing_from_kappa: kappa must be >= 0");
  double ratio = bessel_ratio_i1_i0(kappa);
  if (ratio <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(ratio) / kPi);
}

double improvement_probability_bound(double kappa1, double kappa2, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0))
    throw std::domain_error("bound: epsilon must be in (0, 1)");
  double floor = 1.0 / (1.0 - epsilon);
  if (kappa1 < floor || kappa2 < floor)
    throw std::domain_error("bound: requires kappa >= 1/(1-epsilon)");
  double pref = std::sqrt(kTwoPi * kappa1 * kappa2 /
                          ((kappa1 + kappa2) * (1.0 - epsilon)));
  return 1.0 - pref * std::exp(-epsilon * (kappa1 + kappa2 + 1.0) + 1.25);
}

double variance_bound(double var1, double var2, double epsilon) {
  if (!(var1 > 0.0) || !(var2 > 0.0))
    throw std::domain_error("variance_bound: variances must be > 0");
  if (!(epsilon >= 0.0) || !(epsilon < 1.0))
    throw std::domain_error("variance_bound: epsilon must be in [0, 1)");
  return var1 * var2 / ((1.0 - epsilon) * (var1 + var2));
}

double calibrate_kappa0(double delta, double xi) {
  auto cat = normalize(
      apply_measurement_op(squeezed_vacuum(delta), 0.0, xi / std::sqrt(2.0)));
  double target = squeezing_report(cat, xi).delta_p;
  // Delta_p(kappa) is strictly decreasing; bisect on it.
  double lo = 1e-9, hi = 1e9;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (effective_squeezing_from_kappa(mid) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi);
}

MisesTrajectory run_mises_protocol(const ProtocolConfig& config, double kappa0,
                                   CounterRng& rng) {
  config.validate();
  if (kappa0 < 0.0) throw std::domain_error("run_mises_protocol: kappa0 >= 0");
  int rounds = config.rounds_max;

  MisesTrajectory traj;
  traj.levels.resize(rounds + 1);
  VonMisesGridState leaf{kappa0, 0.0, 0, rounds, 0.0, config.xi};
  traj.levels[0].assign(std::size_t{1} << rounds, leaf);

  for (int m = 0; m < rounds; ++m) {
    const auto& cur = traj.levels[m];
    auto& next = traj.levels[m + 1];
    next.resize(cur.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const VonMisesGridState& a = cur[2 * i];
      const VonMisesGridState& b = cur[2 * i + 1];
      double s_next = std::sqrt(std::pow(2.0, m + 1 - rounds));
      double p_out;
      if (a.delta * a.scale() < 0.3) {
        // Large-squeezing regime: draw the wrapped variable directly and
        // map it back to a homodyne outcome.
        double x = sample_x(a.kappa, b.kappa, rng);
        double ptilde = 0.5 * (x - wrap_angle(a.mu - b.mu));
        p_out = a.xi * s_next * ptilde / kTwoPi;
      } else {
        MisesOutcomeDensity density = outcome_density(a, b);
        std::size_t n = std::size_t{1} << 14;
        double span = 6.0 * a.xi / a.delta;
        std::vector<double> logf(n + 1);
        double h = 2.0 * span / static_cast<double>(n);
        for (std::size_t j = 0; j <= n; ++j)
          logf[j] = density.log_unnormalized(-span + static_cast<double>(j) * h);
        p_out = grid_inverse_cdf(logf, -span, span, rng.next_double());
      }
      next[i] = breed_step(a, b, p_out);
    }
  }
  return traj;
}

double mises_norm_squared(double kappa, double scale_delta) {
  if (!(scale_delta > 0.0))
    throw std::domain_error("mises_norm_squared: scale_delta must be > 0");
  // N^2 = int du |V_kappa(u)|^2 sum_{s,t} e^{iu(s-t)} (1/2)
  //       exp(-pi^2 (s-t)^2 / sd^2) [erf(pi(s+t+1)/sd) - erf(pi(s+t-1)/sd)].
  // The u integral of |V|^2 e^{ium} is the wrapped von Mises characteristic
  // function I_|m|(kappa)/I0(kappa); evaluate the few surviving (s,t).
  int cut = 2 + static_cast<int>(scale_delta);
  double acc = 0.0;
  std::size_t n = 4096;
  for (int s = -cut; s <= cut; ++s)
    for (int t = -cut; t <= cut; ++t) {
      int m = s - t;
      double gauss = std::exp(-kPi * kPi * m * m / (scale_delta * scale_delta));
      if (gauss == 0.0) continue;
      double erfs = 0.5 * (std::erf(kPi * (s + t + 1) / scale_delta) -
                           std::erf(kPi * (s + t - 1) / scale_delta));
      if (erfs == 0.0) continue;
      // (1/(2 pi I0)) int e^{kappa cos u} cos(mu) du by trapezoid (exact
      // for the smooth periodic integrand at this resolution).
      double ci = 0.0;
      double h = kTwoPi / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) {
        double u = -kPi + static_cast<double>(i) * h;
        ci += std::exp(kappa * std::cos(u) - log_bessel_i0(kappa)) * std::cos(m * u);
      }
      ci *= h / kTwoPi;
      acc += ci * gauss * erfs;
    }
  return acc;
}

}  // namespace gridbreeder

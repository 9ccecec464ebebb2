#include "gridbreeder/gaussian_state.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "gridbreeder/errors.hpp"

namespace gridbreeder {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kLatticeTol = 1e-9;

// <S(D)vac| D(w) |S(D)vac> = exp(-(Re w)^2/(2 D^2) - (Im w)^2 D^2 / 2).
double log_vacuum_kernel(Complex w, double delta) {
  double x = w.real(), y = w.imag();
  return -x * x / (2.0 * delta * delta) - y * y * delta * delta / 2.0;
}

// <D(z1) S vac | D(beta) D(z2) S vac> as a LogComplex.
// D(beta) D(z2) = e^{i Im(beta z2*)} D(beta + z2), then
// <D(z1) phi | D(v) phi> = e^{i Im(v z1*)} <phi|D(v - z1)|phi>.
LogComplex pair_term(Complex z1, Complex z2, Complex beta, double delta) {
  Complex v = beta + z2;
  double phase = std::imag(beta * std::conj(z2)) + std::imag(v * std::conj(z1));
  return {log_vacuum_kernel(v - z1, delta), wrap_angle(phase)};
}

void check_same_delta(const DisplacedSqueezedSum& a, const DisplacedSqueezedSum& b) {
  if (std::abs(a.delta - b.delta) > 1e-12 * std::max(a.delta, b.delta))
    throw UnsupportedError("states must share the squeezing parameter");
}

}  // namespace

DisplacedSqueezedSum squeezed_vacuum(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::domain_error("squeezed_vacuum: delta must be > 0");
  DisplacedSqueezedSum s;
  s.delta = delta;
  s.step = 1.0;
  s.coeff[0] = 1.0;
  s.normalized = true;
  return s;
}

DisplacedSqueezedSum gkp_approx(double delta, double kappa_env, double xi, int t_max) {
  if (t_max < 1) throw std::domain_error("gkp_approx: t_max must be >= 1");
  if (!(delta > 0.0) || !(xi > 0.0))
    throw std::domain_error("gkp_approx: delta and xi must be > 0");
  DisplacedSqueezedSum s;
  s.delta = delta;
  s.step = xi / kSqrt2;
  for (int t = -t_max; t <= t_max; ++t) {
    double c = std::exp(-kPi * kappa_env * kappa_env * t * t);
    if (c > 0.0 || t == 0) s.coeff[t] = c;
  }
  return normalize(s);
}

DisplacedSqueezedSum apply_measurement_op(const DisplacedSqueezedSum& state,
                                          double phi, double alpha) {
  DisplacedSqueezedSum out = state;
  out.normalized = false;
  int k = 0;
  if (alpha != 0.0) {
    if (state.coeff.size() == 1) {
      // Single support point: rebase the lattice so D(alpha) lands on it.
      if (!(alpha > 0.0)) throw std::domain_error("measurement operator needs alpha > 0");
      int t0 = state.coeff.begin()->first;
      if (t0 != 0) {
        out.offset += static_cast<double>(t0) * out.step;
        auto c0 = out.coeff.begin()->second;
        out.coeff.clear();
        out.coeff[0] = c0;
      }
      out.step = alpha;
      k = 1;
    } else {
      double ratio = alpha / state.step;
      k = static_cast<int>(std::lround(ratio));
      if (k == 0 || std::abs(ratio - k) > kLatticeTol)
        throw LatticeError("alpha is not an integer multiple of the lattice step");
    }
  }
  // c'_t = c_t + e^{i phi} e^{i Im(alpha conj(z))} c_{t-k}; the composition
  // phase reduces to -alpha Im(offset) because the lattice itself is real.
  Complex shift_phase = std::polar(1.0, phi - alpha * out.offset.imag());
  std::map<int, Complex> next;
  for (const auto& [t, c] : out.coeff) next[t] += c;
  for (const auto& [t, c] : out.coeff) next[t + k] += shift_phase * c;
  out.coeff = std::move(next);
  return out;
}

DisplacedSqueezedSum apply_displacement(const DisplacedSqueezedSum& state, Complex beta) {
  DisplacedSqueezedSum out = state;
  for (auto& [t, c] : out.coeff) {
    Complex z = state.position(t);
    c *= std::polar(1.0, std::imag(beta * std::conj(z)));
  }
  out.offset += beta;
  return out;
}

DisplacedSqueezedSum normalize(const DisplacedSqueezedSum& state) {
  DisplacedSqueezedSum out = state;
  out.normalized = false;
  double n2 = std::real(overlap(out, out));
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw std::domain_error("normalize: state has zero or non-finite norm");
  double inv = 1.0 / std::sqrt(n2);
  for (auto& [t, c] : out.coeff) c *= inv;
  out.normalized = true;
  return out;
}

Complex overlap(const DisplacedSqueezedSum& a, const DisplacedSqueezedSum& b) {
  check_same_delta(a, b);
  std::vector<LogComplex> terms;
  terms.reserve(a.coeff.size() * b.coeff.size());
  for (const auto& [s, ca] : a.coeff) {
    if (ca == 0.0) continue;
    LogComplex la = LogComplex::from(std::conj(ca));
    Complex zs = a.position(s);
    for (const auto& [t, cb] : b.coeff) {
      if (cb == 0.0) continue;
      LogComplex lb = LogComplex::from(cb);
      LogComplex k = pair_term(zs, b.position(t), 0.0, a.delta);
      terms.push_back({la.log_mag + lb.log_mag + k.log_mag,
                       wrap_angle(la.phase + lb.phase + k.phase)});
    }
  }
  return stable_complex_sum(terms).value();
}

double fidelity(const DisplacedSqueezedSum& a, const DisplacedSqueezedSum& b) {
  double na = a.normalized ? 1.0 : std::sqrt(std::real(overlap(a, a)));
  double nb = b.normalized ? 1.0 : std::sqrt(std::real(overlap(b, b)));
  return std::abs(overlap(a, b)) / (na * nb);
}

Complex expect_displacement(const DisplacedSqueezedSum& state, Complex beta) {
  if (!state.normalized)
    throw ContractError("expect_displacement requires a normalized state");
  std::vector<LogComplex> terms;
  terms.reserve(state.coeff.size() * state.coeff.size());
  for (const auto& [s, cs] : state.coeff) {
    if (cs == 0.0) continue;
    LogComplex ls = LogComplex::from(std::conj(cs));
    Complex zs = state.position(s);
    for (const auto& [t, ct] : state.coeff) {
      if (ct == 0.0) continue;
      LogComplex lt = LogComplex::from(ct);
      LogComplex k = pair_term(zs, state.position(t), beta, state.delta);
      terms.push_back({ls.log_mag + lt.log_mag + k.log_mag,
                       wrap_angle(ls.phase + lt.phase + k.phase)});
    }
  }
  return stable_complex_sum(terms).value();
}

QuadratureSqueezing effective_squeezing(const DisplacedSqueezedSum& state,
                                        double u, Quadrature direction) {
  if (!(u > 0.0)) throw std::domain_error("effective_squeezing: u must be > 0");
  Complex d = direction == Quadrature::P ? Complex(u, 0.0) : Complex(0.0, u);
  Complex chi = expect_displacement(state, d);
  double mag = std::abs(chi);
  if (mag == 0.0)
    return {0.0, std::numeric_limits<double>::infinity()};
  double theta = std::atan2(chi.imag(), chi.real());
  if (mag > 1.0) mag = 1.0;  // roundoff guard; |Tr D rho| <= 1
  return {wrap_angle(theta), std::sqrt(-2.0 * std::log(mag)) / u};
}

SqueezingReport squeezing_report(const DisplacedSqueezedSum& state, double xi) {
  if (!(xi > 0.0)) throw std::domain_error("squeezing_report: xi must be > 0");
  double u = xi / kSqrt2;
  auto p = effective_squeezing(state, u, Quadrature::P);
  auto q = effective_squeezing(state, u, Quadrature::Q);
  SqueezingReport r;
  r.theta_p = p.theta;
  r.delta_p = p.delta_eff;
  r.theta_q = q.theta;
  r.delta_q = q.delta_eff;
  // D(c) with c = -theta_q/(sqrt2 xi) + i theta_p/(sqrt2 xi) shifts
  // theta_p -> theta_p - 2u Im(c) = 0 and theta_q -> theta_q + 2u Re(c) = 0;
  // wrapped thetas make this the smallest such displacement.
  r.correction = Complex(-r.theta_q, r.theta_p) / (kSqrt2 * xi);
  return r;
}

Complex q_wavefunction(const DisplacedSqueezedSum& state, double q) {
  // D(x+iy) psi(q) = e^{-i x y} e^{i sqrt2 y q} psi0(q - sqrt2 x).
  double d = state.delta;
  double norm = std::pow(kPi * d * d, -0.25);
  Complex acc = 0.0;
  for (const auto& [t, c] : state.coeff) {
    Complex z = state.position(t);
    double x = z.real(), y = z.imag();
    double qs = q - kSqrt2 * x;
    double logg = -qs * qs / (2.0 * d * d);
    acc += c * std::polar(std::exp(logg), -x * y + kSqrt2 * y * q);
  }
  return norm * acc;
}

Complex p_wavefunction(const DisplacedSqueezedSum& state, double p) {
  // D(x+iy) psi~(p) = e^{+i x y} e^{-i sqrt2 x p} psi0~(p - sqrt2 y).
  double d = state.delta;
  double norm = std::pow(d * d / kPi, 0.25);
  Complex acc = 0.0;
  for (const auto& [t, c] : state.coeff) {
    Complex z = state.position(t);
    double x = z.real(), y = z.imag();
    double ps = p - kSqrt2 * y;
    double logg = -ps * ps * d * d / 2.0;
    acc += c * std::polar(std::exp(logg), x * y - kSqrt2 * x * p);
  }
  return norm * acc;
}

WignerGrid wigner_grid(const DisplacedSqueezedSum& state,
                       std::pair<double, double> q_range,
                       std::pair<double, double> p_range,
                       int q_resolution, int p_resolution) {
  if (q_resolution < 2 || p_resolution < 2)
    throw std::domain_error("wigner_grid: resolution must be >= 2 per axis");
  WignerGrid grid;
  grid.q.resize(q_resolution);
  grid.p.resize(p_resolution);
  for (int j = 0; j < q_resolution; ++j)
    grid.q[j] = q_range.first + (q_range.second - q_range.first) * j / (q_resolution - 1);
  for (int i = 0; i < p_resolution; ++i)
    grid.p[i] = p_range.first + (p_range.second - p_range.first) * i / (p_resolution - 1);
  grid.w.assign(static_cast<std::size_t>(q_resolution) * p_resolution, 0.0);

  // Cross-Wigner of two displaced squeezed components (same Delta):
  //   W_st(q,p) = (1/pi) e^{i L} exp(-(q - qbar)^2/D^2 - D^2 (p - pbar)^2)
  // with qbar, pbar the mean quadrature centers and
  //   L = (eta_s - eta_t) + q (v_s - v_t) + (u_s - u_t)(pbar - p),
  // u = sqrt2 Re z, v = sqrt2 Im z, eta = -uv/2.
  struct Cross {
    double qbar, pbar, du, dv, eta, cr, ci;  // c = c_s * conj(c_t)
  };
  std::vector<Cross> cross;
  double d = state.delta;
  for (const auto& [s, cs] : state.coeff) {
    Complex zs = state.position(s);
    double us = kSqrt2 * zs.real(), vs = kSqrt2 * zs.imag();
    for (const auto& [t, ct] : state.coeff) {
      Complex zt = state.position(t);
      double ut = kSqrt2 * zt.real(), vt = kSqrt2 * zt.imag();
      Complex w = cs * std::conj(ct);
      if (w == 0.0) continue;
      cross.push_back({0.5 * (us + ut), 0.5 * (vs + vt), us - ut, vs - vt,
                       -0.5 * us * vs + 0.5 * ut * vt, w.real(), w.imag()});
    }
  }
  for (int i = 0; i < p_resolution; ++i) {
    double p = grid.p[i];
    for (int j = 0; j < q_resolution; ++j) {
      double q = grid.q[j];
      double acc = 0.0;
      for (const Cross& c : cross) {
        double gq = (q - c.qbar) / d;
        double gp = (p - c.pbar) * d;
        double ex = -gq * gq - gp * gp;
        if (ex < -700.0) continue;
        double lambda = c.eta + q * c.dv + c.du * (c.pbar - p);
        double g = std::exp(ex);
        acc += g * (c.cr * std::cos(lambda) - c.ci * std::sin(lambda));
      }
      grid.w[static_cast<std::size_t>(i) * q_resolution + j] = acc / kPi;
    }
  }
  return grid;
}

WignerGrid wigner_grid(const DisplacedSqueezedSum& state) {
  return wigner_grid(state, {-4.0, 4.0}, {-4.0, 4.0}, 201, 201);
}

double mean_photon_number(const DisplacedSqueezedSum& state) {
  // <D(z_s) S vac| a^dag a |D(z_t) S vac> from the normal-ordered
  // characteristic function chi_N(beta) = <D(beta)> e^{|beta|^2/2}:
  // <a^dag a> = -(1/4)[(2 - 1/D^2 - D^2) + f1^2 + f2^2] E_st with
  // f1 = -i(y_s + y_t) - dx/D^2, f2 = i(x_s + x_t) - dy D^2.
  double d = state.delta;
  double d2 = d * d;
  double curv = 2.0 - 1.0 / d2 - d2;
  Complex acc = 0.0;
  for (const auto& [s, cs] : state.coeff) {
    Complex zs = state.position(s);
    for (const auto& [t, ct] : state.coeff) {
      Complex zt = state.position(t);
      double dx = zt.real() - zs.real();
      double dy = zt.imag() - zs.imag();
      Complex f1(-dx / d2, -(zs.imag() + zt.imag()));
      Complex f2(-dy * d2, zs.real() + zt.real());
      Complex e = std::polar(std::exp(log_vacuum_kernel(zt - zs, d)),
                             std::imag(zt * std::conj(zs)));
      acc += std::conj(cs) * ct * (-0.25) * (curv + f1 * f1 + f2 * f2) * e;
    }
  }
  return acc.real();
}

double gkp_error_bound(double delta) {
  if (!(delta > 0.0)) throw std::domain_error("gkp_error_bound: delta must be > 0");
  return 2.0 * delta / kPi * std::exp(-kPi / (4.0 * delta * delta));
}

}  // namespace gridbreeder

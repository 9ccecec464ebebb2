#pragma once

#include <complex>
#include <map>
#include <utility>
#include <vector>

#include "gridbreeder/numerics.hpp"

namespace gridbreeder {

using Complex = std::complex<double>;

/// Conventions used throughout (fixed once, validated against the Fock
/// oracle): q = (a + a^dag)/sqrt2, p = i (a^dag - a)/sqrt2, [q, p] = i,
/// D(alpha) = exp(alpha a^dag - alpha^* a), S(Delta) squeezes q -> Delta q.
/// A grid state of spacing xi is displaced on the lattice of unit xi/sqrt2:
/// the stabilizer along q is D(xi/sqrt2), the one along p is D(i xi/sqrt2).

/// Finite superposition sum_t c_t D(offset + t*step) S(Delta)|vac>.
/// Every state the breeding protocols produce has this form; `offset`
/// carries pre-displacements (real) and corrective displacements (complex).
struct DisplacedSqueezedSum {
  double delta = 1.0;    // squeezing parameter, > 0
  double step = 1.0;     // lattice unit, > 0 (immaterial while support is {0})
  Complex offset = 0.0;  // global displacement added to every component
  std::map<int, Complex> coeff;  // t -> c_t, finite nonempty support
  bool normalized = false;

  Complex position(int t) const { return offset + static_cast<double>(t) * step; }
  int support_size() const { return static_cast<int>(coeff.size()); }
};

enum class Quadrature {
  P,  // displacement along the real axis, D(u): stabilizer S_p type
  Q,  // displacement along the imaginary axis, D(iu): stabilizer S_q type
};

struct QuadratureSqueezing {
  double theta;      // mean phase arg <D>, in [-pi, pi)
  double delta_eff;  // effective squeezing, +inf when <D> = 0
};

/// Mean phases and effective squeezing of both stabilizers at spacing xi,
/// plus the smallest displacement that zeroes both mean phases.
struct SqueezingReport {
  double theta_p = 0.0;
  double delta_p = 0.0;
  double theta_q = 0.0;
  double delta_q = 0.0;
  Complex correction = 0.0;  // apply with apply_displacement
};

struct WignerGrid {
  std::vector<double> q;  // column axis
  std::vector<double> p;  // row axis
  std::vector<double> w;  // row-major, w[i*q.size()+j] = W(q[j], p[i])
  double at(std::size_t ip, std::size_t iq) const { return w[ip * q.size() + iq]; }
};

/// S(Delta)|vac>; Delta <= 0 is a domain error.
DisplacedSqueezedSum squeezed_vacuum(double delta);

/// Approximate grid state sum_t exp(-pi kappa_env^2 t^2) D(t xi/sqrt2) S(Delta)|vac>
/// truncated at |t| <= t_max, normalized.
DisplacedSqueezedSum gkp_approx(double delta, double kappa_env, double xi, int t_max);

/// (1 + e^{i phi} D(alpha)) |state>, for real alpha on the state lattice.
/// If the state has a single support point the lattice unit is rebased to
/// alpha; otherwise alpha must be an integer multiple of step (LatticeError).
/// The result is unnormalized.
DisplacedSqueezedSum apply_measurement_op(const DisplacedSqueezedSum& state,
                                          double phi, double alpha);

/// D(beta)|state>: shifts the global offset and picks up the displacement
/// composition phases exp(i Im(beta z_t^*)) per component.
DisplacedSqueezedSum apply_displacement(const DisplacedSqueezedSum& state, Complex beta);

/// Rescale so <s|s> = 1 and set the normalized flag.
DisplacedSqueezedSum normalize(const DisplacedSqueezedSum& state);

/// <a|b> for equal Delta (UnsupportedError otherwise), accumulated in the
/// log domain so far-separated components cannot underflow the sum.
Complex overlap(const DisplacedSqueezedSum& a, const DisplacedSqueezedSum& b);

/// |<a|b>| with both sides normalized; the equivalence metric used for all
/// replay/reconstruction checks (global phase is irrelevant).
double fidelity(const DisplacedSqueezedSum& a, const DisplacedSqueezedSum& b);

/// <Psi|D(beta)|Psi> for a normalized state (ContractError otherwise).
Complex expect_displacement(const DisplacedSqueezedSum& state, Complex beta);

/// Mean phase and effective squeezing of D(u) (P) or D(iu) (Q);
/// u is the coherent amplitude, u = xi/sqrt2 for a spacing-xi stabilizer.
/// delta_eff = sqrt(ln|<D>|^-2)/u, reported as +inf when <D> vanishes.
QuadratureSqueezing effective_squeezing(const DisplacedSqueezedSum& state,
                                        double u, Quadrature direction);

SqueezingReport squeezing_report(const DisplacedSqueezedSum& state, double xi);

Complex q_wavefunction(const DisplacedSqueezedSum& state, double q);
Complex p_wavefunction(const DisplacedSqueezedSum& state, double p);

WignerGrid wigner_grid(const DisplacedSqueezedSum& state,
                       std::pair<double, double> q_range,
                       std::pair<double, double> p_range,
                       int q_resolution, int p_resolution);

/// 201 x 201 over [-4, 4]^2; resolves sensor-state peaks at Delta = 0.2.
WignerGrid wigner_grid(const DisplacedSqueezedSum& state);

/// <a^dag a> of a normalized state, from closed-form Gaussian moments.
double mean_photon_number(const DisplacedSqueezedSum& state);

/// GKP bound on the logical X (or Z) error, (2 Delta / pi) exp(-pi/(4 Delta^2)).
double gkp_error_bound(double delta);

}  // namespace gridbreeder

#pragma once

// Brute-force truncated-Fock-space oracle. Test-side ground truth for the
// analytic engine: overlaps, displacement expectations, quadrature
// densities, Wigner values, photon numbers, and a literal two-mode
// beam-splitter + homodyne breeding round. Deliberately slow and direct;
// never used on the simulation path.

#include <complex>
#include <vector>

#include "gridbreeder/gaussian_state.hpp"

namespace gridbreeder::oracle {

using Complex = std::complex<double>;

struct FockVector {
  std::vector<Complex> amp;  // photon numbers 0..n_max
  int n_max() const { return static_cast<int>(amp.size()) - 1; }
};

/// D(beta) S(Delta)|vac> by the stable three-term recurrence
///   sqrt(n+1) c_{n+1} = (beta + tau beta^*) c_n - tau sqrt(n) c_{n-1},
/// tau = (1 - Delta^2)/(1 + Delta^2). Throws TruncationError when the tail
/// above 0.9 n_max carries more than 1e-10 weight.
FockVector displaced_squeezed_fock(double delta, Complex beta, int n_max);

/// Fock vector of a DisplacedSqueezedSum (coefficient-weighted sum of
/// displaced squeezed vectors), not normalized beyond the input.
FockVector to_fock(const DisplacedSqueezedSum& state, int n_max);

Complex oracle_overlap(const FockVector& a, const FockVector& b);

/// <a| D(beta) |a> via the D(beta) Fock matrix.
Complex oracle_expect_displacement(const FockVector& a, Complex beta);

/// |<p|a>|^2 from the Hermite-function expansion.
double oracle_p_density(const FockVector& a, double p);
Complex oracle_p_amplitude(const FockVector& a, double p);
Complex oracle_q_amplitude(const FockVector& a, double q);

/// W(q, p) = (1/pi) int psi(q+y) psi^*(q-y) e^{-2ipy} dy by quadrature.
double oracle_wigner_point(const FockVector& a, double q, double p);

double oracle_mean_photon(const FockVector& a);

/// <p_out|_2 B (|state1> x |state2>): the Eq.-(6) 50:50 beam splitter
/// (a1 -> (a1 - a2)/sqrt2, a2 -> (a1 + a2)/sqrt2) followed by a projective
/// homodyne of mode 2. Result lives on mode 1 with truncation 2 n_max.
FockVector oracle_two_mode_round(const FockVector& state1,
                                 const FockVector& state2, double p_out);

/// Two-mode beam splitter alone, for invariance checks; amp2[k1][k2].
std::vector<std::vector<Complex>> oracle_beam_splitter(const FockVector& state1,
                                                       const FockVector& state2);

}  // namespace gridbreeder::oracle

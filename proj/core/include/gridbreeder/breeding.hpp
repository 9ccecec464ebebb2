#pragma once

#include <map>
#include <string>
#include <vector>

#include "gridbreeder/config.hpp"
#include "gridbreeder/gaussian_state.hpp"
#include "gridbreeder/rng.hpp"

namespace gridbreeder {

/// The measurement operators prod_j (1 + e^{i phase_j} D(alpha_j)) that
/// produced a state from |Phi0>. Kept alongside the state so a breeding
/// round can transform it per the beam-splitter update.
struct OpRecord {
  std::vector<double> phases;
  std::vector<double> alphas;
  std::size_t size() const { return phases.size(); }
};

/// A protocol state together with its operator record.
struct BredState {
  DisplacedSqueezedSum state;
  OpRecord record;
};

/// Every homodyne outcome of a run, keyed the way the breeding tree labels
/// its modes: round r of an efficient M-round protocol has 2^(M-r) outcomes
/// labeled by the (M-r)-bit prefix of the merged leaves (the final round is
/// labeled by the empty string); a slow-protocol round has one outcome,
/// labeled "". Together with the parameters this reconstructs the final
/// state exactly.
struct MeasurementRecord {
  int rounds = 0;
  double xi = 0.0;
  double delta = 0.0;
  Protocol protocol = Protocol::Efficient;
  bool preshift = false;
  std::vector<std::map<std::string, double>> outcomes;  // index r-1
};

/// Exact homodyne-outcome density of one breeding round,
///   P(p) = normalization * exp(-envelope_inv_width p^2) * T(p),
/// T(p) = sum_m trig[m] e^{i m base_freq p} a nonnegative trig polynomial.
/// The Gaussian envelope is the measured mode's |Phi0> p-density; its
/// variance 1/(2 Delta^2) grows as the input squeezing increases.
struct HomodyneDensity {
  double envelope_inv_width = 0.0;  // Delta^2
  double base_freq = 0.0;
  std::vector<Complex> trig;  // harmonics m = -K..K stored at index m + K
  double normalization = 0.0;

  int max_harmonic() const { return (static_cast<int>(trig.size()) - 1) / 2; }
  double value(double p) const;
  /// Closed form int P dp; equals 1 for normalized inputs.
  double integral() const;
};

/// One round of Fig.-3 breeding: 50:50 beam splitter on (port1, port2),
/// homodyne measurement of p on port 2 with outcome p_out. Port-1 operator
/// phases gain +alpha_j p_out, port-2 phases gain -beta_k p_out, and every
/// amplitude shrinks by sqrt2. The returned state is unnormalized; its norm
/// (times the envelope) is the outcome density at p_out.
BredState breed_round(const BredState& port1, const BredState& port2, double p_out);

/// Outcome density for the round; both inputs must be normalized.
HomodyneDensity homodyne_density(const BredState& port1, const BredState& port2);

/// Tabulated inverse CDF of an outcome density: an adaptive grid (starts at
/// 2^14 cells over +-6 envelope widths, Gauss-Legendre within each cell,
/// doubled until the CDF changes by < 1e-6), then O(log n) draws.
class HomodyneSampler {
 public:
  explicit HomodyneSampler(const HomodyneDensity& density);
  double sample(CounterRng& rng) const;

 private:
  double lo_;
  double step_;
  std::vector<double> cdf_;
};

/// One-shot draw; builds the table and samples. Deterministic given the
/// rng state. Protocol runs draw once per density; use HomodyneSampler
/// directly when many draws from one density are needed.
double sample_homodyne(const HomodyneDensity& density, CounterRng& rng);

struct RunResult {
  DisplacedSqueezedSum state;  // normalized final state
  MeasurementRecord record;
};

/// Slow breeding: a fresh squeezed cat enters port 2 every round. Round m
/// uses cat amplitude alpha / sqrt(2^(m-1)) with alpha = xi 2^((M-1)/2), so
/// the final spacing is xi. Rounds M >= 1.
RunResult run_slow_breeding(const ProtocolConfig& config, CounterRng& rng);

/// Efficient breeding: a binary tree over 2^M cats of operator amplitude
/// xi 2^((M-1)/2); M = 0 returns a single squeezed cat.
RunResult run_efficient_breeding(const ProtocolConfig& config, CounterRng& rng);

/// Efficient protocol with every outcome forced to 0 (the post-selection
/// baseline); deterministic, binomial-envelope output.
DisplacedSqueezedSum post_select_run(const ProtocolConfig& config);

/// Re-run the protocol consuming recorded outcomes instead of sampling.
DisplacedSqueezedSum replay_run(const MeasurementRecord& record);

/// Leaf label of the efficient tree: index as an `len`-bit string, MSB first.
std::string bit_label(unsigned index, int len);

}  // namespace gridbreeder

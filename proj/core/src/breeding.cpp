#include "gridbreeder/breeding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "gridbreeder/errors.hpp"

namespace gridbreeder {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

void check_breedable(const BredState& a, const BredState& b) {
  if (std::abs(a.state.delta - b.state.delta) >
      1e-12 * std::max(a.state.delta, b.state.delta))
    throw UnsupportedError("breed_round: ports must share the squeezing parameter");
  if (a.state.offset.imag() != 0.0 || b.state.offset.imag() != 0.0)
    throw UnsupportedError("breed_round: ports must not carry imaginary offsets");
  bool single = a.state.coeff.size() == 1 && b.state.coeff.size() == 1;
  if (!single && std::abs(a.state.step - b.state.step) >
                     1e-9 * std::max(a.state.step, b.state.step))
    throw LatticeError("breed_round: port lattices are incommensurate");
}

// Contiguous copy of the coefficients with the support bounds.
struct Support {
  int lo;
  std::vector<Complex> c;
};

Support dense_coeff(const DisplacedSqueezedSum& s) {
  Support d;
  d.lo = s.coeff.begin()->first;
  int hi = s.coeff.rbegin()->first;
  d.c.assign(hi - d.lo + 1, 0.0);
  for (const auto& [t, v] : s.coeff) d.c[t - d.lo] = v;
  return d;
}

struct MergeContext {
  int round;           // 1-based
  std::string label;   // bit-string label of the outcome
  const BredState& port1;
  const BredState& port2;
};

using OutcomeSource = std::function<double(const MergeContext&)>;

BredState make_cat(double delta, double alpha, bool preshift) {
  BredState cat;
  cat.state = normalize(apply_measurement_op(squeezed_vacuum(delta), 0.0, alpha));
  if (preshift) cat.state = apply_displacement(cat.state, -alpha / 2.0);
  cat.record.phases = {0.0};
  cat.record.alphas = {alpha};
  return cat;
}

double initial_amplitude(int rounds, double xi) {
  // Final operator amplitude must be xi/sqrt2 after `rounds` halvings.
  return xi * std::pow(2.0, (rounds - 1) / 2.0);
}

RunResult run_efficient_impl(const ProtocolConfig& config, const OutcomeSource& outcome) {
  config.validate();
  int rounds = config.rounds_max;
  double alpha0 = initial_amplitude(rounds, config.xi);

  std::vector<BredState> nodes(std::size_t{1} << rounds,
                               make_cat(config.delta, alpha0, config.preshift));
  MeasurementRecord record;
  record.rounds = rounds;
  record.xi = config.xi;
  record.delta = config.delta;
  record.protocol = Protocol::Efficient;
  record.preshift = config.preshift;
  record.outcomes.resize(rounds);

  for (int r = 1; r <= rounds; ++r) {
    std::vector<BredState> next(nodes.size() / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      MergeContext ctx{r, bit_label(static_cast<unsigned>(i), rounds - r),
                       nodes[2 * i], nodes[2 * i + 1]};
      double p = outcome(ctx);
      record.outcomes[r - 1][ctx.label] = p;
      next[i] = breed_round(nodes[2 * i], nodes[2 * i + 1], p);
      next[i].state = normalize(next[i].state);
    }
    nodes = std::move(next);
  }
  return {nodes[0].state, std::move(record)};
}

RunResult run_slow_impl(const ProtocolConfig& config, const OutcomeSource& outcome) {
  config.validate();
  int rounds = config.rounds_max;
  if (rounds < 1) throw std::domain_error("slow breeding needs at least one round");
  double alpha = initial_amplitude(rounds, config.xi);

  MeasurementRecord record;
  record.rounds = rounds;
  record.xi = config.xi;
  record.delta = config.delta;
  record.protocol = Protocol::Slow;
  record.preshift = config.preshift;
  record.outcomes.resize(rounds);

  BredState port1 = make_cat(config.delta, alpha, config.preshift);
  for (int m = 1; m <= rounds; ++m) {
    double beta = alpha / std::pow(2.0, (m - 1) / 2.0);
    BredState port2 = make_cat(config.delta, beta, config.preshift);
    MergeContext ctx{m, "", port1, port2};
    double p = outcome(ctx);
    record.outcomes[m - 1][""] = p;
    port1 = breed_round(port1, port2, p);
    port1.state = normalize(port1.state);
  }
  return {port1.state, std::move(record)};
}

OutcomeSource sampling_source(CounterRng& rng) {
  return [&rng](const MergeContext& ctx) {
    HomodyneDensity density = homodyne_density(ctx.port1, ctx.port2);
    return sample_homodyne(density, rng);
  };
}

OutcomeSource recorded_source(const MeasurementRecord& record) {
  return [&record](const MergeContext& ctx) {
    const auto& round = record.outcomes.at(ctx.round - 1);
    auto it = round.find(ctx.label);
    if (it == round.end())
      throw SchemaError("record is missing outcome '" + ctx.label + "' of round " +
                        std::to_string(ctx.round));
    return it->second;
  };
}

// Five-point Gauss-Legendre rule on [-1, 1]; exact enough per cell that the
// oscillatory trig factor converges at the initial grid for every protocol
// regime, with the doubling check as a backstop.
constexpr double kGlNode[5] = {0.0, 0.5384693101056831, -0.5384693101056831,
                               0.9061798459386640, -0.9061798459386640};
constexpr double kGlWeight[5] = {0.5688888888888889, 0.4786286704993665,
                                 0.4786286704993665, 0.2369268850561891,
                                 0.2369268850561891};

std::vector<double> cumulative(const HomodyneDensity& density, double lo,
                               double hi, std::size_t cells) {
  std::vector<double> cdf(cells + 1, 0.0);
  double h = (hi - lo) / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    double mid = lo + (static_cast<double>(i) + 0.5) * h;
    double acc = 0.0;
    for (int g = 0; g < 5; ++g)
      acc += kGlWeight[g] * density.value(mid + 0.5 * h * kGlNode[g]);
    cdf[i + 1] = cdf[i] + 0.5 * h * acc;
  }
  return cdf;
}

}  // namespace

std::string bit_label(unsigned index, int len) {
  std::string s(static_cast<std::size_t>(len), '0');
  for (int b = 0; b < len; ++b)
    if (index & (1u << (len - 1 - b))) s[b] = '1';
  return s;
}

double HomodyneDensity::value(double p) const {
  int k = max_harmonic();
  double t = trig[k].real();
  for (int m = 1; m <= k; ++m) {
    double a = base_freq * m * p;
    const Complex& w = trig[k + m];
    t += 2.0 * (w.real() * std::cos(a) - w.imag() * std::sin(a));
  }
  double env = std::exp(-envelope_inv_width * p * p);
  return std::max(0.0, normalization * env * t);
}

double HomodyneDensity::integral() const {
  int k = max_harmonic();
  double inv = envelope_inv_width;
  double acc = 0.0;
  for (int m = -k; m <= k; ++m) {
    double f = base_freq * m;
    acc += trig[k + m].real() * std::exp(-f * f / (4.0 * inv));
  }
  return normalization * std::sqrt(kPi / inv) * acc;
}

BredState breed_round(const BredState& port1, const BredState& port2, double p_out) {
  check_breedable(port1, port2);
  const DisplacedSqueezedSum& s1 = port1.state;
  const DisplacedSqueezedSum& s2 = port2.state;
  double step = s1.coeff.size() == 1 ? s2.step : s1.step;

  BredState out;
  out.state.delta = s1.delta;
  out.state.step = step / kSqrt2;
  out.state.offset = (s1.offset + s2.offset) / kSqrt2;
  out.state.normalized = false;

  // Transformed operator product applied to a fresh |Phi0>: port-1
  // components pick up e^{+i z p_out}, port-2 components e^{-i z p_out}
  // (z their pre-splitter positions), and the lattices convolve on the
  // sqrt2-shrunk grid. The measured mode leaves the scalar p-amplitude
  // (Delta^2/pi)^(1/4) exp(-Delta^2 p^2/2) so that |out|^2 is the
  // outcome density for normalized inputs.
  double d = s1.delta;
  double scale = std::pow(d * d / kPi, 0.25) * std::exp(-d * d * p_out * p_out / 2.0);
  Support a = dense_coeff(s1);
  Support b = dense_coeff(s2);
  std::vector<Complex> pa(a.c.size()), pb(b.c.size());
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    double z = s1.offset.real() + (a.lo + static_cast<int>(i)) * step;
    pa[i] = a.c[i] * std::polar(1.0, z * p_out);
  }
  for (std::size_t i = 0; i < b.c.size(); ++i) {
    double z = s2.offset.real() + (b.lo + static_cast<int>(i)) * step;
    pb[i] = b.c[i] * std::polar(1.0, -z * p_out);
  }
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (std::size_t j = 0; j < pb.size(); ++j) {
      Complex v = scale * pa[i] * pb[j];
      if (v != 0.0) out.state.coeff[a.lo + b.lo + static_cast<int>(i + j)] += v;
    }
  if (out.state.coeff.empty()) out.state.coeff[0] = 0.0;

  out.record.phases.reserve(port1.record.size() + port2.record.size());
  out.record.alphas.reserve(port1.record.size() + port2.record.size());
  for (std::size_t j = 0; j < port1.record.size(); ++j) {
    out.record.phases.push_back(port1.record.phases[j] +
                                port1.record.alphas[j] * p_out);
    out.record.alphas.push_back(port1.record.alphas[j] / kSqrt2);
  }
  for (std::size_t j = 0; j < port2.record.size(); ++j) {
    out.record.phases.push_back(port2.record.phases[j] -
                                port2.record.alphas[j] * p_out);
    out.record.alphas.push_back(port2.record.alphas[j] / kSqrt2);
  }
  return out;
}

HomodyneDensity homodyne_density(const BredState& port1, const BredState& port2) {
  check_breedable(port1, port2);
  if (!port1.state.normalized || !port2.state.normalized)
    throw ContractError("homodyne_density requires normalized input states");
  const DisplacedSqueezedSum& s1 = port1.state;
  const DisplacedSqueezedSum& s2 = port2.state;
  double step = s1.coeff.size() == 1 ? s2.step : s1.step;
  double d = s1.delta;
  double out_step = step / kSqrt2;

  Support a = dense_coeff(s1);
  Support b = dense_coeff(s2);
  int span1 = static_cast<int>(a.c.size()) - 1;
  int span2 = static_cast<int>(b.c.size()) - 1;
  int k = span1 + span2;

  HomodyneDensity density;
  density.envelope_inv_width = d * d;
  density.base_freq = step;
  density.normalization = std::sqrt(d * d / kPi);
  density.trig.assign(2 * k + 1, 0.0);

  // |out(p)|^2 = sum over lattice pairs of the overlap kernel times the
  // product of the transformed coefficients; every p-dependence collapses
  // onto harmonics of the pre-splitter lattice unit.
  for (int t = 0; t <= span1; ++t)
    for (int s = 0; s <= span2; ++s) {
      Complex cts = a.c[t] * b.c[s];
      if (cts == 0.0) continue;
      for (int tp = 0; tp <= span1; ++tp)
        for (int sp = 0; sp <= span2; ++sp) {
          Complex w = cts * std::conj(a.c[tp] * b.c[sp]);
          if (w == 0.0) continue;
          int dr = (t + s) - (tp + sp);
          double g = out_step * dr;
          double kern = std::exp(-g * g / (2.0 * d * d));
          if (kern == 0.0) continue;
          int f = (t - s) - (tp - sp);
          density.trig[k + f] += w * kern;
        }
    }
  return density;
}

HomodyneSampler::HomodyneSampler(const HomodyneDensity& density) {
  double width = 1.0 / std::sqrt(density.envelope_inv_width);
  lo_ = -6.0 * width;
  double hi = 6.0 * width;

  std::size_t cells = std::size_t{1} << 14;
  cdf_ = cumulative(density, lo_, hi, cells);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> fine = cumulative(density, lo_, hi, cells * 2);
    double err = 0.0;
    for (std::size_t i = 0; i <= cells; ++i)
      err = std::max(err, std::abs(cdf_[i] - fine[2 * i]));
    if (err < 1e-6 * fine.back()) break;
    cdf_ = std::move(fine);
    cells *= 2;
  }
  step_ = (hi - lo_) / static_cast<double>(cdf_.size() - 1);
}

double HomodyneSampler::sample(CounterRng& rng) const {
  std::size_t cells = cdf_.size() - 1;
  double u = rng.next_double() * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t idx = it == cdf_.begin()
                        ? 0
                        : static_cast<std::size_t>(it - cdf_.begin()) - 1;
  if (idx >= cells) idx = cells - 1;
  double mass = cdf_[idx + 1] - cdf_[idx];
  double frac = mass > 0.0 ? (u - cdf_[idx]) / mass : 0.5;
  return lo_ + (static_cast<double>(idx) + frac) * step_;
}

double sample_homodyne(const HomodyneDensity& density, CounterRng& rng) {
  return HomodyneSampler(density).sample(rng);
}

RunResult run_slow_breeding(const ProtocolConfig& config, CounterRng& rng) {
  return run_slow_impl(config, sampling_source(rng));
}

RunResult run_efficient_breeding(const ProtocolConfig& config, CounterRng& rng) {
  return run_efficient_impl(config, sampling_source(rng));
}

DisplacedSqueezedSum post_select_run(const ProtocolConfig& config) {
  auto zero = [](const MergeContext&) { return 0.0; };
  if (config.protocol == Protocol::Slow) return run_slow_impl(config, zero).state;
  return run_efficient_impl(config, zero).state;
}

DisplacedSqueezedSum replay_run(const MeasurementRecord& record) {
  ProtocolConfig config;
  config.rounds_max = record.rounds;
  config.delta = record.delta;
  config.xi = record.xi;
  config.preshift = record.preshift;
  config.protocol = record.protocol;
  auto source = recorded_source(record);
  if (record.protocol == Protocol::Slow) return run_slow_impl(config, source).state;
  return run_efficient_impl(config, source).state;
}

}  // namespace gridbreeder

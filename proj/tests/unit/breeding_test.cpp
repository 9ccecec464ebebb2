#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fock_oracle.hpp"
#include "gridbreeder/breeding.hpp"
#include "gridbreeder/errors.hpp"

using namespace gridbreeder;
namespace orc = gridbreeder::oracle;

namespace {

const double kXiSensor = std::sqrt(2.0 * M_PI);

BredState make_cat(double delta, double alpha) {
  BredState cat;
  cat.state = normalize(apply_measurement_op(squeezed_vacuum(delta), 0.0, alpha));
  cat.record = {{0.0}, {alpha}};
  return cat;
}

BredState vacuum_port(double delta) {
  BredState port;
  port.state = squeezed_vacuum(delta);
  return port;
}

ProtocolConfig config_for(int rounds, double delta, Protocol protocol,
                          bool preshift = false) {
  ProtocolConfig cfg;
  cfg.rounds_max = rounds;
  cfg.delta = delta;
  cfg.xi = kXiSensor;
  cfg.protocol = protocol;
  cfg.preshift = preshift;
  return cfg;
}

std::vector<double> coeff_ratios(const DisplacedSqueezedSum& s) {
  std::vector<double> out;
  double base = std::abs(s.coeff.begin()->second);
  for (const auto& [t, c] : s.coeff) out.push_back(std::abs(c) / base);
  return out;
}

double density_variance(const HomodyneDensity& d) {
  double span = 8.0 / std::sqrt(d.envelope_inv_width);
  double h = span / 40000.0;
  double m0 = 0.0, m2 = 0.0;
  for (double p = -span; p <= span; p += h) {
    double v = d.value(p);
    m0 += v * h;
    m2 += p * p * v * h;
  }
  return m2 / m0;
}

}  // namespace

TEST_CASE("post-selected rounds build binomial envelopes") {
  // One round of two cats at p = 0: coefficients 1, 2, 1.
  auto c1 = make_cat(0.2, kXiSensor);
  auto out = breed_round(c1, c1, 0.0);
  auto ratios = coeff_ratios(out.state);
  CHECK(ratios == std::vector<double>{1.0, 2.0, 1.0});
  CHECK(out.state.step == doctest::Approx(kXiSensor / std::sqrt(2.0)).epsilon(1e-15));

  // M slow rounds, all p = 0: row M+1 of Pascal's triangle.
  auto slow = post_select_run(config_for(3, 0.2, Protocol::Slow));
  auto r = coeff_ratios(slow);
  CHECK(r.size() == 5);
  CHECK(r[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r[2] == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(r[3] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(r[4] == doctest::Approx(1.0).epsilon(1e-12));

  // Efficient M = 2, all zero: 1 4 6 4 1 as well.
  auto eff = post_select_run(config_for(2, 0.2, Protocol::Efficient));
  auto re = coeff_ratios(eff);
  CHECK(re.size() == 5);
  CHECK(re[1] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(re[2] == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("breed_round transforms records with the port sign asymmetry") {
  auto c1 = make_cat(0.3, 2.0);
  auto c2 = make_cat(0.3, 2.0);
  double p = 0.37;
  auto out = breed_round(c1, c2, p);
  REQUIRE(out.record.size() == 2);
  CHECK(out.record.phases[0] == doctest::Approx(2.0 * p).epsilon(1e-15));
  CHECK(out.record.phases[1] == doctest::Approx(-2.0 * p).epsilon(1e-15));
  CHECK(out.record.alphas[0] == 2.0 / std::sqrt(2.0));
  CHECK(out.record.alphas[1] == 2.0 / std::sqrt(2.0));

  auto mismatched = make_cat(0.4, 2.0);
  CHECK_THROWS_AS(breed_round(c1, mismatched, 0.0), UnsupportedError);
}

TEST_CASE("breed_round agrees with the two-mode Fock oracle") {
  double delta = 0.5;
  for (double p_out : {0.0, 0.4, -0.9, 1.3}) {
    auto c1 = make_cat(delta, 1.2);
    auto c2 = make_cat(delta, 1.2);
    auto engine = normalize(breed_round(c1, c2, p_out).state);

    orc::FockVector f1 = orc::to_fock(c1.state, 40);
    orc::FockVector f2 = orc::to_fock(c2.state, 40);
    orc::FockVector cond = orc::oracle_two_mode_round(f1, f2, p_out);
    double norm = std::sqrt(std::abs(orc::oracle_overlap(cond, cond)));
    orc::FockVector engine_f = orc::to_fock(engine, cond.n_max());
    double fid = std::abs(orc::oracle_overlap(cond, engine_f)) / norm;
    CHECK(fid > 1.0 - 1e-8);
  }
}

TEST_CASE("homodyne density of two squeezed vacua is the bare Gaussian") {
  double delta = 0.35;
  auto port = vacuum_port(delta);
  auto d = homodyne_density(port, port);
  CHECK(d.max_harmonic() == 0);
  CHECK(d.integral() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(density_variance(d) == doctest::Approx(1.0 / (2.0 * delta * delta)).epsilon(1e-4));
  // Pointwise Gaussian.
  for (double p : {0.0, 1.0, 3.0})
    CHECK(d.value(p) == doctest::Approx(delta / std::sqrt(M_PI) *
                                        std::exp(-delta * delta * p * p)).epsilon(1e-12));
}

TEST_CASE("comb density: variance grows as the squeezing increases") {
  auto d02 = homodyne_density(make_cat(0.2, kXiSensor), make_cat(0.2, kXiSensor));
  auto d04 = homodyne_density(make_cat(0.4, kXiSensor), make_cat(0.4, kXiSensor));
  CHECK(d02.integral() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d04.integral() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(density_variance(d02) > density_variance(d04));
  CHECK(d02.max_harmonic() == 2);
}

TEST_CASE("probability consistency: |breed(p)|^2 is the density") {
  auto c1 = make_cat(0.25, kXiSensor);
  auto c2 = make_cat(0.25, kXiSensor);
  auto d = homodyne_density(c1, c2);
  for (double p : {0.0, 0.7, -2.2, 4.0}) {
    auto out = breed_round(c1, c2, p);
    double norm2 = std::real(overlap(out.state, out.state));
    CHECK(norm2 == doctest::Approx(d.value(p)).epsilon(1e-9));
  }

  // Against the Fock oracle at moderate squeezing.
  double delta = 0.5;
  auto e1 = make_cat(delta, 1.2);
  auto e2 = make_cat(delta, 1.2);
  auto de = homodyne_density(e1, e2);
  orc::FockVector f1 = orc::to_fock(e1.state, 40);
  orc::FockVector f2 = orc::to_fock(e2.state, 40);
  for (double p : {0.0, 0.5, -1.1}) {
    orc::FockVector cond = orc::oracle_two_mode_round(f1, f2, p);
    double oracle_density = std::abs(orc::oracle_overlap(cond, cond));
    CHECK(std::abs(de.value(p) - oracle_density) < 1e-7);
  }
}

TEST_CASE("sampler: Gaussian case passes a KS test") {
  double delta = 0.3;
  auto port = vacuum_port(delta);
  auto d = homodyne_density(port, port);
  CounterRng rng(2024);
  const int n = 100000;
  std::vector<double> samples(n);
  for (double& s : samples) s = sample_homodyne(d, rng);
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  for (int i = 0; i < n; ++i) {
    double cdf = 0.5 * (1.0 + std::erf(samples[i] * delta));
    ks = std::max(ks, std::abs(cdf - (i + 1.0) / n));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / n));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("sampler: comb density passes a total-variation test") {
  auto c = make_cat(0.25, kXiSensor);
  auto d = homodyne_density(c, c);
  CounterRng rng(99);
  const int n = 100000;
  double lo = -6.0 / 0.25, hi = 6.0 / 0.25;
  const int bins = 60;
  std::vector<double> hist(bins, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = sample_homodyne(d, rng);
    int b = static_cast<int>((s - lo) / (hi - lo) * bins);
    if (b >= 0 && b < bins) hist[b] += 1.0 / n;
  }
  double tv = 0.0;
  for (int b = 0; b < bins; ++b) {
    double a = lo + (hi - lo) * b / bins;
    double bnd = lo + (hi - lo) * (b + 1) / bins;
    double mass = 0.0;
    int steps = 200;
    for (int i = 0; i < steps; ++i) {
      double x0 = a + (bnd - a) * i / steps;
      double x1 = a + (bnd - a) * (i + 1) / steps;
      mass += 0.5 * (d.value(x0) + d.value(x1)) * (x1 - x0);
    }
    tv += std::abs(hist[b] - mass);
  }
  CHECK(0.5 * tv < 0.02);
}

TEST_CASE("sampler determinism under a fixed seed") {
  auto c = make_cat(0.25, kXiSensor);
  auto d = homodyne_density(c, c);
  CounterRng r1(5), r2(5);
  for (int i = 0; i < 20; ++i)
    CHECK(sample_homodyne(d, r1) == sample_homodyne(d, r2));
}

TEST_CASE("slow breeding structure") {
  ProtocolConfig cfg = config_for(3, 0.2, Protocol::Slow);
  CounterRng rng(17);
  RunResult run = run_slow_breeding(cfg, rng);
  CHECK(run.record.rounds == 3);
  CHECK(run.record.protocol == Protocol::Slow);
  for (const auto& round : run.record.outcomes) {
    CHECK(round.size() == 1);
    CHECK(round.count(""));
  }
  // M rounds leave M+2 components and the target lattice.
  CHECK(run.state.support_size() == 5);
  CHECK(run.state.step ==
        doctest::Approx(kXiSensor / std::sqrt(2.0)).epsilon(1e-12));

  // Photon cost of the first round: the two input cats together carry at
  // least 2^M pi photons for a final sensor-state spacing.
  double alpha = kXiSensor * std::pow(2.0, (3 - 1) / 2.0);
  auto cat = make_cat(0.2, alpha);
  CHECK(2.0 * mean_photon_number(cat.state) >= std::pow(2.0, 3) * M_PI);

  CHECK_THROWS_AS(run_slow_breeding(config_for(0, 0.2, Protocol::Slow), rng),
                  std::domain_error);
}

TEST_CASE("efficient breeding structure") {
  ProtocolConfig cfg = config_for(2, 0.2, Protocol::Efficient);
  CounterRng rng(31);
  RunResult run = run_efficient_breeding(cfg, rng);
  CHECK(run.record.rounds == 2);
  REQUIRE(run.record.outcomes.size() == 2);
  CHECK(run.record.outcomes[0].size() == 2);
  CHECK(run.record.outcomes[0].count("0"));
  CHECK(run.record.outcomes[0].count("1"));
  CHECK(run.record.outcomes[1].size() == 1);
  CHECK(run.record.outcomes[1].count(""));
  CHECK(run.state.support_size() == 5);

  // M = 0 is a single squeezed cat of amplitude xi/sqrt2.
  CounterRng rng0(32);
  RunResult cat = run_efficient_breeding(config_for(0, 0.2, Protocol::Efficient), rng0);
  CHECK(cat.state.support_size() == 2);
  CHECK(cat.state.step == doctest::Approx(kXiSensor / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(cat.record.rounds == 0);

  // Mean photon number of the efficient-protocol cats:
  // alpha^2/2 + sinh^2(ln(1/Delta)) to within the vanishing cross terms.
  double alpha = kXiSensor * std::pow(2.0, (4 - 1) / 2.0);
  double n_cat = mean_photon_number(make_cat(0.2, alpha).state);
  double n_sq = std::pow(std::sinh(std::log(5.0)), 2);
  CHECK(n_cat == doctest::Approx(std::pow(2.0, 4) * M_PI / 2.0 + n_sq).epsilon(1e-6));
}

TEST_CASE("lattice halving is exact per round") {
  auto c1 = make_cat(0.2, kXiSensor);
  auto out = breed_round(c1, c1, 0.123);
  for (std::size_t j = 0; j < out.record.size(); ++j)
    CHECK(out.record.alphas[j] == kXiSensor / std::sqrt(2.0));
  auto out2 = breed_round(out, out, -0.5);
  for (std::size_t j = 0; j < out2.record.size(); ++j)
    CHECK(out2.record.alphas[j] == (kXiSensor / std::sqrt(2.0)) / std::sqrt(2.0));
}

TEST_CASE("records replay to the exact final state") {
  for (Protocol protocol : {Protocol::Efficient, Protocol::Slow}) {
    ProtocolConfig cfg = config_for(3, 0.2, protocol);
    CounterRng rng(77);
    RunResult run = protocol == Protocol::Slow ? run_slow_breeding(cfg, rng)
                                               : run_efficient_breeding(cfg, rng);
    DisplacedSqueezedSum again = replay_run(run.record);
    CHECK(fidelity(run.state, again) > 1.0 - 1e-12);
  }
}

TEST_CASE("post-selection has exactly zero mean phase") {
  auto state = post_select_run(config_for(2, 0.2, Protocol::Efficient));
  auto rep = squeezing_report(state, kXiSensor);
  CHECK(rep.theta_p == 0.0);
}

TEST_CASE("normalization holds for deep protocols") {
  ProtocolConfig cfg = config_for(6, 0.2, Protocol::Efficient);
  CounterRng rng(123);
  RunResult run = run_efficient_breeding(cfg, rng);
  CHECK(run.state.support_size() == 65);
  CHECK(std::abs(overlap(run.state, run.state) - 1.0) < 1e-12);
}

TEST_CASE("Delta_q is preserved by breeding") {
  for (double delta : {0.2, 0.4, 0.5}) {
    ProtocolConfig cfg = config_for(3, delta, Protocol::Efficient);
    CounterRng rng(55);
    RunResult run = run_efficient_breeding(cfg, rng);
    auto rep = squeezing_report(run.state, kXiSensor);
    CHECK(std::abs(rep.delta_q - delta) < 1e-6);
  }
}

TEST_CASE("comb-limit calibration: Delta_q falls monotonically as Delta -> 0") {
  double prev = 1e9;
  for (double delta : {0.5, 0.4, 0.3, 0.2, 0.1}) {
    auto state = post_select_run(config_for(2, delta, Protocol::Efficient));
    auto rep = squeezing_report(state, kXiSensor);
    CHECK(rep.delta_q < prev);
    prev = rep.delta_q;
  }
}

TEST_CASE("corrected Wigner peak sits at the origin") {
  ProtocolConfig cfg = config_for(2, 0.2, Protocol::Efficient, /*preshift=*/true);
  CounterRng rng(2);
  RunResult run = run_efficient_breeding(cfg, rng);
  auto rep = squeezing_report(run.state, kXiSensor);
  auto corrected = apply_displacement(run.state, rep.correction);
  auto grid = wigner_grid(corrected, {-4.0, 4.0}, {-4.0, 4.0}, 161, 161);
  std::size_t arg = std::max_element(grid.w.begin(), grid.w.end()) - grid.w.begin();
  double cell = grid.q[1] - grid.q[0];
  double qpk = grid.q[arg % grid.q.size()];
  double ppk = grid.p[arg / grid.q.size()];
  CHECK(std::abs(qpk) <= cell + 1e-12);
  CHECK(std::abs(ppk) <= cell + 1e-12);
}

TEST_CASE("slow breeding Wigner q-lobes count the components") {
  ProtocolConfig cfg = config_for(3, 0.2, Protocol::Slow, /*preshift=*/true);
  CounterRng rng(8);
  RunResult run = run_slow_breeding(cfg, rng);
  auto rep = squeezing_report(run.state, kXiSensor);
  auto corrected = apply_displacement(run.state, rep.correction);
  auto grid = wigner_grid(corrected, {-6.5, 6.5}, {-0.1, 0.1}, 521, 2);
  // Count local maxima along the p ~ 0 row above 5% of the peak.
  double peak = *std::max_element(grid.w.begin(), grid.w.begin() + 521);
  int lobes = 0;
  for (std::size_t j = 1; j + 1 < grid.q.size(); ++j) {
    double w = grid.at(0, j);
    if (w > 0.05 * peak && w > grid.at(0, j - 1) && w > grid.at(0, j + 1)) ++lobes;
  }
  CHECK(lobes == run.state.support_size());
}

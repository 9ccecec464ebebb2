#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gridbreeder/breeding.hpp"
#include "gridbreeder/config.hpp"
#include "gridbreeder/mises_model.hpp"

namespace gridbreeder {

/// One sweep cell: Monte Carlo statistics of Delta_p at (variant, M).
/// Deviations are root-mean-square distances of the above-mean and
/// below-mean subsamples, kept separate because the spread around the mean
/// is strongly asymmetric.
struct SweepCell {
  Variant variant;
  int rounds;
  double mean_delta_p;
  double dev_up;
  double dev_down;
  int n;
};

struct SweepResult {
  std::vector<SweepCell> cells;
};

/// Runs every configured variant for M = 0..rounds_max with `repetitions`
/// independent runs each (postselect and lower are deterministic, n = 1).
/// Per-run RNG streams derive from (seed, variant, M, repetition index), so
/// the result is bit-identical for a given config regardless of the number
/// of worker threads.
SweepResult run_sweep(const ProtocolConfig& config);

/// CSV with header "variant,M,mean_delta_p,dev_up,dev_down,n", %.17g values.
std::string sweep_to_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

/// CSV with header "repetition,round,kappa,mu,delta_p": all tree nodes of
/// each repetition's trajectory, level by level.
std::string trajectories_to_csv(const std::vector<MisesTrajectory>& trajectories);

/// Load a record and rebuild its final state through the phase-estimation
/// reconstruction (slow records go through their feedback phases).
DisplacedSqueezedSum replay(const std::filesystem::path& record_path);

/// Config JSON: same field names as ProtocolConfig; unknown keys rejected.
ProtocolConfig config_from_json(const std::string& text);
std::string config_to_json(const ProtocolConfig& config);
ProtocolConfig load_config(const std::filesystem::path& path);

}  // namespace gridbreeder

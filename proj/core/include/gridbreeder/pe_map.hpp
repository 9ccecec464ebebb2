#pragma once

#include <vector>

#include "gridbreeder/breeding.hpp"

namespace gridbreeder {

/// A breeding run rewritten as phase estimation with all outcomes fixed to
/// x = 0 and the homodyne results folded into the feedback phases.
struct PhaseEstimationTranscript {
  std::vector<double> phases;
  std::vector<double> alphas;
  std::vector<int> outcomes;  // all zero by construction
};

struct Reconstruction {
  PhaseEstimationTranscript transcript;
  DisplacedSqueezedSum state;  // normalized
};

/// Rebuild the final state of an efficient record as 2^M measurement
/// operators of amplitude xi/sqrt2 on a single mode: the operator of leaf
/// x_1..x_M carries the phase
///   xi sum_j (-1)^{x_j} 2^{(j-1)/2} p^{M-j+1}_{x[j-1]},
/// the per-round beam-splitter update composed down the tree.
/// Throws SchemaError on malformed records, UnsupportedError for slow ones
/// (use reconstruct_slow_state).
Reconstruction reconstruct_final_state(const MeasurementRecord& record);

/// Feedback phases of a slow record, m = 0..M with p_0 = 0:
///   phi_m = alpha (sum_{k>m} 2^{-(k-1)/2} p_k - 2^{-(m-1)/2} p_m).
std::vector<double> feedback_phases_slow(const MeasurementRecord& record);

/// PE-form state of a slow record via its feedback phases.
Reconstruction reconstruct_slow_state(const MeasurementRecord& record);

/// prod_j (1 + e^{i phase_j} D(alpha_j)) |Phi0(delta)>, normalized, with an
/// optional global displacement (the pre-shift bookkeeping).
DisplacedSqueezedSum state_from_transcript(const PhaseEstimationTranscript& transcript,
                                           double delta, double offset = 0.0);

}  // namespace gridbreeder

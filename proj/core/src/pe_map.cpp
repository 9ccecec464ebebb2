#include "gridbreeder/pe_map.hpp"

#include <cmath>
#include <stdexcept>

#include "gridbreeder/errors.hpp"

namespace gridbreeder {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

void check_record_shape(const MeasurementRecord& record) {
  if (record.rounds < 0 || !(record.xi > 0.0) || !(record.delta > 0.0))
    throw SchemaError("record: invalid rounds/xi/delta");
  if (static_cast<int>(record.outcomes.size()) != record.rounds)
    throw SchemaError("record: outcome list does not match the round count");
  for (int r = 1; r <= record.rounds; ++r) {
    const auto& round = record.outcomes[r - 1];
    std::size_t expect = record.protocol == Protocol::Efficient
                             ? (std::size_t{1} << (record.rounds - r))
                             : 1;
    if (round.size() != expect)
      throw SchemaError("record: round " + std::to_string(r) + " must hold " +
                        std::to_string(expect) + " outcomes");
    for (const auto& [label, value] : round) {
      std::size_t len = record.protocol == Protocol::Efficient
                            ? static_cast<std::size_t>(record.rounds - r)
                            : 0;
      if (label.size() != len ||
          label.find_first_not_of("01") != std::string::npos)
        throw SchemaError("record: bad outcome label '" + label + "' in round " +
                          std::to_string(r));
      if (!std::isfinite(value))
        throw SchemaError("record: non-finite outcome in round " + std::to_string(r));
    }
  }
}

double preshift_offset(int n_ops, double amplitude, bool preshift) {
  return preshift ? -0.5 * n_ops * amplitude : 0.0;
}

}  // namespace

DisplacedSqueezedSum state_from_transcript(const PhaseEstimationTranscript& transcript,
                                           double delta, double offset) {
  DisplacedSqueezedSum state = squeezed_vacuum(delta);
  for (std::size_t j = 0; j < transcript.phases.size(); ++j)
    state = apply_measurement_op(state, transcript.phases[j], transcript.alphas[j]);
  if (offset != 0.0) state = apply_displacement(state, offset);
  return normalize(state);
}

Reconstruction reconstruct_final_state(const MeasurementRecord& record) {
  if (record.protocol != Protocol::Efficient)
    throw UnsupportedError("reconstruct_final_state expects an efficient record");
  check_record_shape(record);
  int rounds = record.rounds;
  double amplitude = record.xi / kSqrt2;

  PhaseEstimationTranscript transcript;
  std::size_t n = std::size_t{1} << rounds;
  transcript.phases.reserve(n);
  transcript.alphas.assign(n, amplitude);
  transcript.outcomes.assign(n, 0);

  for (std::size_t leaf = 0; leaf < n; ++leaf) {
    double phase = 0.0;
    for (int j = 1; j <= rounds; ++j) {
      bool bit = (leaf >> (rounds - j)) & 1u;  // x_j, MSB first
      const auto& round = record.outcomes[rounds - j];  // round M-j+1
      std::string prefix = bit_label(static_cast<unsigned>(leaf >> (rounds - j + 1)),
                                     j - 1);  // x[j-1]
      auto it = round.find(prefix);
      if (it == round.end())
        throw SchemaError("record: missing outcome '" + prefix + "'");
      phase += (bit ? -1.0 : 1.0) * std::pow(2.0, (j - 1) / 2.0) * it->second;
    }
    transcript.phases.push_back(record.xi * phase);
  }

  double offset = preshift_offset(static_cast<int>(n), amplitude, record.preshift);
  return {transcript, state_from_transcript(transcript, record.delta, offset)};
}

std::vector<double> feedback_phases_slow(const MeasurementRecord& record) {
  if (record.protocol != Protocol::Slow)
    throw UnsupportedError("feedback_phases_slow expects a slow record");
  check_record_shape(record);
  int rounds = record.rounds;
  double alpha = record.xi * std::pow(2.0, (rounds - 1) / 2.0);

  std::vector<double> p(rounds + 1, 0.0);  // p[0] = 0 fixes the first cat
  for (int m = 1; m <= rounds; ++m) p[m] = record.outcomes[m - 1].at("");

  std::vector<double> phases(rounds + 1, 0.0);
  for (int m = 0; m <= rounds; ++m) {
    double acc = 0.0;
    for (int k = m + 1; k <= rounds; ++k)
      acc += std::pow(2.0, -(k - 1) / 2.0) * p[k];
    acc -= std::pow(2.0, -(m - 1) / 2.0) * p[m];
    phases[m] = alpha * acc;
  }
  return phases;
}

Reconstruction reconstruct_slow_state(const MeasurementRecord& record) {
  std::vector<double> phases = feedback_phases_slow(record);
  double amplitude = record.xi / kSqrt2;

  PhaseEstimationTranscript transcript;
  transcript.phases = std::move(phases);
  transcript.alphas.assign(transcript.phases.size(), amplitude);
  transcript.outcomes.assign(transcript.phases.size(), 0);

  // Pre-shifted slow breeding accumulates the same centered offset as the
  // efficient tree: every cat contributes -alpha_in/2, halved per split.
  double offset = preshift_offset(static_cast<int>(transcript.phases.size()),
                                  amplitude, record.preshift);
  return {transcript, state_from_transcript(transcript, record.delta, offset)};
}

}  // namespace gridbreeder

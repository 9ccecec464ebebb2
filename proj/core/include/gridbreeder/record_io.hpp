#pragma once

#include <filesystem>
#include <string>

#include "gridbreeder/breeding.hpp"
#include "gridbreeder/pe_map.hpp"

namespace gridbreeder {

/// JSON schema:
/// {
///   "rounds": M, "xi": ..., "delta": ..., "protocol": "slow"|"efficient",
///   "preshift": bool,
///   "outcomes": [ { "<bit string>": p, ... }, ... ]   // index = round - 1
/// }
/// Round r of an efficient record holds 2^(M-r) entries keyed by
/// (M-r)-bit strings; slow rounds hold a single "" entry.
std::string record_to_json(const MeasurementRecord& record);

/// Parses and shape-checks; throws SchemaError naming the offending field.
MeasurementRecord record_from_json(const std::string& text);

void save_record(const MeasurementRecord& record, const std::filesystem::path& path);
MeasurementRecord load_record(const std::filesystem::path& path);

/// {"phases": [...], "alphas": [...], "outcomes": [0, ...]}
std::string transcript_to_json(const PhaseEstimationTranscript& transcript);

}  // namespace gridbreeder

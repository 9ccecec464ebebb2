#include "gridbreeder/record_io.hpp"

#include <fstream>

#include <json.hpp>

#include "gridbreeder/errors.hpp"

namespace gridbreeder {

using nlohmann::json;

std::string record_to_json(const MeasurementRecord& record) {
  json j;
  j["rounds"] = record.rounds;
  j["xi"] = record.xi;
  j["delta"] = record.delta;
  j["protocol"] = to_string(record.protocol);
  j["preshift"] = record.preshift;
  json rounds = json::array();
  for (const auto& round : record.outcomes) {
    json o = json::object();
    for (const auto& [label, p] : round) o[label] = p;
    rounds.push_back(std::move(o));
  }
  j["outcomes"] = std::move(rounds);
  return j.dump(2);
}

MeasurementRecord record_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("record: invalid JSON: ") + e.what());
  }
  MeasurementRecord record;
  try {
    record.rounds = j.at("rounds").get<int>();
    record.xi = j.at("xi").get<double>();
    record.delta = j.at("delta").get<double>();
    record.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    record.preshift = j.value("preshift", false);
    const json& rounds = j.at("outcomes");
    if (!rounds.is_array())
      throw SchemaError("record: 'outcomes' must be an array");
    for (const json& round : rounds) {
      if (!round.is_object())
        throw SchemaError("record: each round must be an object keyed by bit string");
      std::map<std::string, double> o;
      for (auto it = round.begin(); it != round.end(); ++it) {
        if (!it.value().is_number())
          throw SchemaError("record: outcome '" + it.key() + "' is not a number");
        o[it.key()] = it.value().get<double>();
      }
      record.outcomes.push_back(std::move(o));
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("record: ") + e.what());
  }
  if (record.rounds < 0)
    throw SchemaError("record: field 'rounds' must be >= 0");
  if (static_cast<int>(record.outcomes.size()) != record.rounds)
    throw SchemaError("record: 'outcomes' must hold one entry per round");
  for (int r = 1; r <= record.rounds; ++r) {
    std::size_t expect = record.protocol == Protocol::Efficient
                             ? (std::size_t{1} << (record.rounds - r))
                             : 1;
    if (record.outcomes[r - 1].size() != expect)
      throw SchemaError("record: round " + std::to_string(r) + " must hold " +
                        std::to_string(expect) + " outcomes");
  }
  return record;
}

void save_record(const MeasurementRecord& record, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write record to " + path.string());
  out << record_to_json(record) << '\n';
}

MeasurementRecord load_record(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read record from " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return record_from_json(text);
}

std::string transcript_to_json(const PhaseEstimationTranscript& transcript) {
  json j;
  j["phases"] = transcript.phases;
  j["alphas"] = transcript.alphas;
  j["outcomes"] = transcript.outcomes;
  return j.dump(2);
}

}  // namespace gridbreeder

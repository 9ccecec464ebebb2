#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gridbreeder {

enum class Protocol { Slow, Efficient };

enum class Variant { Breeding, Mises, Postselect, Lower };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& name);
std::string to_string(Protocol p);
Protocol protocol_from_string(const std::string& name);

/// Parameters of a Monte Carlo experiment. A single protocol run uses
/// rounds_max as its round count M; a sweep runs M = 0..rounds_max.
struct ProtocolConfig {
  int rounds_max = 4;
  double delta = 0.2;
  double xi = 2.50662827463100050242;  // sqrt(2 pi): sensor-state spacing
  int repetitions = 200;
  std::uint64_t seed = 0xB5EEDull;
  std::vector<Variant> variants = {Variant::Breeding, Variant::Mises,
                                   Variant::Postselect, Variant::Lower};
  Protocol protocol = Protocol::Efficient;
  bool preshift = false;
  std::string output_dir = ".";

  /// Throws std::domain_error when out of the supported envelope
  /// (repetitions >= 1, 0 <= rounds_max <= 8, xi > 0, delta > 0).
  void validate() const;
};

}  // namespace gridbreeder

#include "gridbreeder/config.hpp"

#include <stdexcept>

namespace gridbreeder {

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Breeding: return "breeding";
    case Variant::Mises: return "mises";
    case Variant::Postselect: return "postselect";
    case Variant::Lower: return "lower";
  }
  throw std::logic_error("unreachable variant");
}

Variant variant_from_string(const std::string& name) {
  if (name == "breeding") return Variant::Breeding;
  if (name == "mises") return Variant::Mises;
  if (name == "postselect") return Variant::Postselect;
  if (name == "lower") return Variant::Lower;
  throw std::domain_error("unknown variant '" + name + "'");
}

std::string to_string(Protocol p) {
  return p == Protocol::Slow ? "slow" : "efficient";
}

Protocol protocol_from_string(const std::string& name) {
  if (name == "slow") return Protocol::Slow;
  if (name == "efficient") return Protocol::Efficient;
  throw std::domain_error("unknown protocol '" + name + "'");
}

void ProtocolConfig::validate() const {
  if (repetitions < 1)
    throw std::domain_error("config: repetitions must be >= 1");
  if (rounds_max < 0 || rounds_max > 8)
    throw std::domain_error(
        "config: rounds_max must be in [0, 8]; 2^M + 1 coefficients per state");
  if (!(xi > 0.0)) throw std::domain_error("config: xi must be > 0");
  if (!(delta > 0.0) || delta > 1.0)
    throw std::domain_error("config: delta must be in (0, 1]");
}

}  // namespace gridbreeder

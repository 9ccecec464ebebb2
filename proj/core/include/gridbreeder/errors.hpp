#pragma once

#include <stdexcept>
#include <string>

namespace gridbreeder {

/// Two superposition lattices cannot be brought onto a common grid.
struct LatticeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Operation is well defined but not supported for these arguments
/// (e.g. overlap of states with different squeezing).
struct UnsupportedError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A caller broke a documented precondition (e.g. passed an
/// unnormalized state where a normalized one is required).
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Malformed persisted data (measurement records, configs).
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A Fock-space truncation is too small for the requested state.
struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gridbreeder

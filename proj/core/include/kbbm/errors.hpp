#pragma once

#include <stdexcept>
#include <string>

namespace kbbm {

// Precondition violations are reported as std::invalid_argument; the types
// below cover the failure modes that are part of an operation's contract.

/// The requested expansion branch does not match the (drift, interval) regime.
class RegimeMismatch : public std::invalid_argument {
 public:
  explicit RegimeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// Every importance weight vanished, so no self-normalised estimate exists.
class DegenerateWeights : public std::runtime_error {
 public:
  explicit DegenerateWeights(const std::string& what) : std::runtime_error(what) {}
};

/// A live population grew past the configured cap.
class PopulationCapExceeded : public std::runtime_error {
 public:
  explicit PopulationCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kbbm

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace congest {

using NodeId = std::int32_t;
using Round = std::int64_t;

inline constexpr NodeId kNoNode = -1;

/// Distances and weights are plain doubles. The only operations the protocols
/// perform are addition and comparison, so everything stays exact as long as
/// the inputs are integers below 2^53. Adversarial fractional inputs can round
/// differently along different summation orders and break tie semantics.
using Distance = double;

/// Dedicated "unreachable" sentinel. IEEE infinity saturates under addition
/// with any finite value, which is exactly the semantics we want.
inline constexpr Distance kInfinity = std::numeric_limits<Distance>::infinity();

inline constexpr bool is_finite(Distance d) noexcept { return d != kInfinity; }

inline constexpr Distance saturating_add(Distance a, Distance b) noexcept {
  if (a == kInfinity || b == kInfinity) return kInfinity;
  return a + b;
}

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace congest

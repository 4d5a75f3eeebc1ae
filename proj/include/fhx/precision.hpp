#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "fhx/mp.hpp"

namespace fhx {

enum class RoundingPolicy { nearest, up, down, alternate_by_index };

inline std::string to_string(RoundingPolicy r) {
  switch (r) {
    case RoundingPolicy::nearest:
      return "nearest";
    case RoundingPolicy::up:
      return "up";
    case RoundingPolicy::down:
      return "down";
    case RoundingPolicy::alternate_by_index:
      return "alternate";
  }
  return "nearest";
}

inline RoundingPolicy parse_rounding_policy(const std::string& s) {
  if (s == "nearest") return RoundingPolicy::nearest;
  if (s == "up") return RoundingPolicy::up;
  if (s == "down") return RoundingPolicy::down;
  if (s == "alternate" || s == "alternate_by_index") return RoundingPolicy::alternate_by_index;
  throw std::invalid_argument("unknown rounding mode '" + s + "'");
}

/// Mantissa width and rounding protocol for one stage of a computation.
///
/// With alternate_by_index, the value with index i is computed rounding upward
/// when i is even and downward when i is odd.
struct PrecisionPolicy {
  int mantissa_bits = 53;
  RoundingPolicy rounding = RoundingPolicy::nearest;
  std::string label;

  static PrecisionPolicy working() { return make(53, RoundingPolicy::nearest); }

  static PrecisionPolicy make(int bits, RoundingPolicy rounding, std::string label = {}) {
    PrecisionPolicy p{bits, rounding, std::move(label)};
    p.validate();
    if (p.label.empty()) p.label = std::to_string(bits) + "-bit " + to_string(rounding);
    return p;
  }

  void validate() const {
    if (mantissa_bits < 24) {
      throw std::invalid_argument("precision bits must be >= 24 (got " +
                                  std::to_string(mantissa_bits) + ")");
    }
  }

  /// u = 2^-mantissa_bits.
  double unit_roundoff() const { return std::ldexp(1.0, -mantissa_bits); }

  bool is_native_double() const {
    return mantissa_bits == 53 && rounding == RoundingPolicy::nearest;
  }

  mp::Context context_for_index(int i) const {
    mp::Rounding r = mp::Rounding::nearest;
    switch (rounding) {
      case RoundingPolicy::nearest:
        break;
      case RoundingPolicy::up:
        r = mp::Rounding::up;
        break;
      case RoundingPolicy::down:
        r = mp::Rounding::down;
        break;
      case RoundingPolicy::alternate_by_index:
        r = (i % 2 == 0) ? mp::Rounding::up : mp::Rounding::down;
        break;
    }
    return mp::Context{mantissa_bits, r};
  }

  mp::Context context() const { return context_for_index(0); }
};

}  // namespace fhx

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "popdiff/error.hpp"

namespace popdiff {

/// Upper bound on the number of elementary steps an exhaustive enumeration
/// may take. Every enumerating operation accepts one.
struct Guard {
  static constexpr std::uint64_t kDefaultLimit = 100'000'000;
  std::uint64_t limit = kDefaultLimit;

  void require(long double work, std::string_view what) const {
    if (work > static_cast<long double>(limit)) {
      throw TooLarge(std::string(what) + ": enumeration of " +
                     std::to_string(static_cast<double>(work)) +
                     " steps exceeds guard limit " + std::to_string(limit));
    }
  }
};

/// base^exp as long double, used for guard arithmetic where the exact power
/// may overflow 64 bits.
inline long double power_ld(std::uint64_t base, std::uint64_t exp) {
  long double r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) r *= static_cast<long double>(base);
  return r;
}

}  // namespace popdiff

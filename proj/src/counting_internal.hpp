#pragma once

// Exact sums of products of rational grid values. The values are rescaled to
// integers over a common denominator so the inner loop stays in machine
// integers whenever the numerators are small.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <vector>

#include "popdiff/gridfn.hpp"
#include "popdiff/rational.hpp"

namespace popdiff::detail {

class ExactCounter {
 public:
  explicit ExactCounter(const std::vector<Rational>& values) {
    denom_ = 1;
    for (const auto& v : values) {
      denom_ = boost::multiprecision::lcm(denom_, boost::multiprecision::denominator(v));
    }
    big_.reserve(values.size());
    bool small = true;
    for (const auto& v : values) {
      BigInt num = boost::multiprecision::numerator(v) *
                   (denom_ / boost::multiprecision::denominator(v));
      if (abs(num) > kSmallLimit) small = false;
      big_.push_back(std::move(num));
    }
    if (small) {
      small_.reserve(big_.size());
      for (const auto& b : big_) small_.push_back(b.convert_to<std::int64_t>());
      big_.clear();
    }
  }

  const BigInt& denom() const { return denom_; }

  /// Sum over walker positions [begin, end) of v[base] * prod_{i<m} v[shifted(i)],
  /// scaled by denom^(m+1). m is at most 3.
  BigInt sum(OffsetWalker& walker, std::uint64_t begin, std::uint64_t end,
             std::size_t m) const {
    walker.seek(begin);
    if (!small_.empty()) {
      Int128 acc = 0;
      for (std::uint64_t i = begin; i < end; ++i, walker.next()) {
        Int128 prod = small_[walker.base()];
        for (std::size_t j = 0; j < m && prod != 0; ++j) prod *= small_[walker.shifted(j)];
        acc += prod;
      }
      return to_big(acc);
    }
    BigInt acc = 0;
    for (std::uint64_t i = begin; i < end; ++i, walker.next()) {
      BigInt prod = big_[walker.base()];
      for (std::size_t j = 0; j < m && prod != 0; ++j) prod *= big_[walker.shifted(j)];
      acc += prod;
    }
    return acc;
  }

 private:
  // 2^15: four factors stay below 2^60, so 2^60 terms of those fit in __int128
  static constexpr std::int64_t kSmallLimit = 1 << 15;

  static BigInt to_big(Int128 v) {
    const bool neg = v < 0;
    UInt128 u = neg ? static_cast<UInt128>(-v)
                              : static_cast<UInt128>(v);
    BigInt out = static_cast<std::uint64_t>(u >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(u);
    return neg ? BigInt(-out) : out;
  }

  BigInt denom_;
  std::vector<std::int64_t> small_;
  std::vector<BigInt> big_;
};

}  // namespace popdiff::detail

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solon/errors.hpp"

namespace solon {

/// Non-negative integers, each below 10^digit_budget. The digit-interleaving
/// pair below demonstrates that compression is lossless for irregular
/// encoders: r_c values merge into one integer and back, exactly.
/// A demonstration codec, not part of the gradient pipeline.
struct DigitBlock {
  std::vector<long long> values;
  int digit_budget = 0;
};

namespace detail {
inline std::uint64_t pow10_u64(int e) {
  std::uint64_t p = 1;
  for (int i = 0; i < e; ++i) p *= 10ull;
  return p;
}

inline void check_digit_params(int compression, int digit_budget) {
  if (compression < 1)
    throw DimensionMismatch("digit codec: r_c must be >= 1");
  if (digit_budget < 1)
    throw DigitOverflow("digit codec: digit budget must be >= 1");
  // Highest used decimal position is r_c * digit_budget; position 0 is always
  // zero, so packed values need r_c * digit_budget + 1 digits.
  if (compression * digit_budget > 18)
    throw DigitOverflow(
        "digit codec: r_c * digit_budget must be <= 18 to stay exact in "
        "64-bit arithmetic, got " +
        std::to_string(compression * digit_budget));
}
}  // namespace detail

/// Interleave decimal digits: digit j of input l (1-based) within chunk k
/// lands at decimal position r_c * j + l of output k. Chunks of r_c inputs
/// map to one output each.
inline std::vector<std::uint64_t> pack(const DigitBlock& block,
                                       int compression) {
  detail::check_digit_params(compression, block.digit_budget);
  if (block.values.size() % static_cast<size_t>(compression) != 0)
    throw DimensionMismatch("pack: input length must be divisible by r_c");
  const std::uint64_t bound = detail::pow10_u64(block.digit_budget);
  for (long long v : block.values) {
    if (v < 0)
      throw NegativeInput("pack: negative value " + std::to_string(v));
    if (static_cast<std::uint64_t>(v) >= bound)
      throw DigitOverflow("pack: value " + std::to_string(v) +
                          " has more than " +
                          std::to_string(block.digit_budget) + " digits");
  }

  const size_t chunks = block.values.size() / compression;
  std::vector<std::uint64_t> out(chunks, 0);
  for (size_t k = 0; k < chunks; ++k) {
    std::uint64_t acc = 0;
    for (int j = 0; j < block.digit_budget; ++j) {
      for (int l = 1; l <= compression; ++l) {
        const std::uint64_t x = static_cast<std::uint64_t>(
            block.values[k * compression + (l - 1)]);
        const std::uint64_t digit = (x / detail::pow10_u64(j)) % 10ull;
        acc += digit * detail::pow10_u64(compression * j + l);
      }
    }
    out[k] = acc;
  }
  return out;
}

/// Exact inverse of pack over the digit budget.
inline DigitBlock unpack(const std::vector<std::uint64_t>& packed,
                         int compression, int digit_budget) {
  detail::check_digit_params(compression, digit_budget);
  DigitBlock block;
  block.digit_budget = digit_budget;
  block.values.resize(packed.size() * compression);
  for (size_t k = 0; k < packed.size(); ++k) {
    for (int l = 1; l <= compression; ++l) {
      std::uint64_t x = 0;
      for (int j = digit_budget - 1; j >= 0; --j) {
        const std::uint64_t digit =
            (packed[k] / detail::pow10_u64(compression * j + l)) % 10ull;
        x = x * 10ull + digit;
      }
      block.values[k * compression + (l - 1)] = static_cast<long long>(x);
    }
  }
  return block;
}

}  // namespace solon

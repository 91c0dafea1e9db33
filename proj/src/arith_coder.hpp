#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bit_io.hpp"

namespace mdts::arith {

// Binary arithmetic coder over a static frequency table, with 62-bit
// interval registers and deferred (pending) bits instead of carries.
// cumulative[i] is the sum of counts of symbols < i; cumulative.back() is the
// total, which must stay below 2^32.
class Encoder {
 public:
  explicit Encoder(bits::BitWriter& out) : out_(out) {}

  void encode(std::uint64_t cum_low, std::uint64_t cum_high, std::uint64_t total);
  void finish();

 private:
  void emit(unsigned b);

  bits::BitWriter& out_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = kTop;
  std::uint64_t pending_ = 0;

 public:
  static constexpr std::uint64_t kTop = (std::uint64_t{1} << 62) - 1;
  static constexpr std::uint64_t kHalf = std::uint64_t{1} << 61;
  static constexpr std::uint64_t kQuarter = std::uint64_t{1} << 60;
};

class Decoder {
 public:
  explicit Decoder(bits::BitReader& in);

  // Symbol index s with cumulative[s] <= target < cumulative[s+1].
  std::size_t decode(std::span<const std::uint64_t> cumulative);

 private:
  bits::BitReader& in_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = Encoder::kTop;
  std::uint64_t value_ = 0;
};

}  // namespace mdts::arith

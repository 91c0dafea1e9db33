#include "arith_coder.hpp"

#include <algorithm>

namespace mdts::arith {

__extension__ typedef unsigned __int128 u128;
constexpr std::uint64_t kHalf = Encoder::kHalf;
constexpr std::uint64_t kQuarter = Encoder::kQuarter;

void Encoder::emit(unsigned b) {
  out_.bit(b);
  for (; pending_ > 0; --pending_) out_.bit(b ^ 1U);
}

void Encoder::encode(std::uint64_t cum_low, std::uint64_t cum_high, std::uint64_t total) {
  const u128 range = static_cast<u128>(high_ - low_) + 1;
  high_ = low_ + static_cast<std::uint64_t>(range * cum_high / total) - 1;
  low_ = low_ + static_cast<std::uint64_t>(range * cum_low / total);
  for (;;) {
    if (high_ < kHalf) {
      emit(0);
    } else if (low_ >= kHalf) {
      emit(1);
      low_ -= kHalf;
      high_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kHalf + kQuarter) {
      ++pending_;
      low_ -= kQuarter;
      high_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1U;
  }
}

void Encoder::finish() {
  ++pending_;
  emit(low_ < kQuarter ? 0 : 1);
}

Decoder::Decoder(bits::BitReader& in) : in_(in) {
  for (int i = 0; i < 62; ++i) value_ = (value_ << 1) | in_.bit_or_zero();
}

std::size_t Decoder::decode(std::span<const std::uint64_t> cumulative) {
  const std::uint64_t total = cumulative.back();
  const u128 range = static_cast<u128>(high_ - low_) + 1;
  const std::uint64_t target =
      static_cast<std::uint64_t>(((static_cast<u128>(value_ - low_) + 1) * total - 1) / range);
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  const std::size_t s = static_cast<std::size_t>(it - cumulative.begin()) - 1;

  high_ = low_ + static_cast<std::uint64_t>(range * cumulative[s + 1] / total) - 1;
  low_ = low_ + static_cast<std::uint64_t>(range * cumulative[s] / total);
  for (;;) {
    if (high_ < kHalf) {
    } else if (low_ >= kHalf) {
      low_ -= kHalf;
      high_ -= kHalf;
      value_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kHalf + kQuarter) {
      low_ -= kQuarter;
      high_ -= kQuarter;
      value_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1U;
    value_ = (value_ << 1) | in_.bit_or_zero();
  }
  return s;
}

}  // namespace mdts::arith

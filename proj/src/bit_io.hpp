#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mdts/errors.hpp"

namespace mdts::bits {

// MSB-first bit packer.
class BitWriter {
 public:
  void put(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) bit(static_cast<unsigned>((value >> i) & 1U));
  }
  void bit(unsigned b) {
    if (length_ % 8 == 0) bytes_.push_back(0);
    if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (length_ % 8));
    ++length_;
  }

  std::uint64_t length() const noexcept { return length_; }
  std::vector<std::uint8_t> release() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t length_ = 0;
};

// MSB-first reader over the first `length` bits of a buffer.
class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::uint64_t length, std::size_t base_offset = 0)
      : bytes_(bytes), length_(length), base_(base_offset) {}

  // Reads zeros once the stream is exhausted.
  unsigned bit_or_zero() noexcept {
    if (pos_ >= length_) {
      ++pos_;
      return 0;
    }
    return take();
  }
  std::uint64_t get(unsigned width) {
    if (remaining() < width) throw FormatError("truncated bit stream", base_ + bytes_.size());
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | take();
    return v;
  }

  std::uint64_t position() const noexcept { return pos_; }
  std::uint64_t remaining() const noexcept { return pos_ >= length_ ? 0 : length_ - pos_; }
  std::size_t byte_offset() const noexcept { return base_ + static_cast<std::size_t>(pos_ / 8); }

 private:
  unsigned take() noexcept {
    const unsigned b = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U;
    ++pos_;
    return b;
  }

  std::span<const std::uint8_t> bytes_;
  std::uint64_t length_;
  std::size_t base_;
  std::uint64_t pos_ = 0;
};

}  // namespace mdts::bits

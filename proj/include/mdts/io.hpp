#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdts/ndarray.hpp"

namespace mdts {

// MDA1 raw array container:
//   "MDA1", u8 version=1, u8 d, u16 LE |A|, d x u64 LE dims, volume symbol bytes.
std::vector<std::uint8_t> encode_mda(const NdArray& x);
NdArray decode_mda(std::span<const std::uint8_t> bytes);

// Binary PGM (P5). Gray value g becomes symbol g; |A| = maxval + 1.
NdArray decode_pgm(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

NdArray read_mda(const std::filesystem::path& path);
void write_mda(const std::filesystem::path& path, const NdArray& x);
// Dispatches on magic bytes: MDA1 or P5.
NdArray read_array(const std::filesystem::path& path);

// Little-endian cursor over a byte buffer; throws FormatError on overrun.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::span<const std::uint8_t> take(std::size_t n);

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }

  std::size_t size() const noexcept { return out_.size(); }
  std::vector<std::uint8_t> release() { return std::move(out_); }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> out_;
};

}  // namespace mdts

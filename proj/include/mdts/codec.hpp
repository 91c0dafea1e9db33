#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdts/ndarray.hpp"

namespace mdts {

// Bit string packed MSB-first; only the first bit_length bits are meaningful.
struct BitBuffer {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_length = 0;

  bool operator==(const BitBuffer&) const = default;
};

// Order-q Hilbert curve on a 2^q x 2^q grid. Entry t is the (row, col) of the
// t-th visited site; order 1 visits (0,0),(0,1),(1,1),(1,0).
std::vector<std::pair<std::size_t, std::size_t>> hilbert_order(std::size_t side);
std::vector<std::uint8_t> hilbert_scan(const NdArray& x);
NdArray hilbert_unscan(std::span<const std::uint8_t> seq, Alphabet alphabet, std::size_t side);

// LZ78 with an initially empty dictionary. Layout: one flag bit (a trailing
// partial phrase follows), then per phrase a ceil(log2(dict_size+1))-bit index
// and a ceil(log2|A|)-bit symbol; the partial phrase is an index alone.
// The empty sequence encodes to zero bits.
BitBuffer lz78_encode(std::span<const std::uint8_t> seq, const Alphabet& alphabet);
std::vector<std::uint8_t> lz78_decode(const BitBuffer& bits, const Alphabet& alphabet);

enum class CodecMode : std::uint8_t { Raw = 0, Block = 1, Lz78Hilbert = 2 };
const char* to_string(CodecMode mode);

struct RateReport {
  std::uint64_t total_bits = 0;
  double bits_per_site = 0.0;
  std::uint64_t header_bits = 0;      // fixed header, entry count and payload length fields
  std::uint64_t dictionary_bits = 0;
  std::uint64_t payload_bits = 0;     // payload bytes, padded
  std::uint64_t boundary_bits = 0;

  std::string to_text() const;
};

// MDTC container:
//   "MDTC", u8 version=1, u8 mode, u8 d, u16 |A|, d x u64 dims, u32 k,
//   u64 entry count, entries (k^d symbol bytes + u32 count), u64 payload bit
//   length, payload bytes, boundary bytes. Little-endian.
struct CompressedStream {
  CodecMode mode = CodecMode::Raw;
  unsigned alphabet_size = 2;
  Dims dims;
  std::uint32_t k = 0;
  std::vector<std::vector<std::uint8_t>> dictionary;  // first-occurrence order
  std::vector<std::uint32_t> counts;
  BitBuffer payload;
  std::vector<std::uint8_t> boundary;

  std::size_t volume() const noexcept;
  std::vector<std::uint8_t> serialize() const;
  static CompressedStream parse(std::span<const std::uint8_t> bytes);
  RateReport rate() const;
};

struct EncodeOptions {
  std::optional<std::size_t> k;  // explicit block side, otherwise chosen by size
  bool allow_raw_fallback = true;
};

// Two-part block code with RAW fallback. Deterministic.
CompressedStream encode(const NdArray& x, const EncodeOptions& options = {});
// Forces BLOCK mode with side k (no fallback).
CompressedStream encode_block(const NdArray& x, std::size_t k);
CompressedStream encode_raw(const NdArray& x);
// Hilbert scan + LZ78; needs d = 2 and a square power-of-two side.
CompressedStream encode_lz78_hilbert(const NdArray& x);
NdArray decode(const CompressedStream& s);

std::vector<std::uint8_t> compress(const NdArray& x, const EncodeOptions& options = {});
NdArray decompress(std::span<const std::uint8_t> bytes);

struct RateComparison {
  double block_rate = 0.0;
  double lz78_hilbert_rate = 0.0;
  double raw_rate = 0.0;
  std::size_t block_k = 0;
  CodecMode block_mode = CodecMode::Raw;

  std::string to_text() const;
};

// lz78_hilbert_rate is NaN unless x is a square power-of-two 2-D array.
RateComparison compare_rates(const NdArray& x);

}  // namespace mdts

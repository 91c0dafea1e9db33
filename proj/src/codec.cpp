#include "mdts/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <unordered_map>

#include "arith_coder.hpp"
#include "bit_io.hpp"
#include "mdts/block_stats.hpp"
#include "mdts/errors.hpp"
#include "mdts/io.hpp"

namespace mdts {

namespace {

constexpr std::uint8_t kVersion = 1;

std::size_t pow_size(std::size_t base, std::size_t exp) {
  std::size_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) v *= base;
  return v;
}

unsigned width_for(std::uint64_t dict_size) {
  return static_cast<unsigned>(std::bit_width(dict_size));
}

std::size_t header_bytes(std::size_t d) { return 4 + 1 + 1 + 1 + 2 + 8 * d + 4 + 8 + 8; }

// Number of full k-cubes per axis under the p = 0 partition.
Dims grid_counts(const Dims& dims, std::size_t k) {
  Dims c(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) c[i] = dims[i] / k;
  return c;
}

std::size_t boundary_sites(const Dims& dims, std::size_t k) {
  std::size_t vol = 1, inner = 1;
  for (std::size_t n : dims) {
    vol *= n;
    inner *= (n / k) * k;
  }
  return vol - inner;
}

bool in_boundary(const Dims& idx, const Dims& dims, std::size_t k) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= (dims[i] / k) * k) return true;
  }
  return false;
}

// Exact total_blocks * H of the count vector, in bits.
double entropy_bits(const std::vector<std::uint32_t>& counts) {
  double total = 0.0;
  for (auto c : counts) total += c;
  double bits = 0.0;
  for (auto c : counts) {
    if (c > 0) bits -= static_cast<double>(c) * std::log2(static_cast<double>(c) / total);
  }
  return bits;
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

// --- Hilbert scan ---------------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> hilbert_order(std::size_t side) {
  if (side == 0 || !std::has_single_bit(side)) {
    throw DomainError("Hilbert scan needs a power-of-two side, got " + std::to_string(side));
  }
  std::vector<std::pair<std::size_t, std::size_t>> out(side * side);
  for (std::size_t t = 0; t < side * side; ++t) {
    std::size_t x = 0, y = 0, rest = t;
    for (std::size_t s = 1; s < side; s *= 2) {
      const std::size_t rx = 1 & (rest / 2);
      const std::size_t ry = 1 & (rest ^ rx);
      if (ry == 0) {
        if (rx == 1) {
          x = s - 1 - x;
          y = s - 1 - y;
        }
        std::swap(x, y);
      }
      x += s * rx;
      y += s * ry;
      rest /= 4;
    }
    out[t] = {x, y};
  }
  return out;
}

std::vector<std::uint8_t> hilbert_scan(const NdArray& x) {
  if (x.dim() != 2 || !x.is_cube()) throw DomainError("Hilbert scan needs a square 2-D array");
  const std::size_t n = x.dims()[0];
  const auto order = hilbert_order(n);
  std::vector<std::uint8_t> seq(order.size());
  const auto data = x.data();
  for (std::size_t t = 0; t < order.size(); ++t) seq[t] = data[order[t].first * n + order[t].second];
  return seq;
}

NdArray hilbert_unscan(std::span<const std::uint8_t> seq, Alphabet alphabet, std::size_t side) {
  const auto order = hilbert_order(side);
  if (seq.size() != order.size()) throw DomainError("sequence length does not match side^2");
  std::vector<std::uint8_t> data(seq.size());
  for (std::size_t t = 0; t < order.size(); ++t) data[order[t].first * side + order[t].second] = seq[t];
  return NdArray(alphabet, Dims{side, side}, std::move(data));
}

// --- LZ78 -----------------------------------------------------------------

BitBuffer lz78_encode(std::span<const std::uint8_t> seq, const Alphabet& alphabet) {
  if (seq.empty()) return {};
  const unsigned sym_bits = alphabet.bits_per_symbol();
  std::unordered_map<std::uint64_t, std::uint32_t> trie;  // (node << 8 | symbol) -> child
  trie.reserve(seq.size() / 4 + 16);
  std::vector<std::pair<std::uint32_t, std::uint8_t>> phrases;
  std::uint32_t next_id = 1;
  std::uint32_t node = 0;
  for (std::uint8_t s : seq) {
    if (s >= alphabet.size()) throw DomainError("symbol outside the alphabet");
    const std::uint64_t key = (static_cast<std::uint64_t>(node) << 8) | s;
    auto it = trie.find(key);
    if (it != trie.end()) {
      node = it->second;
      continue;
    }
    phrases.emplace_back(node, s);
    trie.emplace(key, next_id++);
    node = 0;
  }
  const bool partial = node != 0;

  bits::BitWriter w;
  w.bit(partial ? 1 : 0);
  std::uint64_t dict_size = 0;
  for (const auto& [index, s] : phrases) {
    w.put(index, width_for(dict_size));
    w.put(s, sym_bits);
    ++dict_size;
  }
  if (partial) w.put(node, width_for(dict_size));
  BitBuffer out;
  out.bit_length = w.length();
  out.bytes = w.release();
  return out;
}

std::vector<std::uint8_t> lz78_decode(const BitBuffer& buf, const Alphabet& alphabet) {
  std::vector<std::uint8_t> out;
  if (buf.bit_length == 0) return out;
  if (buf.bytes.size() * 8 < buf.bit_length) throw FormatError("LZ78 stream shorter than its length", 0);
  const unsigned sym_bits = alphabet.bits_per_symbol();
  bits::BitReader r(buf.bytes, buf.bit_length);
  const bool partial = r.get(1) != 0;
  std::vector<std::uint32_t> parent{0};
  std::vector<std::uint8_t> last{0};
  std::vector<std::uint8_t> scratch;

  auto append_phrase = [&](std::uint64_t index) {
    scratch.clear();
    for (std::uint64_t n = index; n != 0; n = parent[n]) scratch.push_back(last[n]);
    out.insert(out.end(), scratch.rbegin(), scratch.rend());
  };

  bool partial_seen = false;
  while (r.remaining() > 0) {
    const std::uint64_t dict_size = parent.size() - 1;
    const unsigned w = width_for(dict_size);
    if (partial && r.remaining() == w) {
      const std::uint64_t index = r.get(w);
      if (index == 0 || index > dict_size) throw FormatError("LZ78 bad partial index", r.byte_offset());
      append_phrase(index);
      partial_seen = true;
      break;
    }
    if (r.remaining() < w + sym_bits) throw FormatError("truncated LZ78 stream", r.byte_offset());
    const std::uint64_t index = r.get(w);
    if (index > dict_size) throw FormatError("LZ78 index beyond dictionary", r.byte_offset());
    const std::uint64_t s = r.get(sym_bits);
    if (s >= alphabet.size()) throw FormatError("LZ78 symbol outside alphabet", r.byte_offset());
    append_phrase(index);
    out.push_back(static_cast<std::uint8_t>(s));
    parent.push_back(static_cast<std::uint32_t>(index));
    last.push_back(static_cast<std::uint8_t>(s));
  }
  if (partial && !partial_seen) throw FormatError("LZ78 partial phrase missing", r.byte_offset());
  return out;
}

// --- container ------------------------------------------------------------

const char* to_string(CodecMode mode) {
  switch (mode) {
    case CodecMode::Raw: return "RAW";
    case CodecMode::Block: return "BLOCK";
    case CodecMode::Lz78Hilbert: return "LZ78-HILBERT";
  }
  return "?";
}

std::string RateReport::to_text() const {
  std::string s;
  s += "total_bits=" + std::to_string(total_bits) + "\n";
  s += "bits_per_site=" + fmt6(bits_per_site) + "\n";
  s += "header_bits=" + std::to_string(header_bits) + "\n";
  s += "dictionary_bits=" + std::to_string(dictionary_bits) + "\n";
  s += "payload_bits=" + std::to_string(payload_bits) + "\n";
  s += "boundary_bits=" + std::to_string(boundary_bits) + "\n";
  return s;
}

std::size_t CompressedStream::volume() const noexcept {
  std::size_t v = 1;
  for (std::size_t n : dims) v *= n;
  return v;
}

std::vector<std::uint8_t> CompressedStream::serialize() const {
  ByteWriter w;
  for (char c : std::string_view("MDTC")) w.u8(static_cast<std::uint8_t>(c));
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(mode));
  w.u8(static_cast<std::uint8_t>(dims.size()));
  w.u16(static_cast<std::uint16_t>(alphabet_size));
  for (std::size_t n : dims) w.u64(n);
  w.u32(k);
  w.u64(dictionary.size());
  for (std::size_t i = 0; i < dictionary.size(); ++i) {
    w.bytes(dictionary[i]);
    w.u32(counts[i]);
  }
  w.u64(payload.bit_length);
  w.bytes(payload.bytes);
  w.bytes(boundary);
  return w.release();
}

CompressedStream CompressedStream::parse(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  CompressedStream s;
  const auto magic = r.take(4);
  if (std::string_view(reinterpret_cast<const char*>(magic.data()), 4) != "MDTC") {
    throw FormatError("bad MDTC magic", 0);
  }
  if (r.u8() != kVersion) throw FormatError("unsupported MDTC version", 4);
  const std::uint8_t mode = r.u8();
  if (mode > 2) throw FormatError("unknown MDTC mode " + std::to_string(mode), 5);
  s.mode = static_cast<CodecMode>(mode);
  const std::size_t d = r.u8();
  if (d == 0 || d > kMaxDim) throw FormatError("MDTC dimension must be 1..3", 6);
  s.alphabet_size = r.u16();
  if (s.alphabet_size < 2 || s.alphabet_size > 256) throw FormatError("MDTC alphabet size must be 2..256", 7);
  const Alphabet alphabet(s.alphabet_size);
  const unsigned bps = alphabet.bits_per_symbol();
  s.dims.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t at = r.offset();
    const std::uint64_t n = r.u64();
    if (n == 0 || n > (std::uint64_t{1} << 40)) throw FormatError("MDTC bad dimension length", at);
    s.dims[i] = static_cast<std::size_t>(n);
  }
  if (static_cast<double>(s.volume()) > 0x1.0p40) throw FormatError("MDTC volume too large", 9);
  const std::size_t k_at = r.offset();
  s.k = r.u32();
  const std::size_t min_side = *std::min_element(s.dims.begin(), s.dims.end());
  if (s.mode == CodecMode::Block) {
    if (s.k == 0 || s.k > min_side) throw FormatError("MDTC block side out of range", k_at);
  } else if (s.k != 0) {
    throw FormatError("MDTC block side must be 0 outside BLOCK mode", k_at);
  }
  if (s.mode == CodecMode::Lz78Hilbert &&
      (d != 2 || s.dims[0] != s.dims[1] || !std::has_single_bit(s.dims[0]))) {
    throw FormatError("LZ78-HILBERT stream needs a square power-of-two 2-D shape", 6);
  }

  const std::size_t dict_at = r.offset();
  const std::uint64_t entries = r.u64();
  std::uint64_t expected_blocks = 0;
  if (s.mode == CodecMode::Block) {
    expected_blocks = 1;
    for (std::size_t n : s.dims) expected_blocks *= n / s.k;
    const std::size_t entry_bytes = pow_size(s.k, d) + 4;
    if (entries == 0 || entries > expected_blocks || entries > r.remaining() / entry_bytes) {
      throw FormatError("MDTC dictionary entry count out of range", dict_at);
    }
  } else if (entries != 0) {
    throw FormatError("MDTC dictionary must be empty outside BLOCK mode", dict_at);
  }
  const std::size_t block_vol = s.mode == CodecMode::Block ? pow_size(s.k, d) : 0;
  std::uint64_t sum = 0;
  s.dictionary.reserve(entries);
  s.counts.reserve(entries);
  for (std::uint64_t e = 0; e < entries; ++e) {
    const std::size_t at = r.offset();
    const auto block = r.take(block_vol);
    for (std::uint8_t b : block) {
      if (b >= s.alphabet_size) throw FormatError("MDTC dictionary symbol outside alphabet", at);
    }
    s.dictionary.emplace_back(block.begin(), block.end());
    const std::uint32_t c = r.u32();
    if (c == 0) throw FormatError("MDTC dictionary count is zero", r.offset() - 4);
    s.counts.push_back(c);
    sum += c;
  }
  if (s.mode == CodecMode::Block && sum != expected_blocks) {
    throw FormatError("MDTC dictionary counts do not sum to the block count", dict_at);
  }

  const std::size_t len_at = r.offset();
  s.payload.bit_length = r.u64();
  if (s.mode == CodecMode::Raw && s.payload.bit_length != static_cast<std::uint64_t>(s.volume()) * bps) {
    throw FormatError("MDTC raw payload length does not match shape", len_at);
  }
  const std::uint64_t payload_bytes = (s.payload.bit_length + 7) / 8;
  if (payload_bytes > r.remaining()) throw FormatError("MDTC payload truncated", len_at);
  const auto payload = r.take(static_cast<std::size_t>(payload_bytes));
  s.payload.bytes.assign(payload.begin(), payload.end());

  const std::size_t boundary_bytes =
      s.mode == CodecMode::Block ? (boundary_sites(s.dims, s.k) * bps + 7) / 8 : 0;
  const auto boundary = r.take(boundary_bytes);
  s.boundary.assign(boundary.begin(), boundary.end());
  if (r.remaining() != 0) throw FormatError("trailing bytes after MDTC stream", r.offset());
  return s;
}

RateReport CompressedStream::rate() const {
  RateReport rep;
  rep.header_bits = header_bytes(dims.size()) * 8;
  rep.dictionary_bits = dictionary.size() * (pow_size(k, dims.size()) + 4) * 8;
  rep.payload_bits = payload.bytes.size() * 8;
  rep.boundary_bits = boundary.size() * 8;
  rep.total_bits = rep.header_bits + rep.dictionary_bits + rep.payload_bits + rep.boundary_bits;
  rep.bits_per_site = static_cast<double>(rep.total_bits) / static_cast<double>(volume());
  return rep;
}

// --- encoders -------------------------------------------------------------

CompressedStream encode_raw(const NdArray& x) {
  CompressedStream s;
  s.mode = CodecMode::Raw;
  s.alphabet_size = x.alphabet().size();
  s.dims = x.dims();
  const unsigned bps = x.alphabet().bits_per_symbol();
  bits::BitWriter w;
  for (std::uint8_t v : x.data()) w.put(v, bps);
  s.payload.bit_length = w.length();
  s.payload.bytes = w.release();
  return s;
}

CompressedStream encode_block(const NdArray& x, std::size_t k) {
  if (k == 0 || k > x.min_side()) throw DomainError("block side must lie in [1, min side]");
  CompressedStream s;
  s.mode = CodecMode::Block;
  s.alphabet_size = x.alphabet().size();
  s.dims = x.dims();
  s.k = static_cast<std::uint32_t>(k);

  const BlockExtractor ex(x, k);
  const Dims grid = grid_counts(x.dims(), k);
  std::uint64_t n_blocks = 1;
  for (std::size_t c : grid) n_blocks *= c;
  if (n_blocks >= (std::uint64_t{1} << 32)) throw ResourceError("too many blocks for u32 counts");

  std::unordered_map<std::string, std::uint32_t> index_of;
  std::vector<std::uint32_t> sequence;
  sequence.reserve(n_blocks);
  std::string block(ex.block_volume(), '\0');
  Dims origin(x.dim());
  for_each_index(grid, [&](const Dims& r) {
    for (std::size_t i = 0; i < r.size(); ++i) origin[i] = r[i] * k;
    ex.copy(origin, reinterpret_cast<std::uint8_t*>(block.data()));
    auto [it, fresh] = index_of.try_emplace(block, static_cast<std::uint32_t>(s.dictionary.size()));
    if (fresh) {
      s.dictionary.emplace_back(block.begin(), block.end());
      s.counts.push_back(0);
    }
    ++s.counts[it->second];
    sequence.push_back(it->second);
  });

  bits::BitWriter w;
  if (s.dictionary.size() > 1) {
    std::vector<std::uint64_t> cum(s.counts.size() + 1, 0);
    for (std::size_t i = 0; i < s.counts.size(); ++i) cum[i + 1] = cum[i] + s.counts[i];
    arith::Encoder enc(w);
    for (std::uint32_t v : sequence) enc.encode(cum[v], cum[v + 1], cum.back());
    enc.finish();
  }
  s.payload.bit_length = w.length();
  s.payload.bytes = w.release();
  if (static_cast<double>(s.payload.bit_length) > entropy_bits(s.counts) + 32.0) {
    throw std::logic_error("arithmetic coder exceeded its length bound");
  }

  const unsigned bps = x.alphabet().bits_per_symbol();
  bits::BitWriter bw;
  const auto data = x.data();
  std::size_t flat = 0;
  for_each_index(x.dims(), [&](const Dims& idx) {
    if (in_boundary(idx, x.dims(), k)) bw.put(data[flat], bps);
    ++flat;
  });
  s.boundary = bw.release();
  return s;
}

namespace {

// Predicted serialized size of BLOCK mode with side k, from the count vector.
double predicted_block_bytes(const NdArray& x, std::size_t k) {
  const auto dist = empirical_nonoverlapping(x, k);
  const double block_vol = std::pow(static_cast<double>(k), static_cast<double>(x.dim()));
  const double payload_bits =
      dist.distinct() > 1 ? static_cast<double>(dist.total_blocks) * shannon_entropy(dist) + 2.0 : 0.0;
  const double boundary_bits =
      static_cast<double>(boundary_sites(x.dims(), k)) * x.alphabet().bits_per_symbol();
  return static_cast<double>(header_bytes(x.dim())) +
         static_cast<double>(dist.distinct()) * (block_vol + 4.0) + std::ceil(payload_bits / 8.0) +
         std::ceil(boundary_bits / 8.0);
}

}  // namespace

CompressedStream encode(const NdArray& x, const EncodeOptions& options) {
  std::size_t k;
  if (options.k) {
    k = *options.k;
  } else {
    // Candidate sides keep the block alphabet no larger than the sample volume.
    const double log2_vol = std::log2(static_cast<double>(x.volume()));
    std::size_t k_max = 1;
    while (k_max + 1 <= x.min_side() &&
           std::pow(static_cast<double>(k_max + 1), static_cast<double>(x.dim())) *
                   x.alphabet().log2_size() <= log2_vol) {
      ++k_max;
    }
    k = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 1; c <= k_max; ++c) {
      const double size = predicted_block_bytes(x, c);
      if (size < best) {
        best = size;
        k = c;
      }
    }
  }
  CompressedStream block = encode_block(x, k);
  if (!options.allow_raw_fallback) return block;
  CompressedStream raw = encode_raw(x);
  if (block.rate().total_bits >= raw.rate().total_bits) return raw;
  return block;
}

CompressedStream encode_lz78_hilbert(const NdArray& x) {
  const auto seq = hilbert_scan(x);
  CompressedStream s;
  s.mode = CodecMode::Lz78Hilbert;
  s.alphabet_size = x.alphabet().size();
  s.dims = x.dims();
  s.payload = lz78_encode(seq, x.alphabet());
  return s;
}

// --- decoder --------------------------------------------------------------

NdArray decode(const CompressedStream& s) {
  const Alphabet alphabet(s.alphabet_size);
  const unsigned bps = alphabet.bits_per_symbol();
  const std::size_t vol = s.volume();
  switch (s.mode) {
    case CodecMode::Raw: {
      if (s.payload.bit_length != static_cast<std::uint64_t>(vol) * bps) {
        throw FormatError("raw payload length does not match shape", 0);
      }
      bits::BitReader r(s.payload.bytes, s.payload.bit_length);
      std::vector<std::uint8_t> data(vol);
      for (auto& v : data) {
        v = static_cast<std::uint8_t>(r.get(bps));
        if (v >= s.alphabet_size) throw FormatError("raw symbol outside alphabet", r.byte_offset());
      }
      return NdArray(alphabet, s.dims, std::move(data));
    }
    case CodecMode::Lz78Hilbert: {
      auto seq = lz78_decode(s.payload, alphabet);
      if (seq.size() != vol) throw FormatError("LZ78 stream decodes to the wrong length", 0);
      if (s.dims.size() != 2 || s.dims[0] != s.dims[1]) {
        throw FormatError("LZ78-HILBERT stream needs a square 2-D shape", 0);
      }
      return hilbert_unscan(seq, alphabet, s.dims[0]);
    }
    case CodecMode::Block:
      break;
  }

  const std::size_t d = s.dims.size();
  const std::size_t k = s.k;
  if (k == 0 || k > *std::min_element(s.dims.begin(), s.dims.end()) || s.dictionary.empty() ||
      s.counts.size() != s.dictionary.size()) {
    throw FormatError("inconsistent BLOCK stream", 0);
  }
  const Dims grid = grid_counts(s.dims, k);
  std::vector<std::uint64_t> cum(s.counts.size() + 1, 0);
  for (std::size_t i = 0; i < s.counts.size(); ++i) cum[i + 1] = cum[i] + s.counts[i];

  std::vector<std::uint8_t> data(vol, 0);
  Dims strides(d, 1);
  for (std::size_t i = d - 1; i-- > 0;) strides[i] = strides[i + 1] * s.dims[i + 1];

  bits::BitReader pr(s.payload.bytes, s.payload.bit_length);
  std::optional<arith::Decoder> dec;
  if (s.dictionary.size() > 1) dec.emplace(pr);
  const Dims cube(d, k);
  for_each_index(grid, [&](const Dims& r) {
    const std::size_t e = dec ? dec->decode(cum) : 0;
    const auto& block = s.dictionary[e];
    if (block.size() != pow_size(k, d)) throw FormatError("dictionary block has the wrong size", 0);
    std::size_t j = 0;
    for_each_index(cube, [&](const Dims& u) {
      std::size_t off = 0;
      for (std::size_t i = 0; i < d; ++i) off += (r[i] * k + u[i]) * strides[i];
      data[off] = block[j++];
    });
  });

  bits::BitReader br(s.boundary, s.boundary.size() * 8);
  std::size_t flat = 0;
  for_each_index(s.dims, [&](const Dims& idx) {
    if (in_boundary(idx, s.dims, k)) {
      const auto v = br.get(bps);
      if (v >= s.alphabet_size) throw FormatError("boundary symbol outside alphabet", br.byte_offset());
      data[flat] = static_cast<std::uint8_t>(v);
    }
    ++flat;
  });
  return NdArray(alphabet, s.dims, std::move(data));
}

std::vector<std::uint8_t> compress(const NdArray& x, const EncodeOptions& options) {
  return encode(x, options).serialize();
}

NdArray decompress(std::span<const std::uint8_t> bytes) {
  return decode(CompressedStream::parse(bytes));
}

std::string RateComparison::to_text() const {
  std::string s;
  s += "block_rate=" + fmt6(block_rate) + "\n";
  s += "block_mode=" + std::string(to_string(block_mode)) + "\n";
  s += "block_k=" + std::to_string(block_k) + "\n";
  s += "lz78_hilbert_rate=" + fmt6(lz78_hilbert_rate) + "\n";
  s += "raw_rate=" + fmt6(raw_rate) + "\n";
  return s;
}

RateComparison compare_rates(const NdArray& x) {
  RateComparison out;
  const auto block = encode(x);
  out.block_rate = block.rate().bits_per_site;
  out.block_mode = block.mode;
  out.block_k = block.k;
  const bool square = x.dim() == 2 && x.dims()[0] == x.dims()[1] && std::has_single_bit(x.dims()[0]);
  out.lz78_hilbert_rate = square ? encode_lz78_hilbert(x).rate().bits_per_site
                                 : std::numeric_limits<double>::quiet_NaN();
  out.raw_rate = static_cast<double>(x.alphabet().bits_per_symbol());
  return out;
}

}  // namespace mdts

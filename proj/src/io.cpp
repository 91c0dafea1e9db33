#include "mdts/io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "mdts/errors.hpp"

namespace mdts {

void ByteReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) {
    throw FormatError("unexpected end of data, need " + std::to_string(n) + " more bytes", pos_);
  }
}

std::uint8_t ByteReader::u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint16_t ByteReader::u16() {
  need(2);
  std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
  pos_ += 2;
  return v;
}

std::uint32_t ByteReader::u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += 4;
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
  pos_ += 8;
  return v;
}

std::span<const std::uint8_t> ByteReader::take(std::size_t n) {
  need(n);
  auto s = bytes_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::vector<std::uint8_t> encode_mda(const NdArray& x) {
  ByteWriter w;
  for (char c : std::string_view("MDA1")) w.u8(static_cast<std::uint8_t>(c));
  w.u8(1);
  w.u8(static_cast<std::uint8_t>(x.dim()));
  w.u16(static_cast<std::uint16_t>(x.alphabet().size()));
  for (std::size_t n : x.dims()) w.u64(n);
  w.bytes(x.data());
  return w.release();
}

NdArray decode_mda(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  auto magic = r.take(4);
  if (std::string_view(reinterpret_cast<const char*>(magic.data()), 4) != "MDA1") {
    throw FormatError("bad MDA1 magic", 0);
  }
  if (r.u8() != 1) throw FormatError("unsupported MDA1 version", 4);
  const std::size_t d = r.u8();
  if (d == 0 || d > kMaxDim) throw FormatError("MDA1 dimension must be 1..3", 5);
  const unsigned a = r.u16();
  if (a < 2 || a > 256) throw FormatError("MDA1 alphabet size must be 2..256", 6);
  Dims dims(d);
  std::size_t vol = 1;
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t at = r.offset();
    const std::uint64_t n = r.u64();
    if (n == 0 || n > (std::uint64_t{1} << 40)) throw FormatError("MDA1 bad dimension length", at);
    dims[i] = static_cast<std::size_t>(n);
    vol *= dims[i];
    if (vol > (std::uint64_t{1} << 40)) throw FormatError("MDA1 volume too large", at);
  }
  const std::size_t data_at = r.offset();
  auto data = r.take(vol);
  if (r.remaining() != 0) throw FormatError("trailing bytes after MDA1 payload", r.offset());
  for (std::size_t i = 0; i < vol; ++i) {
    if (data[i] >= a) throw FormatError("symbol outside alphabet", data_at + i);
  }
  return NdArray(Alphabet(a), std::move(dims), std::vector<std::uint8_t>(data.begin(), data.end()));
}

NdArray decode_pgm(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 0;
  auto skip_ws = [&] {
    for (;;) {
      while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
      if (pos < bytes.size() && bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        continue;
      }
      return;
    }
  };
  auto number = [&]() -> std::size_t {
    skip_ws();
    const std::size_t start = pos;
    std::size_t v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > (std::size_t{1} << 32)) throw FormatError("PGM header value too large", start);
      ++pos;
    }
    if (pos == start) throw FormatError("expected a number in PGM header", start);
    return v;
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw FormatError("not a binary PGM (P5) file", 0);
  }
  pos = 2;
  const std::size_t width = number();
  const std::size_t height = number();
  const std::size_t maxval_at = pos;
  const std::size_t maxval = number();
  if (width == 0 || height == 0) throw FormatError("PGM has zero size", maxval_at);
  if (maxval < 1 || maxval > 255) throw FormatError("PGM maxval must be in [1, 255]", maxval_at);
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw FormatError("missing whitespace after PGM header", pos);
  }
  ++pos;
  const std::size_t vol = width * height;
  if (bytes.size() - pos < vol) throw FormatError("truncated PGM raster", bytes.size());
  std::vector<std::uint8_t> data(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                                 bytes.begin() + static_cast<std::ptrdiff_t>(pos + vol));
  for (std::size_t i = 0; i < vol; ++i) {
    if (data[i] > maxval) throw FormatError("PGM sample exceeds maxval", pos + i);
  }
  return NdArray(Alphabet(static_cast<unsigned>(maxval + 1)), Dims{height, width}, std::move(data));
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

NdArray read_mda(const std::filesystem::path& path) { return decode_mda(read_file(path)); }

void write_mda(const std::filesystem::path& path, const NdArray& x) {
  write_file(path, encode_mda(x));
}

NdArray read_array(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return decode_pgm(bytes);
  return decode_mda(bytes);
}

}  // namespace mdts

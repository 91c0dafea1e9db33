#include "mdts/ndarray.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "mdts/errors.hpp"

namespace mdts {

Alphabet::Alphabet(unsigned size) : size_(size) {
  if (size < 2 || size > 256) {
    throw DomainError("alphabet size must be in [2, 256], got " + std::to_string(size));
  }
}

unsigned Alphabet::bits_per_symbol() const noexcept {
  return static_cast<unsigned>(std::bit_width(size_ - 1));
}

double Alphabet::log2_size() const noexcept { return std::log2(static_cast<double>(size_)); }

LatticeBox::LatticeBox(std::vector<std::int64_t> origin_, Dims sides_)
    : origin(std::move(origin_)), sides(std::move(sides_)) {
  if (sides.empty() || sides.size() > kMaxDim) {
    throw DomainError("box dimension must be in [1, 3]");
  }
  if (origin.size() != sides.size()) {
    throw DomainError("box origin and sides differ in dimension");
  }
  for (std::size_t s : sides) {
    if (s == 0) throw DomainError("box side lengths must be positive");
  }
}

LatticeBox LatticeBox::cube(std::size_t d, std::size_t n) {
  return LatticeBox(std::vector<std::int64_t>(d, 0), Dims(d, n));
}

LatticeBox LatticeBox::of_dims(const Dims& dims) {
  return LatticeBox(std::vector<std::int64_t>(dims.size(), 0), dims);
}

std::size_t LatticeBox::volume() const noexcept {
  return std::accumulate(sides.begin(), sides.end(), std::size_t{1}, std::multiplies<>());
}

bool LatticeBox::contains(const LatticeBox& other) const noexcept {
  if (other.dim() != dim()) return false;
  for (std::size_t i = 0; i < dim(); ++i) {
    const auto lo = origin[i];
    const auto hi = origin[i] + static_cast<std::int64_t>(sides[i]);
    const auto olo = other.origin[i];
    const auto ohi = other.origin[i] + static_cast<std::int64_t>(other.sides[i]);
    if (olo < lo || ohi > hi) return false;
  }
  return true;
}

std::string to_string(const ShiftVector& p) {
  std::string s;
  for (std::size_t i = 0; i < p.p.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(p.p[i]);
  }
  return s;
}

NdArray::NdArray(Alphabet alphabet, Dims dims, std::vector<std::uint8_t> data)
    : alphabet_(alphabet), dims_(std::move(dims)), data_(std::move(data)) {
  if (dims_.empty() || dims_.size() > kMaxDim) {
    throw DomainError("array dimension must be in [1, 3]");
  }
  std::size_t vol = 1;
  for (std::size_t n : dims_) {
    if (n == 0) throw DomainError("array side lengths must be positive");
    vol *= n;
  }
  if (vol != data_.size()) {
    throw DomainError("data length " + std::to_string(data_.size()) +
                      " does not match volume " + std::to_string(vol));
  }
  const auto bad = std::find_if(data_.begin(), data_.end(),
                                [&](std::uint8_t s) { return s >= alphabet_.size(); });
  if (bad != data_.end()) {
    throw DomainError("symbol " + std::to_string(*bad) + " outside alphabet of size " +
                      std::to_string(alphabet_.size()));
  }
}

NdArray NdArray::filled(Alphabet alphabet, Dims dims, std::uint8_t value) {
  std::size_t vol = 1;
  for (std::size_t n : dims) vol *= n;
  return NdArray(alphabet, std::move(dims), std::vector<std::uint8_t>(vol, value));
}

std::size_t NdArray::min_side() const noexcept {
  return *std::min_element(dims_.begin(), dims_.end());
}

bool NdArray::is_cube() const noexcept {
  return std::all_of(dims_.begin(), dims_.end(), [&](std::size_t n) { return n == dims_[0]; });
}

std::size_t NdArray::offset(std::span<const std::size_t> index) const noexcept {
  std::size_t off = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) off = off * dims_[i] + index[i];
  return off;
}

NdArray project(const NdArray& x, const LatticeBox& box) {
  if (box.dim() != x.dim() || !LatticeBox::of_dims(x.dims()).contains(box)) {
    throw DomainError("projection box lies outside the array domain");
  }
  std::vector<std::uint8_t> out;
  out.reserve(box.volume());
  Dims src(x.dim());
  for_each_index(box.sides, [&](const Dims& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      src[i] = static_cast<std::size_t>(box.origin[i]) + idx[i];
    }
    out.push_back(x.at(src));
  });
  return NdArray(x.alphabet(), box.sides, std::move(out));
}

namespace {

struct Interval {
  std::int64_t lo;
  std::size_t len;
  bool full;
};

// Grid intervals of one axis: [0,p), then k-chunks, the last one clipped.
std::vector<Interval> axis_intervals(std::int64_t origin, std::size_t n, std::size_t k,
                                     std::size_t p) {
  std::vector<Interval> out;
  std::size_t pos = 0;
  if (p > 0) {
    const std::size_t len = std::min(p, n);
    out.push_back({origin, len, false});
    pos = len;
  }
  while (pos < n) {
    const std::size_t len = std::min(k, n - pos);
    out.push_back({origin + static_cast<std::int64_t>(pos), len, len == k});
    pos += len;
  }
  return out;
}

}  // namespace

std::vector<PartitionCell> regular_partition(const LatticeBox& n_box, std::size_t k,
                                             const ShiftVector& p) {
  if (k == 0) throw DomainError("block side k must be positive");
  if (p.dim() != n_box.dim()) throw DomainError("shift dimension does not match box");
  for (std::size_t c : p.p) {
    if (c >= k) throw DomainError("shift components must lie in [0, k)");
  }
  const std::size_t d = n_box.dim();
  std::vector<std::vector<Interval>> axes(d);
  Dims counts(d);
  for (std::size_t i = 0; i < d; ++i) {
    axes[i] = axis_intervals(n_box.origin[i], n_box.sides[i], k, p.p[i]);
    counts[i] = axes[i].size();
  }
  std::vector<PartitionCell> cells;
  for_each_index(counts, [&](const Dims& r) {
    PartitionCell cell;
    cell.box.origin.resize(d);
    cell.box.sides.resize(d);
    cell.is_full_cube = true;
    for (std::size_t i = 0; i < d; ++i) {
      const Interval& iv = axes[i][r[i]];
      cell.box.origin[i] = iv.lo;
      cell.box.sides[i] = iv.len;
      cell.is_full_cube = cell.is_full_cube && iv.full;
    }
    cells.push_back(std::move(cell));
  });
  return cells;
}

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::string block_key_prefix(std::size_t d, std::size_t k) {
  std::string key;
  key.push_back(static_cast<char>(d));
  for (std::size_t i = 0; i < d; ++i) put_u32(key, static_cast<std::uint32_t>(k));
  return key;
}

std::string block_key(const NdArray& block) {
  std::string key;
  key.reserve(1 + 4 * block.dim() + block.volume());
  key.push_back(static_cast<char>(block.dim()));
  for (std::size_t n : block.dims()) put_u32(key, static_cast<std::uint32_t>(n));
  key.append(reinterpret_cast<const char*>(block.data().data()), block.volume());
  return key;
}

NdArray decode_block_key(std::string_view key, Alphabet alphabet) {
  if (key.empty()) throw FormatError("empty block key", 0);
  const std::size_t d = static_cast<std::uint8_t>(key[0]);
  if (d == 0 || d > kMaxDim) throw FormatError("bad block key dimension", 0);
  if (key.size() < 1 + 4 * d) throw FormatError("truncated block key header", key.size());
  Dims dims(d);
  std::size_t vol = 1;
  for (std::size_t i = 0; i < d; ++i) {
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) {
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(key[1 + 4 * i + b])) << (8 * b);
    }
    dims[i] = v;
    vol *= v;
  }
  const std::size_t head = 1 + 4 * d;
  if (key.size() != head + vol) throw FormatError("block key length mismatch", key.size());
  std::vector<std::uint8_t> data(key.begin() + static_cast<std::ptrdiff_t>(head), key.end());
  return NdArray(alphabet, std::move(dims), std::move(data));
}

std::string to_hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char c : bytes) {
    const auto u = static_cast<std::uint8_t>(c);
    out.push_back(kDigits[u >> 4]);
    out.push_back(kDigits[u & 0xF]);
  }
  return out;
}

std::string from_hex(std::string_view hex) {
  auto nibble = [&](char c, std::size_t pos) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw FormatError("invalid hex digit", pos);
  };
  if (hex.size() % 2 != 0) throw FormatError("odd-length hex string", hex.size());
  std::string out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    out.push_back(static_cast<char>((nibble(hex[i], i) << 4) | nibble(hex[i + 1], i + 1)));
  }
  return out;
}

BlockExtractor::BlockExtractor(const NdArray& x, std::size_t k) : x_(&x), k_(k) {
  if (k == 0 || k > x.min_side()) {
    throw DomainError("block side " + std::to_string(k) + " exceeds the smallest array side " +
                      std::to_string(x.min_side()));
  }
  const std::size_t d = x.dim();
  lead_ = kMaxDim - d;
  std::size_t dims3[kMaxDim];
  for (std::size_t i = 0; i < kMaxDim; ++i) {
    dims3[i] = i < lead_ ? 1 : x.dims()[i - lead_];
    side_[i] = i < lead_ ? 1 : k;
  }
  stride_[2] = 1;
  stride_[1] = dims3[2];
  stride_[0] = dims3[1] * dims3[2];
  block_volume_ = side_[0] * side_[1] * side_[2];
}

void BlockExtractor::copy(std::span<const std::size_t> origin, std::uint8_t* out) const {
  std::size_t o3[kMaxDim] = {0, 0, 0};
  for (std::size_t i = 0; i < origin.size(); ++i) o3[lead_ + i] = origin[i];
  const std::uint8_t* base = x_->data().data();
  for (std::size_t a = 0; a < side_[0]; ++a) {
    for (std::size_t b = 0; b < side_[1]; ++b) {
      const std::uint8_t* row =
          base + (o3[0] + a) * stride_[0] + (o3[1] + b) * stride_[1] + o3[2];
      std::copy(row, row + side_[2], out);
      out += side_[2];
    }
  }
}

}  // namespace mdts

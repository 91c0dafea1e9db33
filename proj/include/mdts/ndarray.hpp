#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdts {

using Dims = std::vector<std::size_t>;

inline constexpr std::size_t kMaxDim = 3;

// Finite alphabet {0, ..., size-1}, 2 <= size <= 256.
class Alphabet {
 public:
  explicit Alphabet(unsigned size);

  unsigned size() const noexcept { return size_; }
  // ceil(log2 |A|): bits needed to store one raw symbol.
  unsigned bits_per_symbol() const noexcept;
  double log2_size() const noexcept;

  bool operator==(const Alphabet&) const = default;

 private:
  unsigned size_;
};

struct LatticeBox {
  std::vector<std::int64_t> origin;
  Dims sides;

  LatticeBox() = default;
  LatticeBox(std::vector<std::int64_t> origin_, Dims sides_);

  // The box [0, n)^d.
  static LatticeBox cube(std::size_t d, std::size_t n);
  static LatticeBox of_dims(const Dims& dims);

  std::size_t dim() const noexcept { return sides.size(); }
  std::size_t volume() const noexcept;
  bool contains(const LatticeBox& other) const noexcept;

  bool operator==(const LatticeBox&) const = default;
};

// Partition shift p. For an m-partition every component must be < m.
struct ShiftVector {
  Dims p;

  ShiftVector() = default;
  explicit ShiftVector(Dims components) : p(std::move(components)) {}
  static ShiftVector zero(std::size_t d) { return ShiftVector(Dims(d, 0)); }

  std::size_t dim() const noexcept { return p.size(); }
  bool operator==(const ShiftVector&) const = default;
  bool operator<(const ShiftVector& o) const { return p < o.p; }
};

std::string to_string(const ShiftVector& p);

// d-dimensional array of symbols, row-major with the last axis fastest.
class NdArray {
 public:
  NdArray(Alphabet alphabet, Dims dims, std::vector<std::uint8_t> data);
  static NdArray filled(Alphabet alphabet, Dims dims, std::uint8_t value);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim() const noexcept { return dims_.size(); }
  std::size_t volume() const noexcept { return data_.size(); }
  std::size_t min_side() const noexcept;
  bool is_cube() const noexcept;

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  const std::vector<std::uint8_t>& symbols() const noexcept { return data_; }

  std::size_t offset(std::span<const std::size_t> index) const noexcept;
  std::uint8_t at(std::span<const std::size_t> index) const noexcept { return data_[offset(index)]; }
  std::uint8_t at(std::initializer_list<std::size_t> index) const noexcept {
    return at(std::span<const std::size_t>(index.begin(), index.size()));
  }

  bool operator==(const NdArray&) const = default;

 private:
  Alphabet alphabet_;
  Dims dims_;
  std::vector<std::uint8_t> data_;
};

// Sub-array of x restricted to box. Throws DomainError when box leaves x.
NdArray project(const NdArray& x, const LatticeBox& box);

struct PartitionCell {
  LatticeBox box;
  bool is_full_cube = false;
};

// Regular k-block partition of n_box shifted by p: the grid cells
// (Lambda_k + p + r), r in k*Z^d, clipped to n_box. The grid is anchored at the
// box origin. Cells are listed in lexicographic r order (axis 0 slowest).
std::vector<PartitionCell> regular_partition(const LatticeBox& n_box, std::size_t k,
                                             const ShiftVector& p);

// Injective byte encoding of (dims, symbols): u8 d, d x u32 LE dims, symbols.
std::string block_key(const NdArray& block);
// Header part of block_key for a k-cube in d dimensions.
std::string block_key_prefix(std::size_t d, std::size_t k);
NdArray decode_block_key(std::string_view key, Alphabet alphabet);

std::string to_hex(std::string_view bytes);
std::string from_hex(std::string_view hex);

// Visits every index vector in [0, extent) in lexicographic order.
template <class F>
void for_each_index(const Dims& extent, F&& f) {
  for (std::size_t e : extent) {
    if (e == 0) return;
  }
  Dims idx(extent.size(), 0);
  for (;;) {
    f(static_cast<const Dims&>(idx));
    std::size_t axis = extent.size();
    while (axis > 0) {
      --axis;
      if (++idx[axis] < extent[axis]) break;
      idx[axis] = 0;
      if (axis == 0) return;
    }
    if (extent.empty()) return;
  }
}

// Copies k-cubes out of an array. Works on a 3-axis view of x where missing
// leading axes have length 1.
class BlockExtractor {
 public:
  BlockExtractor(const NdArray& x, std::size_t k);

  std::size_t block_volume() const noexcept { return block_volume_; }
  std::size_t k() const noexcept { return k_; }

  // Writes block_volume() symbols of the k-cube with corner `origin` into out.
  void copy(std::span<const std::size_t> origin, std::uint8_t* out) const;

 private:
  const NdArray* x_;
  std::size_t k_;
  std::size_t block_volume_;
  std::size_t lead_;  // number of padded axes
  std::size_t stride_[kMaxDim];
  std::size_t side_[kMaxDim];
};

}  // namespace mdts

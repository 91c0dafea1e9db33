#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mdts/ndarray.hpp"

namespace mdts {

// A library C of m-cube contents, stored as block keys.
class BlockSet {
 public:
  BlockSet(std::size_t d, std::size_t m, Alphabet alphabet);

  // All |A|^(m^d) m-cubes; throws ResourceError above 2^24 members.
  static BlockSet all(std::size_t d, std::size_t m, Alphabet alphabet);

  std::size_t dim() const noexcept { return d_; }
  std::size_t m() const noexcept { return m_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }

  void insert(const NdArray& block);
  // Key must be a valid block_key of an m-cube over the alphabet.
  void insert_key(std::string key);
  bool contains(std::string_view key) const;
  bool contains(const NdArray& block) const;

  std::vector<std::string> sorted_keys() const;

  // Library file: header line "MDTS-BLOCKSET d=<d> m=<m> A=<|A|>", then one
  // lowercase hex block key per line in ascending order.
  std::string serialize() const;
  static BlockSet parse(std::string_view text);

  bool operator==(const BlockSet& o) const {
    return d_ == o.d_ && m_ == o.m_ && alphabet_ == o.alphabet_ && members_ == o.members_;
  }

 private:
  std::size_t d_;
  std::size_t m_;
  Alphabet alphabet_;
  std::string prefix_;
  std::unordered_set<std::string> members_;
};

// Enumerates all |A|^(m^d) m-cubes in lexicographic symbol order.
template <class F>
void for_each_cube(std::size_t d, std::size_t m, const Alphabet& alphabet, F&& f);

}  // namespace mdts

#include "mdts/errors.hpp"

namespace mdts {

template <class F>
void for_each_cube(std::size_t d, std::size_t m, const Alphabet& alphabet, F&& f) {
  std::size_t vol = 1;
  for (std::size_t i = 0; i < d; ++i) vol *= m;
  const double log2_count = static_cast<double>(vol) * alphabet.log2_size();
  if (log2_count > 24.0 + 1e-9) {
    throw ResourceError("enumerating " + std::to_string(alphabet.size()) + "^" +
                        std::to_string(vol) + " blocks exceeds the 2^24 guard");
  }
  std::vector<std::uint8_t> sym(vol, 0);
  const Dims dims(d, m);
  for (;;) {
    f(NdArray(alphabet, dims, sym));
    std::size_t i = vol;
    while (i > 0) {
      --i;
      if (++sym[i] < alphabet.size()) break;
      sym[i] = 0;
      if (i == 0) return;
    }
  }
}

}  // namespace mdts

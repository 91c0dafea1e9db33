#pragma once

#include <cstdint>
#include <vector>

#include "mdts/ndarray.hpp"
#include "mdts/rng.hpp"

namespace testing {

// 4x4 checkerboard over {a=0, b=1} with a at the origin.
inline mdts::NdArray checkerboard(std::size_t n = 4) {
  std::vector<std::uint8_t> v(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) v[i * n + j] = static_cast<std::uint8_t>((i + j) % 2);
  return mdts::NdArray(mdts::Alphabet(2), mdts::Dims{n, n}, v);
}

inline mdts::NdArray block2(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
  return mdts::NdArray(mdts::Alphabet(2), mdts::Dims{2, 2}, {a, b, c, d});
}

inline mdts::NdArray random_array(mdts::SplitMix64& rng, unsigned alphabet, const mdts::Dims& dims) {
  std::size_t vol = 1;
  for (auto n : dims) vol *= n;
  std::vector<std::uint8_t> v(vol);
  for (auto& s : v) s = static_cast<std::uint8_t>(rng.below(alphabet));
  return mdts::NdArray(mdts::Alphabet(alphabet), dims, std::move(v));
}

inline mdts::Dims random_dims(mdts::SplitMix64& rng, std::size_t d, std::size_t lo, std::size_t hi) {
  mdts::Dims dims(d);
  for (auto& n : dims) n = lo + rng.below(hi - lo + 1);
  return dims;
}

}  // namespace testing

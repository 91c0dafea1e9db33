#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "mdts/errors.hpp"
#include "mdts/ndarray.hpp"
#include "oracle.hpp"

using namespace mdts;

TEST_CASE("alphabet bounds and symbol width") {
  CHECK_THROWS_AS(Alphabet(1), DomainError);
  CHECK_THROWS_AS(Alphabet(257), DomainError);
  CHECK(Alphabet(2).bits_per_symbol() == 1);
  CHECK(Alphabet(3).bits_per_symbol() == 2);
  CHECK(Alphabet(4).bits_per_symbol() == 2);
  CHECK(Alphabet(5).bits_per_symbol() == 3);
  CHECK(Alphabet(256).bits_per_symbol() == 8);
}

TEST_CASE("array construction is validated") {
  CHECK_THROWS_AS(NdArray(Alphabet(2), Dims{2, 2}, {0, 1, 0}), DomainError);
  CHECK_THROWS_AS(NdArray(Alphabet(2), Dims{2, 2}, {0, 1, 0, 2}), DomainError);
  CHECK_THROWS_AS(NdArray(Alphabet(2), Dims{}, {}), DomainError);
  CHECK_THROWS_AS(NdArray(Alphabet(2), Dims{1, 1, 1, 1}, {0}), DomainError);
  CHECK_THROWS_AS(NdArray(Alphabet(2), Dims{0, 3}, {}), DomainError);
  const auto x = testing::checkerboard();
  CHECK(x.is_cube());
  CHECK(x.at({1, 2}) == 1);
  CHECK(x.at({3, 3}) == 0);
}

TEST_CASE("projection of the checkerboard") {
  const auto x = testing::checkerboard();
  const auto y = project(x, LatticeBox({1, 1}, {2, 2}));
  CHECK(y == testing::block2(0, 1, 1, 0));
  CHECK_THROWS_AS(project(x, LatticeBox({3, 0}, {2, 2})), DomainError);
  CHECK_THROWS_AS(project(x, LatticeBox({-1, 0}, {2, 2})), DomainError);
}

TEST_CASE("regular partition examples") {
  const auto box = LatticeBox::cube(2, 4);
  auto cells = regular_partition(box, 2, ShiftVector::zero(2));
  CHECK(cells.size() == 4);
  CHECK(std::all_of(cells.begin(), cells.end(), [](const PartitionCell& c) { return c.is_full_cube; }));

  cells = regular_partition(box, 2, ShiftVector(Dims{1, 1}));
  CHECK(cells.size() == 9);
  std::size_t full = 0;
  for (const auto& c : cells) {
    if (c.is_full_cube) {
      ++full;
      CHECK(c.box.origin == std::vector<std::int64_t>{1, 1});
    }
  }
  CHECK(full == 1);
  CHECK_THROWS_AS(regular_partition(box, 2, ShiftVector(Dims{2, 0})), DomainError);
}

TEST_CASE("regular partitions tile the box exactly") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 1 + rng.below(3);
    const auto sides = testing::random_dims(rng, d, 1, 9);
    std::vector<std::int64_t> origin(d);
    for (auto& o : origin) o = static_cast<std::int64_t>(rng.below(7)) - 3;
    const LatticeBox box(origin, sides);
    const std::size_t k = 1 + rng.below(5);
    Dims p(d);
    for (auto& c : p) c = rng.below(k);
    const auto cells = regular_partition(box, k, ShiftVector(p));

    std::vector<int> hits(box.volume(), 0);
    std::size_t full = 0;
    for (const auto& c : cells) {
      CHECK(box.contains(c.box));
      bool cube = true;
      for (auto s : c.box.sides) cube = cube && s == k;
      CHECK(cube == c.is_full_cube);
      full += c.is_full_cube ? 1 : 0;
      for_each_index(c.box.sides, [&](const Dims& u) {
        std::vector<std::size_t> g(d);
        for (std::size_t i = 0; i < d; ++i) g[i] = static_cast<std::size_t>(c.box.origin[i] - origin[i]) + u[i];
        ++hits[oracle::flatten(g, sides)];
      });
    }
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    std::size_t expect_full = 1;
    for (std::size_t i = 0; i < d; ++i) expect_full *= sides[i] >= p[i] ? (sides[i] - p[i]) / k : 0;
    CHECK(full == expect_full);
  }
}

TEST_CASE("block keys are injective and decodable") {
  const NdArray a(Alphabet(2), Dims{4}, {0, 1, 1, 0});
  const NdArray b(Alphabet(2), Dims{2, 2}, {0, 1, 1, 0});
  CHECK(block_key(a) != block_key(b));
  CHECK(decode_block_key(block_key(b), Alphabet(2)) == b);
  CHECK(from_hex(to_hex(block_key(a))) == block_key(a));
  CHECK(to_hex(std::string("\x01\xab", 2)) == "01ab");
  CHECK_THROWS(from_hex("0g"));
  CHECK_THROWS(decode_block_key(block_key(b).substr(0, 5), Alphabet(2)));
}

TEST_CASE("index iteration is lexicographic") {
  std::vector<Dims> seen;
  for_each_index(Dims{2, 3}, [&](const Dims& i) { seen.push_back(i); });
  REQUIRE(seen.size() == 6);
  CHECK(seen[0] == Dims{0, 0});
  CHECK(seen[1] == Dims{0, 1});
  CHECK(seen[3] == Dims{1, 0});
  CHECK(std::is_sorted(seen.begin(), seen.end()));
  int calls = 0;
  for_each_index(Dims{2, 0}, [&](const Dims&) { ++calls; });
  CHECK(calls == 0);
}

TEST_CASE("block extraction matches direct indexing") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.below(3);
    const auto x = testing::random_array(rng, 2 + static_cast<unsigned>(rng.below(5)), testing::random_dims(rng, d, 1, 7));
    const std::size_t k = 1 + rng.below(x.min_side());
    const BlockExtractor ex(x, k);
    std::vector<std::size_t> corner(d);
    for (std::size_t i = 0; i < d; ++i) corner[i] = rng.below(x.dims()[i] - k + 1);
    std::vector<std::uint8_t> got(ex.block_volume());
    ex.copy(corner, got.data());
    CHECK(got == oracle::cube_at(x, corner, k));
  }
}

#include <cmath>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "mdts/block_stats.hpp"
#include "mdts/codec.hpp"
#include "mdts/errors.hpp"
#include "mdts/sources.hpp"

using namespace mdts;

namespace {

std::vector<std::uint8_t> bits_of(const BitBuffer& b) {
  std::vector<std::uint8_t> out;
  for (std::uint64_t i = 0; i < b.bit_length; ++i) out.push_back((b.bytes[i / 8] >> (7 - i % 8)) & 1);
  return out;
}

}  // namespace

TEST_CASE("hilbert order") {
  using P = std::pair<std::size_t, std::size_t>;
  CHECK(hilbert_order(1) == std::vector<P>{{0, 0}});
  CHECK(hilbert_order(2) == std::vector<P>{{0, 0}, {0, 1}, {1, 1}, {1, 0}});
  for (std::size_t side : {4, 8, 16, 32, 64, 128, 256}) {
    const auto order = hilbert_order(side);
    REQUIRE(order.size() == side * side);
    std::set<P> seen(order.begin(), order.end());
    CHECK(seen.size() == side * side);
    bool adjacent = true;
    for (std::size_t t = 1; t < order.size(); ++t) {
      const auto dr = order[t].first > order[t - 1].first ? order[t].first - order[t - 1].first
                                                          : order[t - 1].first - order[t].first;
      const auto dc = order[t].second > order[t - 1].second ? order[t].second - order[t - 1].second
                                                            : order[t - 1].second - order[t].second;
      adjacent = adjacent && dr + dc == 1;
    }
    CHECK(adjacent);
    CHECK(order.front() == P{0, 0});
  }
  CHECK_THROWS_AS(hilbert_order(6), DomainError);
  SplitMix64 rng(3);
  const auto x = testing::random_array(rng, 5, Dims{16, 16});
  CHECK(hilbert_unscan(hilbert_scan(x), x.alphabet(), 16) == x);
}

TEST_CASE("lz78 golden stream") {
  const std::vector<std::uint8_t> zeros(16, 0);
  const auto bits = lz78_encode(zeros, Alphabet(2));
  // Phrases 0, 00, 000, 0000, 000000 then the partial phrase "0" as index 1.
  CHECK(bits.bit_length == 17);
  CHECK(bits.bytes == std::vector<std::uint8_t>{0xA9, 0xA0, 0x80});
  CHECK(bits_of(bits) == std::vector<std::uint8_t>{1, 0, 1, 0, 1, 0, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 1});
  CHECK(lz78_decode(bits, Alphabet(2)) == zeros);

  const auto empty = lz78_encode({}, Alphabet(2));
  CHECK(empty.bit_length == 0);
  CHECK(lz78_decode(empty, Alphabet(2)).empty());
}

TEST_CASE("lz78 roundtrip and malformed streams") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const unsigned a = 2 + static_cast<unsigned>(rng.below(trial % 3 == 0 ? 255 : 4));
    std::vector<std::uint8_t> seq(rng.below(300));
    const double p = rng.uniform();
    for (auto& s : seq) s = rng.uniform() < p ? 0 : static_cast<std::uint8_t>(rng.below(a));
    CHECK(lz78_decode(lz78_encode(seq, Alphabet(a)), Alphabet(a)) == seq);
  }
  auto bits = lz78_encode(std::vector<std::uint8_t>(16, 0), Alphabet(2));
  auto cut = bits;
  cut.bit_length = 12;
  CHECK_THROWS_AS(lz78_decode(cut, Alphabet(2)), FormatError);
  // Phrases "0", "00", then index 3 with only two dictionary entries.
  CHECK_THROWS_AS(lz78_decode(BitBuffer{{0x2C}, 7}, Alphabet(2)), FormatError);
  // Symbol 3 in a ternary alphabet.
  CHECK_THROWS_AS(lz78_decode(BitBuffer{{0x60}, 3}, Alphabet(3)), FormatError);
}

TEST_CASE("block codec edge cases") {
  const auto x = testing::checkerboard();
  // One 4x4 entry costs more than sixteen raw bits.
  const auto automatic = encode(x, {.k = 4});
  CHECK(automatic.mode == CodecMode::Raw);
  const auto forced = encode_block(x, 4);
  CHECK(forced.mode == CodecMode::Block);
  CHECK(forced.dictionary.size() == 1);
  CHECK(forced.payload.bit_length == 0);
  CHECK(decode(forced) == x);
  CHECK(decode(CompressedStream::parse(forced.serialize())) == x);

  const auto ragged = generate(SourceModel::bernoulli(0.2), Dims{13, 7}, 4);
  const auto s = encode_block(ragged, 3);
  CHECK(s.boundary.size() == (13 * 7 - 12 * 6 + 7) / 8);
  CHECK(decode(CompressedStream::parse(s.serialize())) == ragged);

  const auto tiny = NdArray(Alphabet(2), Dims{1, 1}, {1});
  CHECK(decompress(compress(tiny)) == tiny);
  CHECK_THROWS_AS(encode_block(x, 5), DomainError);
  CHECK_THROWS_AS(encode_block(x, 0), DomainError);
  CHECK_THROWS_AS(encode_lz78_hilbert(NdArray::filled(Alphabet(2), Dims{6, 6}, 0)), DomainError);
}

TEST_CASE("payload stays within the empirical entropy") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 1 + rng.below(3);
    const auto dims = testing::random_dims(rng, d, 2, d == 1 ? 400 : (d == 2 ? 40 : 12));
    const auto x = generate(SourceModel::bernoulli(0.05 + 0.4 * rng.uniform()), dims, rng.next());
    std::size_t min_side = dims[0];
    for (auto n : dims) min_side = std::min(min_side, n);
    const std::size_t k = 1 + rng.below(std::min<std::size_t>(min_side, 3));
    const auto s = encode_block(x, k);
    const auto emp = empirical_nonoverlapping(x, k);
    const double bound = static_cast<double>(emp.total_blocks) * shannon_entropy(emp) + 32.0;
    CHECK(static_cast<double>(s.payload.bit_length) <= bound);
    CHECK(decode(s) == x);
    CHECK(encode(x).rate().total_bits <= encode_raw(x).rate().total_bits);
  }
}

TEST_CASE("rate report components") {
  const auto x = generate(SourceModel::bernoulli(0.5), Dims{64, 64}, 9);
  const auto bytes = compress(x);
  CHECK(decompress(bytes) == x);
  for (const auto& s : {encode(x), encode_block(x, 2), encode_raw(x), encode_lz78_hilbert(x)}) {
    const auto r = s.rate();
    CHECK(r.header_bits + r.dictionary_bits + r.payload_bits + r.boundary_bits == r.total_bits);
    CHECK(r.total_bits == 8 * s.serialize().size());
    CHECK(r.header_bits == 8 * (29 + 8 * x.dim()));
    CHECK(r.bits_per_site == doctest::Approx(static_cast<double>(r.total_bits) / 4096.0));
    CHECK(decode(CompressedStream::parse(s.serialize())) == x);
  }
  CHECK(encode_raw(x).rate().to_text().find("total_bits=") == 0);
  CHECK(compress(x) == compress(x));
}

TEST_CASE("corrupted containers are rejected") {
  const auto x = generate(SourceModel::bernoulli(0.1), Dims{32, 32}, 2);
  const auto good = encode_block(x, 2).serialize();
  REQUIRE(CompressedStream::parse(good).mode == CodecMode::Block);

  auto bad = good;
  bad[0] = 'X';
  CHECK_THROWS_AS(decompress(bad), FormatError);
  bad = good;
  bad[4] = 2;
  CHECK_THROWS_AS(decompress(bad), FormatError);
  bad = good;
  bad[5] = 7;
  CHECK_THROWS_AS(decompress(bad), FormatError);
  bad = good;
  bad[6] = 4;
  CHECK_THROWS_AS(decompress(bad), FormatError);
  bad = good;
  bad.push_back(0);
  CHECK_THROWS_AS(decompress(bad), FormatError);
  bad = good;
  bad.pop_back();
  CHECK_THROWS_AS(decompress(bad), FormatError);
  CHECK_THROWS_AS(decompress(std::vector<std::uint8_t>(good.begin(), good.begin() + 10)), FormatError);
  CHECK_THROWS_AS(decompress(std::vector<std::uint8_t>{}), FormatError);

  // Random byte flips must either decode to something or fail with FormatError.
  SplitMix64 rng(5);
  int rejected = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    bad = good;
    const auto flips = 1 + rng.below(3);
    for (std::uint64_t f = 0; f < flips; ++f) bad[rng.below(bad.size())] ^= static_cast<std::uint8_t>(1 + rng.below(255));
    try {
      const auto y = decompress(bad);
      CHECK(y.dims() == x.dims());
    } catch (const FormatError&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("rate comparison") {
  const auto u = generate(SourceModel::uniform(2), Dims{128, 128}, 1);
  const auto c = compare_rates(u);
  CHECK(c.raw_rate == 1.0);
  CHECK(c.block_mode == CodecMode::Raw);
  CHECK(c.block_rate > 1.0);
  CHECK(c.block_rate < 1.03);

  const auto zero = NdArray::filled(Alphabet(2), Dims{128, 128}, 0);
  const auto z = compare_rates(zero);
  CHECK(z.block_mode == CodecMode::Block);
  CHECK(z.block_rate < 0.03);
  CHECK(z.lz78_hilbert_rate < 0.12);
  CHECK(z.lz78_hilbert_rate > z.block_rate);
  CHECK(std::isnan(compare_rates(NdArray::filled(Alphabet(2), Dims{12, 5}, 0)).lz78_hilbert_rate));
}

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "mdts/block_stats.hpp"
#include "mdts/codec.hpp"
#include "mdts/packing.hpp"
#include "mdts/rng.hpp"
#include "mdts/sources.hpp"
#include "mdts/typical_sets.hpp"
#include "oracle.hpp"

using namespace mdts;

namespace {

// Tolerances and thresholds.
constexpr double kIidTol = 0.01;
constexpr double kCorrelatedTol = 0.01;
constexpr double kIidSeconds = 2.0;
constexpr double kMemberFreqMin = 0.95;
constexpr double kNonMemberFreqMax = 0.05;
constexpr std::size_t kPackingInstances = 1000;
constexpr std::size_t kOracleArrays = 1000;
constexpr std::size_t kRoundtrips = 10000;
constexpr double kBernoulliRateMax = 0.52;
constexpr double kUniformRateLo = 0.99;
constexpr double kUniformRateHi = 1.06;
constexpr double kConstantRateMax = 0.01;
constexpr double kPayloadSlackBits = 32.0;
constexpr double kCoverageMax = 0.1;
constexpr double kCoverageFreqMin = 0.95;
constexpr double kBoundGapMax = 0.05;

const SourceModel kMarkovRows = SourceModel::markov_rows({{0.9, 0.1}, {0.1, 0.9}}, {}, 1);
const SourceModel kMarkovCols = SourceModel::markov_rows({{0.9, 0.1}, {0.1, 0.9}}, {}, 0);

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

double estimate_at(const NdArray& x, std::size_t k) {
  EstimateOptions opt;
  opt.k = k;
  return estimate_entropy_rate(x, opt).bits_per_site;
}

void criterion1() {
  struct Case {
    const char* name;
    SourceModel model;
    std::size_t k;
    double target;
  };
  const Case cases[] = {{"uniform", SourceModel::uniform(2), 3, 1.0},
                        {"bernoulli0.1", SourceModel::bernoulli(0.1), 4, 0.46900}};
  bool pass = true;
  std::string detail;
  std::uint64_t seed = 101;
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto x = generate(c.model, Dims{512, 512}, seed++);
    const double est = estimate_at(x, c.k);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pass = pass && std::fabs(est - c.target) <= kIidTol && secs < kIidSeconds;
    detail += std::string(c.name) + " k=" + std::to_string(c.k) + " est=" + fmt("%.5f", est) +
              " target=" + fmt("%.5f", c.target) + " time=" + fmt("%.3fs", secs) + "; ";
  }
  report(1, pass, detail);
}

void criterion2() {
  const double h = oracle::binary_entropy(0.1);
  const double target2d = oracle::markov_lines_block_rate(0.1, 4);
  const auto x2 = generate(kMarkovRows, Dims{512, 512}, 202);
  const double est2d = estimate_at(x2, 4);
  const bool ok2d = std::fabs(est2d - target2d) <= kCorrelatedTol;

  const auto x1 = generate(kMarkovCols, Dims{std::size_t{1} << 20}, 203);
  const std::size_t ks[] = {2, 4, 8, 16, 24};
  std::vector<double> sweep;
  for (std::size_t k : ks) sweep.push_back(estimate_at(x1, k));
  const double target1d = oracle::markov_lines_block_rate(0.1, 24);
  const bool ok1d = std::fabs(sweep.back() - target1d) <= kCorrelatedTol;
  bool decreasing = true;
  for (std::size_t i = 1; i < sweep.size(); ++i) decreasing = decreasing && sweep[i] < sweep[i - 1];
  const bool above_rate = sweep.back() > h;

  std::string detail = "2d k=4 est=" + fmt("%.5f", est2d) + " target=" + fmt("%.5f", target2d) +
                       "; 1d k=24 est=" + fmt("%.5f", sweep.back()) + " target=" +
                       fmt("%.5f", target1d) + "; sweep";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    detail += " k" + std::to_string(ks[i]) + "=" + fmt("%.5f", sweep[i]);
  }
  detail += decreasing ? " (strictly decreasing)" : " (not strictly decreasing)";
  detail += above_rate ? "" : " (falls below h)";
  report(2, ok2d && ok1d && decreasing && above_rate, detail);
}

void criterion3() {
  int bern_members = 0, unif_members = 0;
  const int samples = 100;
  UniversalSchedule sched;
  sched.k = 3;
  for (int i = 0; i < samples; ++i) {
    const auto b = generate(SourceModel::bernoulli(0.1), Dims{256, 256}, derive_seed(3, 0, i));
    const auto u = generate(SourceModel::bernoulli(0.5), Dims{256, 256}, derive_seed(3, 1, i));
    bern_members += universal_typical_membership(b, 0.6, sched).member ? 1 : 0;
    unif_members += universal_typical_membership(u, 0.6, sched).member ? 1 : 0;
  }
  const double fb = bern_members / static_cast<double>(samples);
  const double fu = unif_members / static_cast<double>(samples);
  report(3, fb >= kMemberFreqMin && fu <= kNonMemberFreqMax,
         "bernoulli0.1 member_freq=" + fmt("%.2f", fb) + " bernoulli0.5 member_freq=" + fmt("%.2f", fu));
}

// Most frequent overlapping m-blocks until their mass reaches 1 - delta.
BlockSet frequent_library(const NdArray& x, std::size_t m, double delta) {
  const auto ov = empirical_overlapping(x, m);
  std::vector<std::pair<std::uint64_t, std::string>> byfreq;
  for (const auto& [key, c] : ov.counts) byfreq.emplace_back(c, key);
  std::sort(byfreq.begin(), byfreq.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  BlockSet lib(x.dim(), m, x.alphabet());
  std::uint64_t covered = 0;
  for (const auto& [c, key] : byfreq) {
    if (static_cast<double>(covered) >= (1.0 - delta) * static_cast<double>(ov.total_blocks)) break;
    lib.insert_key(key);
    covered += c;
  }
  return lib;
}

void criterion4() {
  SplitMix64 rng(404);
  const double deltas[] = {0.1, 0.25, 0.5};
  bool pass = true;
  std::string detail;
  for (std::size_t d : {1, 2}) {
    std::size_t applicable = 0, attempts = 0, a_ok = 0, b_ok = 0, identity_ok = 0;
    while (applicable < kPackingInstances && attempts < 20 * kPackingInstances) {
      ++attempts;
      const double delta = deltas[rng.below(3)];
      const std::size_t m = 1 + rng.below(d == 1 ? 4 : 2);
      const auto k_min = static_cast<std::size_t>(std::ceil(static_cast<double>(d * m) / delta));
      const std::size_t k = k_min + rng.below(d == 1 ? 64 : 12);
      const SourceModel model = rng.below(2) == 0
                                    ? SourceModel::bernoulli(0.02 + 0.4 * rng.uniform())
                                    : kMarkovCols;
      const auto x = generate(model, Dims(d, k), rng.next());
      // Libraries alternate between frequency-greedy and all blocks seen once or more.
      const auto c = frequent_library(x, m, rng.below(4) == 0 ? 0.0 : delta);
      const auto chk = verify_packing_bounds(x, c, m, delta);
      if (chk.report.lambda_sum == chk.report.overlap_matches) ++identity_ok;
      if (!chk.applicable) continue;
      ++applicable;
      a_ok += chk.bound_a_holds ? 1 : 0;
      b_ok += chk.bound_b_holds ? 1 : 0;
    }
    const bool ok = applicable == kPackingInstances && a_ok == applicable && b_ok == applicable &&
                    identity_ok == attempts;
    pass = pass && ok;
    detail += "d=" + std::to_string(d) + " applicable=" + std::to_string(applicable) +
              " bound_a=" + std::to_string(a_ok) + " bound_b=" + std::to_string(b_ok) +
              " identity=" + std::to_string(identity_ok) + "/" + std::to_string(attempts) + "; ";
  }
  report(4, pass, detail);
}

bool same_counts(const EmpiricalDistribution& got, const oracle::Counts& expect) {
  if (got.total_blocks != oracle::total(expect) || got.counts.size() != expect.size()) return false;
  for (const auto& [blk, cnt] : expect) {
    if (got.count(block_key(NdArray(got.alphabet, Dims(got.d, got.k), blk))) != cnt) return false;
  }
  return true;
}

void criterion5() {
  SplitMix64 rng(505);
  std::size_t agree = 0, comparisons = 0;
  for (std::size_t t = 0; t < kOracleArrays; ++t) {
    std::vector<std::uint8_t> v(16);
    for (auto& s : v) s = static_cast<std::uint8_t>(rng.below(2));
    const NdArray x(Alphabet(2), Dims{4, 4}, v);
    bool ok = true;
    for (std::size_t k = 1; k <= 4; ++k) {
      ok = ok && same_counts(empirical_nonoverlapping(x, k), oracle::position_scan(x, k, {0, 0}, k));
      ok = ok && same_counts(empirical_overlapping(x, k), oracle::position_scan(x, k, {0, 0}, 1));
      for_each_index(Dims(2, k), [&](const Dims& p) {
        ok = ok && same_counts(empirical_shifted(x, ShiftVector(p), k), oracle::position_scan(x, k, p, k));
      });
    }
    ++comparisons;
    agree += ok ? 1 : 0;
  }
  report(5, agree == comparisons,
         "arrays=" + std::to_string(comparisons) + " exact_agreement=" + std::to_string(agree));
}

bool payload_within_bound(const NdArray& x, const CompressedStream& s) {
  if (s.mode != CodecMode::Block) return true;
  const auto emp = empirical_nonoverlapping(x, s.k);
  const double bound = static_cast<double>(emp.total_blocks) * shannon_entropy(emp) + kPayloadSlackBits;
  return static_cast<double>(s.payload.bit_length) <= bound;
}

void criterion6() {
  SplitMix64 rng(606);
  std::size_t roundtrip_ok = 0, bound_ok = 0, encodes = 0;
  for (std::size_t t = 0; t < kRoundtrips; ++t) {
    const std::size_t d = 1 + rng.below(3);
    const std::size_t hi = d == 1 ? 200 : (d == 2 ? 24 : 8);
    Dims dims(d);
    for (auto& n : dims) n = 1 + rng.below(hi);
    const unsigned a = rng.below(8) == 0 ? 2 + static_cast<unsigned>(rng.below(255))
                                         : 2 + static_cast<unsigned>(rng.below(3));
    std::vector<double> p(a);
    double sum = 0;
    for (auto& q : p) sum += q = std::pow(rng.uniform(), 3.0) + 1e-3;
    for (auto& q : p) q /= sum;
    const auto x = generate(SourceModel::iid(p), dims, rng.next());
    EncodeOptions opt;
    std::size_t min_side = *std::min_element(dims.begin(), dims.end());
    if (rng.below(2) == 0) opt.k = 1 + rng.below(min_side);
    const auto s = encode(x, opt);
    ++encodes;
    bound_ok += payload_within_bound(x, s) ? 1 : 0;
    roundtrip_ok += decompress(s.serialize()) == x ? 1 : 0;
  }

  const auto bern = generate(SourceModel::bernoulli(0.1), Dims{512, 512}, 611);
  const auto unif = generate(SourceModel::uniform(2), Dims{512, 512}, 612);
  const auto cons = NdArray::filled(Alphabet(2), Dims{256, 256}, 0);
  double rates[3];
  const NdArray* fields[3] = {&bern, &unif, &cons};
  for (int i = 0; i < 3; ++i) {
    const auto s = encode(*fields[i]);
    ++encodes;
    bound_ok += payload_within_bound(*fields[i], s) ? 1 : 0;
    roundtrip_ok += decode(CompressedStream::parse(s.serialize())) == *fields[i] ? 1 : 0;
    rates[i] = s.rate().bits_per_site;
  }
  const bool pass = roundtrip_ok == encodes && bound_ok == encodes && rates[0] <= kBernoulliRateMax &&
                    rates[1] >= kUniformRateLo && rates[1] <= kUniformRateHi && rates[2] <= kConstantRateMax;
  report(6, pass,
         "roundtrips=" + std::to_string(roundtrip_ok) + "/" + std::to_string(encodes) +
             " payload_bound=" + std::to_string(bound_ok) + "/" + std::to_string(encodes) +
             " bernoulli0.1=" + fmt("%.5f", rates[0]) + " uniform=" + fmt("%.5f", rates[1]) +
             " constant=" + fmt("%.5f", rates[2]));
}

void criterion7() {
  const auto x = generate(kMarkovCols, Dims{512, 512}, 3);
  const auto c = compare_rates(x);
  report(7, c.block_rate <= c.lz78_hilbert_rate,
         "block=" + fmt("%.6f", c.block_rate) + " (" + to_string(c.block_mode) + " k=" +
             std::to_string(c.block_k) + ") lz78_hilbert=" + fmt("%.6f", c.lz78_hilbert_rate) +
             " raw=" + fmt("%.1f", c.raw_rate));
}

void criterion8() {
  const std::size_t k = 3, d = 2;
  const double log2_size = std::pow(static_cast<double>(k), static_cast<double>(d)) * (1.0 - 0.2);
  const auto size = static_cast<std::uint64_t>(std::floor(std::exp2(log2_size)));
  int low = 0;
  double worst = 0, mean = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto x = generate(SourceModel::bernoulli(0.5), Dims{256, 256}, derive_seed(8, 0, t));
    const auto lib = random_library(d, k, Alphabet(2), size, derive_seed(8, 1, t));
    const double cov = library_coverage(x, k, lib);
    low += cov <= kCoverageMax ? 1 : 0;
    worst = std::max(worst, cov);
    mean += cov / trials;
  }
  const double freq = low / static_cast<double>(trials);
  report(8, freq >= kCoverageFreqMin,
         "library_size=" + std::to_string(size) + " of " + std::to_string(1u << 9) +
             " freq(coverage<=0.1)=" + fmt("%.2f", freq) + " mean_coverage=" + fmt("%.4f", mean) +
             " max_coverage=" + fmt("%.4f", worst));
}

void criterion9() {
  const double h0 = 0.5;
  bool decreasing = true;
  double prev = INFINITY, last = 0;
  std::string detail;
  for (int e = 8; e <= 16; ++e) {
    const std::size_t n = std::size_t{1} << e;
    const std::size_t k = k_schedule(n, 1, 2, 0.1);
    const double gap = typical_set_log_cardinality_bound(n, k, h0, 2, 1) / static_cast<double>(n) - h0;
    decreasing = decreasing && gap < prev;
    prev = last = gap;
    detail += " n=2^" + std::to_string(e) + ":k=" + std::to_string(k) + ",gap=" + fmt("%.4g", gap);
  }
  report(9, decreasing && last < kBoundGapMax, "h0=0.5" + detail);
}

}  // namespace

int main() {
  const std::function<void()> criteria[] = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                            criterion6, criterion7, criterion8, criterion9};
  for (const auto& c : criteria) c();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

#include "mdts/typical_sets.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "mdts/block_stats.hpp"
#include "mdts/errors.hpp"
#include "mdts/rng.hpp"

namespace mdts {

bool TypicalityParams::satisfies_standing_assumption(const Alphabet& alphabet) const noexcept {
  return delta < alpha / (alphabet.log2_size() + 1.0);
}

MembershipResult entropy_typical_membership(const NdArray& block, const SourceModel& model,
                                            double delta) {
  if (!block.is_cube()) throw DomainError("entropy-typical membership needs an m-cube");
  const auto h = model.exact_entropy_rate();
  if (!model.has_block_marginals() || !h) {
    throw UnsupportedModelError("model has no closed-form block marginals: " + model.describe());
  }
  const double lp = log2_block_probability(model, block);
  MembershipResult r;
  r.statistic = std::isinf(lp) ? std::numeric_limits<double>::infinity()
                               : -lp / static_cast<double>(block.volume());
  r.member = std::fabs(r.statistic - *h) <= delta;
  return r;
}

MembershipResult typical_sampling_membership(const NdArray& x, const BlockSet& cm, double delta) {
  const std::size_t m = cm.m();
  if (m > x.min_side()) throw DomainError("library block side exceeds the sample");
  double capacity = 1.0;
  for (std::size_t n : x.dims()) capacity *= static_cast<double>(n) / static_cast<double>(m);
  const double threshold = (1.0 - delta) * capacity;
  MembershipResult r;
  std::uint64_t best = 0;
  for_each_index(Dims(x.dim(), m), [&](const Dims& p) {
    const std::uint64_t hits = z_count(x, ShiftVector(p), m, cm);
    best = std::max(best, hits);
    if (!r.member && static_cast<double>(hits) >= threshold) {
      r.member = true;
      r.witness_shift = ShiftVector(p);
    }
  });
  r.statistic = static_cast<double>(best) / capacity;
  return r;
}

MembershipResult universal_typical_membership(const NdArray& x, double h0,
                                              const UniversalSchedule& schedule) {
  if (!(h0 >= 0.0)) throw DomainError("h0 must be non-negative");
  std::size_t k;
  if (schedule.k) {
    k = *schedule.k;
  } else {
    k = std::min(k_schedule_for_volume(x.volume(), x.dim(), x.alphabet().size(), schedule.epsilon),
                 x.min_side());
  }
  const auto dist = empirical_nonoverlapping(x, k);
  const double h = shannon_entropy(dist);
  const double kd = std::pow(static_cast<double>(k), static_cast<double>(x.dim()));
  MembershipResult r;
  r.k_used = k;
  r.statistic = h / kd;
  r.member = h <= kd * h0;
  return r;
}

double typical_set_log_cardinality_bound(std::size_t n, std::size_t k, double h0,
                                         unsigned alphabet_size, std::size_t d) {
  if (k == 0 || k > n) throw DomainError("cardinality bound needs 1 <= k <= n");
  const double dd = static_cast<double>(d);
  const double nd = std::pow(static_cast<double>(n), dd);
  const double boundary = nd - std::pow(static_cast<double>(n - k), dd);
  const double log2_a = std::log2(static_cast<double>(alphabet_size));
  const double distributions = std::exp2(std::pow(static_cast<double>(k), dd) * log2_a) * dd *
                               std::log2(static_cast<double>(n) / static_cast<double>(k));
  return nd * h0 + boundary * log2_a + distributions;
}

std::uint64_t library_hits(const NdArray& x, std::size_t k, const BlockSet& library,
                           std::uint64_t* total_blocks) {
  if (library.m() != k) throw DomainError("library block side must equal k");
  if (library.dim() != x.dim()) throw DomainError("library dimension does not match sample");
  const auto dist = empirical_nonoverlapping(x, k);
  if (total_blocks) *total_blocks = dist.total_blocks;
  return dist.count_in(library);
}

double library_coverage(const NdArray& x, std::size_t k, const BlockSet& library) {
  std::uint64_t total = 0;
  const std::uint64_t hits = library_hits(x, k, library, &total);
  return static_cast<double>(hits) / static_cast<double>(total);
}

BlockSet build_entropy_typical_set(const SourceModel& model, std::size_t d, std::size_t m,
                                   double delta) {
  if (!model.has_block_marginals()) {
    throw UnsupportedModelError("model has no closed-form block marginals: " + model.describe());
  }
  BlockSet out(d, m, model.alphabet());
  for_each_cube(d, m, model.alphabet(), [&](const NdArray& block) {
    if (entropy_typical_membership(block, model, delta).member) out.insert(block);
  });
  return out;
}

BlockSet random_library(std::size_t d, std::size_t m, const Alphabet& alphabet, std::uint64_t size,
                        std::uint64_t seed) {
  std::size_t vol = 1;
  for (std::size_t i = 0; i < d; ++i) vol *= m;
  const double log2_universe = static_cast<double>(vol) * alphabet.log2_size();
  if (log2_universe > 62.0) throw ResourceError("block universe too large for random sampling");
  if (size > (std::uint64_t{1} << 24)) throw ResourceError("random library larger than 2^24");
  std::uint64_t universe = 1;
  for (std::size_t i = 0; i < vol; ++i) universe *= alphabet.size();
  if (size > universe) throw DomainError("library size exceeds the number of m-cubes");

  // Floyd's sampling of `size` distinct indices from [0, universe).
  SplitMix64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  for (std::uint64_t j = universe - size; j < universe; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  BlockSet out(d, m, alphabet);
  std::vector<std::uint8_t> sym(vol);
  for (std::uint64_t idx : chosen) {
    std::uint64_t v = idx;
    for (std::size_t i = vol; i-- > 0;) {
      sym[i] = static_cast<std::uint8_t>(v % alphabet.size());
      v /= alphabet.size();
    }
    out.insert(NdArray(alphabet, Dims(d, m), sym));
  }
  return out;
}

}  // namespace mdts

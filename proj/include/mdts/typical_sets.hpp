#pragma once

#include <cstdint>
#include <optional>

#include "mdts/block_set.hpp"
#include "mdts/ndarray.hpp"
#include "mdts/sources.hpp"

namespace mdts {

struct TypicalityParams {
  double delta = 0.1;
  double alpha = 0.2;
  double h0 = 0.5;

  // delta < alpha / (log2|A| + 1), the standing assumption for typical-sampling sets.
  bool satisfies_standing_assumption(const Alphabet& alphabet) const noexcept;
};

struct MembershipResult {
  bool member = false;
  std::optional<ShiftVector> witness_shift;  // only for typical-sampling membership
  double statistic = 0.0;
  std::size_t k_used = 0;                    // only for universal membership
};

// Entropy-typical set C_m(delta): statistic = -log2 mu^m({a}) / m^d, member iff
// |statistic - h(mu)| <= delta. Impossible blocks have statistic +inf.
MembershipResult entropy_typical_membership(const NdArray& block, const SourceModel& model,
                                            double delta);

// Typical-sampling set T_k(delta, m): some shift p in Lambda_m has at least
// (1 - delta) prod(n_i / m) full m-cubes with contents in cm. The witness is the
// lexicographically smallest such p; statistic = best count / prod(n_i / m).
MembershipResult typical_sampling_membership(const NdArray& x, const BlockSet& cm, double delta);

struct UniversalSchedule {
  std::optional<std::size_t> k;  // explicit k, otherwise k_schedule(epsilon)
  double epsilon = 0.1;
};

// Universally typical set: member iff H(empirical_nonoverlapping(x, k)) <= k^d h0.
MembershipResult universal_typical_membership(const NdArray& x, double h0,
                                              const UniversalSchedule& schedule = {});

// Upper bound in bits on log2 of the universally typical set size:
//   n^d h0 + (n^d - (n-k)^d) log2|A| + |A|^(k^d) d log2(n/k)
double typical_set_log_cardinality_bound(std::size_t n, std::size_t k, double h0,
                                         unsigned alphabet_size, std::size_t d);

// Non-overlapping empirical k-block mass of the library (library.m must equal k).
double library_coverage(const NdArray& x, std::size_t k, const BlockSet& library);
// Integer numerator of library_coverage, with the total in `total_blocks`.
std::uint64_t library_hits(const NdArray& x, std::size_t k, const BlockSet& library,
                           std::uint64_t* total_blocks = nullptr);

// All m-cubes passing entropy_typical_membership; |A|^(m^d) must be <= 2^24.
BlockSet build_entropy_typical_set(const SourceModel& model, std::size_t d, std::size_t m,
                                   double delta);

// Uniformly random library of `size` distinct m-cubes (size <= |A|^(m^d) <= 2^62).
BlockSet random_library(std::size_t d, std::size_t m, const Alphabet& alphabet, std::uint64_t size,
                        std::uint64_t seed);

}  // namespace mdts

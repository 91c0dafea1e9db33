#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "mdts/block_set.hpp"
#include "mdts/ndarray.hpp"

namespace mdts {

enum class BlockCounting { NonOverlapping, Shifted, Overlapping };

const char* to_string(BlockCounting kind);

// Exact integer counts of k-cube contents. Probabilities are count/total_blocks.
struct EmpiricalDistribution {
  std::size_t k = 0;
  std::size_t d = 0;
  Alphabet alphabet{2};
  BlockCounting kind = BlockCounting::NonOverlapping;
  ShiftVector shift;
  std::map<std::string, std::uint64_t> counts;  // block_key -> count
  std::uint64_t total_blocks = 0;

  std::size_t distinct() const noexcept { return counts.size(); }
  std::uint64_t count(const std::string& key) const;
  double probability(const std::string& key) const;
  // Number of counted blocks whose contents lie in `set`.
  std::uint64_t count_in(const BlockSet& set) const;

  // "key,count" header followed by one "hex,count" row per block, ascending by key.
  std::string to_csv() const;
};

// Full m-cubes of the p-shifted regular partition of x whose contents lie in C.
std::uint64_t z_count(const NdArray& x, const ShiftVector& p, std::size_t m, const BlockSet& c);

// Counts over the p = 0 partition's full cubes; total = prod floor(n_i / k).
EmpiricalDistribution empirical_nonoverlapping(const NdArray& x, std::size_t k);
// Counts over the p-shifted partition's full cubes; total = prod floor((n_i - p_i) / k).
EmpiricalDistribution empirical_shifted(const NdArray& x, const ShiftVector& p, std::size_t k);
// Counts over all prod (n_i - k + 1) positions.
EmpiricalDistribution empirical_overlapping(const NdArray& x, std::size_t k);

// -sum p log2 p in bits, with Neumaier-compensated summation over the counts
// in ascending order (so the result depends only on the count multiset).
double shannon_entropy(const EmpiricalDistribution& dist);

// Largest k >= 1 with k^d <= log2(volume) / ((1 + epsilon) log2 |A|).
std::size_t k_schedule(std::size_t n, std::size_t d, unsigned alphabet_size, double epsilon);
std::size_t k_schedule_for_volume(std::size_t volume, std::size_t d, unsigned alphabet_size,
                                  double epsilon);

// Largest k >= 1 with |A|^(k^d) <= total_blocks(k) / 16 (1 if none qualifies).
std::size_t well_sampled_k(const Dims& dims, unsigned alphabet_size);

struct EstimateOptions {
  std::optional<std::size_t> k;  // explicit block side; otherwise k_schedule(epsilon)
  double epsilon = 0.1;
  bool well_sampled_guard = false;
};

struct EntropyEstimate {
  double bits_per_site = 0.0;
  std::size_t k_used = 0;
  std::uint64_t total_blocks = 0;
  std::size_t distinct_blocks = 0;
  double block_entropy_bits = 0.0;
  // Which constraint fixed k: "explicit", "schedule", "guard" or "array".
  std::string k_bound_by;
  std::size_t requested_k = 0;
  std::size_t guard_k = 0;
};

EntropyEstimate estimate_entropy_rate(const NdArray& x, const EstimateOptions& options = {});

}  // namespace mdts

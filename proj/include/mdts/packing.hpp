#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdts/block_set.hpp"
#include "mdts/ndarray.hpp"

namespace mdts {

// Outcome of the shift search on a cubic sample x of side k with library C of m-cubes.
struct PackingReport {
  ShiftVector best_shift;
  std::uint64_t lambda = 0;            // matching full cubes under best_shift
  std::uint64_t shifted_blocks = 0;    // full cubes under best_shift
  double shifted_fraction = 0.0;       // lambda / shifted_blocks
  std::uint64_t overlap_matches = 0;   // positions r in Lambda_{k-m+1} with block in C
  std::uint64_t overlap_positions = 0;
  double overlap_fraction = 0.0;
  std::uint64_t lambda_sum = 0;        // sum over all shifts of lambda(p)
  double delta_used = 0.0;
  bool bound_a_holds = false;          // shifted_fraction >= 1 - 2 delta
  bool bound_b_holds = false;          // lambda >= (1 - 4 delta)(floor(k/m) + 2)^d

  // Flat key=value lines.
  std::string to_text() const;
};

struct PackingCheck {
  bool applicable = false;  // k >= d m / delta and overlap fraction >= 1 - delta
  bool bound_a_holds = false;
  bool bound_b_holds = false;
  PackingReport report;
};

// lambda(p) for every p in Lambda_m, in lexicographic order of p.
std::vector<std::uint64_t> packing_lambdas(const NdArray& x, const BlockSet& c, std::size_t m);

// Argmax of lambda(p), ties broken toward the lexicographically smallest p.
// delta_used = max(1 - overlap_fraction, d m / k). Requires a cubic x and m <= k.
PackingReport find_packing_shift(const NdArray& x, const BlockSet& c, std::size_t m);

// Checks both packing bounds for an explicit delta in (0, 1].
PackingCheck verify_packing_bounds(const NdArray& x, const BlockSet& c, std::size_t m, double delta);

}  // namespace mdts

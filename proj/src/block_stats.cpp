#include "mdts/block_stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mdts/errors.hpp"

namespace mdts {

const char* to_string(BlockCounting kind) {
  switch (kind) {
    case BlockCounting::NonOverlapping: return "non-overlapping";
    case BlockCounting::Shifted: return "shifted";
    case BlockCounting::Overlapping: return "overlapping";
  }
  return "?";
}

std::uint64_t EmpiricalDistribution::count(const std::string& key) const {
  auto it = counts.find(key);
  return it == counts.end() ? 0 : it->second;
}

double EmpiricalDistribution::probability(const std::string& key) const {
  if (total_blocks == 0) return 0.0;
  return static_cast<double>(count(key)) / static_cast<double>(total_blocks);
}

std::uint64_t EmpiricalDistribution::count_in(const BlockSet& set) const {
  std::uint64_t hits = 0;
  for (const auto& [key, c] : counts) {
    if (set.contains(key)) hits += c;
  }
  return hits;
}

std::string EmpiricalDistribution::to_csv() const {
  std::string out = "key,count\n";
  for (const auto& [key, c] : counts) {
    out += to_hex(key);
    out += ',';
    out += std::to_string(c);
    out += '\n';
  }
  return out;
}

namespace {

void check_block_side(const NdArray& x, std::size_t k) {
  if (k == 0) throw DomainError("block side k must be positive");
  if (k > x.min_side()) {
    throw DomainError("block side " + std::to_string(k) + " exceeds the smallest array side " +
                      std::to_string(x.min_side()));
  }
}

void check_shift(const NdArray& x, const ShiftVector& p, std::size_t k) {
  if (p.dim() != x.dim()) throw DomainError("shift dimension does not match the array");
  for (auto c : p.p) {
    if (c >= k) throw DomainError("shift components must lie in [0, k)");
  }
}

// Calls f(key) for the k-cube at every origin p_i + step * r_i that fits in x.
// Returns the number of visited cubes.
template <class F>
std::uint64_t scan_blocks(const NdArray& x, std::size_t k, const ShiftVector& p, std::size_t step,
                          F&& f) {
  const BlockExtractor ex(x, k);
  Dims counts(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) {
    const std::size_t n = x.dims()[i];
    counts[i] = n >= p.p[i] + k ? (n - p.p[i] - k) / step + 1 : 0;
  }
  std::string key = block_key_prefix(x.dim(), k);
  const std::size_t head = key.size();
  key.resize(head + ex.block_volume());
  auto* dst = reinterpret_cast<std::uint8_t*>(key.data() + head);
  Dims origin(x.dim());
  std::uint64_t visited = 0;
  for_each_index(counts, [&](const Dims& r) {
    for (std::size_t i = 0; i < r.size(); ++i) origin[i] = p.p[i] + step * r[i];
    ex.copy(origin, dst);
    f(static_cast<const std::string&>(key));
    ++visited;
  });
  return visited;
}

EmpiricalDistribution count_blocks(const NdArray& x, std::size_t k, const ShiftVector& p,
                                   std::size_t step, BlockCounting kind) {
  EmpiricalDistribution dist;
  dist.k = k;
  dist.d = x.dim();
  dist.alphabet = x.alphabet();
  dist.kind = kind;
  dist.shift = p;
  dist.total_blocks = scan_blocks(x, k, p, step, [&](const std::string& key) { ++dist.counts[key]; });
  return dist;
}

}  // namespace

std::uint64_t z_count(const NdArray& x, const ShiftVector& p, std::size_t m, const BlockSet& c) {
  check_block_side(x, m);
  check_shift(x, p, m);
  if (c.dim() != x.dim() || c.m() != m) throw DomainError("block set shape does not match (d, m)");
  if (c.empty()) return 0;
  std::uint64_t hits = 0;
  scan_blocks(x, m, p, m, [&](const std::string& key) { hits += c.contains(key) ? 1 : 0; });
  return hits;
}

EmpiricalDistribution empirical_nonoverlapping(const NdArray& x, std::size_t k) {
  check_block_side(x, k);
  return count_blocks(x, k, ShiftVector::zero(x.dim()), k, BlockCounting::NonOverlapping);
}

EmpiricalDistribution empirical_shifted(const NdArray& x, const ShiftVector& p, std::size_t k) {
  check_block_side(x, k);
  check_shift(x, p, k);
  return count_blocks(x, k, p, k, BlockCounting::Shifted);
}

EmpiricalDistribution empirical_overlapping(const NdArray& x, std::size_t k) {
  check_block_side(x, k);
  return count_blocks(x, k, ShiftVector::zero(x.dim()), 1, BlockCounting::Overlapping);
}

double shannon_entropy(const EmpiricalDistribution& dist) {
  if (dist.total_blocks == 0) throw DomainError("entropy of an empty distribution");
  std::vector<std::uint64_t> c;
  c.reserve(dist.counts.size());
  for (const auto& kv : dist.counts) c.push_back(kv.second);
  std::sort(c.begin(), c.end());
  const double total = static_cast<double>(dist.total_blocks);
  double sum = 0.0, comp = 0.0;
  for (std::uint64_t v : c) {
    if (v == 0) continue;
    const double p = static_cast<double>(v) / total;
    const double term = -p * std::log2(p);
    const double t = sum + term;
    comp += std::fabs(sum) >= std::fabs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return std::max(0.0, sum + comp);
}

namespace {

std::size_t schedule_from_log2_volume(double log2_volume, std::size_t d, unsigned alphabet_size,
                                      double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  const double bound =
      log2_volume / ((1.0 + epsilon) * std::log2(static_cast<double>(alphabet_size)));
  std::size_t k = 1;
  while (std::pow(static_cast<double>(k + 1), static_cast<double>(d)) <= bound * (1.0 + 1e-12)) ++k;
  return k;
}

}  // namespace

std::size_t k_schedule_for_volume(std::size_t volume, std::size_t d, unsigned alphabet_size,
                                  double epsilon) {
  return schedule_from_log2_volume(std::log2(static_cast<double>(volume)), d, alphabet_size,
                                   epsilon);
}

std::size_t k_schedule(std::size_t n, std::size_t d, unsigned alphabet_size, double epsilon) {
  if (n < 2) throw DomainError("k_schedule needs n >= 2");
  return schedule_from_log2_volume(static_cast<double>(d) * std::log2(static_cast<double>(n)), d,
                                   alphabet_size, epsilon);
}

std::size_t well_sampled_k(const Dims& dims, unsigned alphabet_size) {
  const std::size_t min_side = *std::min_element(dims.begin(), dims.end());
  const double log2_a = std::log2(static_cast<double>(alphabet_size));
  std::size_t best = 1;
  for (std::size_t k = 1; k <= min_side; ++k) {
    double blocks = 1.0;
    for (std::size_t n : dims) blocks *= static_cast<double>(n / k);
    const double support_log2 = std::pow(static_cast<double>(k), static_cast<double>(dims.size())) * log2_a;
    if (support_log2 <= std::log2(blocks / 16.0)) best = k;
    else break;
  }
  return best;
}

EntropyEstimate estimate_entropy_rate(const NdArray& x, const EstimateOptions& options) {
  EntropyEstimate est;
  std::size_t k;
  if (options.k) {
    k = *options.k;
    check_block_side(x, k);
    est.k_bound_by = "explicit";
  } else {
    k = k_schedule_for_volume(x.volume(), x.dim(), x.alphabet().size(), options.epsilon);
    est.k_bound_by = "schedule";
    if (k > x.min_side()) {
      k = x.min_side();
      est.k_bound_by = "array";
    }
  }
  est.requested_k = k;
  if (options.well_sampled_guard) {
    est.guard_k = well_sampled_k(x.dims(), x.alphabet().size());
    if (est.guard_k < k) {
      k = est.guard_k;
      est.k_bound_by = "guard";
    }
  }
  const auto dist = empirical_nonoverlapping(x, k);
  est.k_used = k;
  est.total_blocks = dist.total_blocks;
  est.distinct_blocks = dist.distinct();
  est.block_entropy_bits = shannon_entropy(dist);
  est.bits_per_site =
      est.block_entropy_bits / std::pow(static_cast<double>(k), static_cast<double>(x.dim()));
  return est;
}

}  // namespace mdts

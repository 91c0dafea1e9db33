#include "mdts/packing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mdts/block_stats.hpp"
#include "mdts/errors.hpp"

namespace mdts {

namespace {

void check_instance(const NdArray& x, const BlockSet& c, std::size_t m) {
  if (!x.is_cube()) throw DomainError("packing requires a cubic sample");
  if (m == 0 || m > x.dims()[0]) throw DomainError("packing requires 1 <= m <= k");
  if (c.dim() != x.dim() || c.m() != m) throw DomainError("block set shape does not match (d, m)");
  if (c.alphabet() != x.alphabet()) throw DomainError("block set alphabet does not match sample");
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

std::string PackingReport::to_text() const {
  std::string s;
  s += "best_shift=" + to_string(best_shift) + "\n";
  s += "lambda=" + std::to_string(lambda) + "\n";
  s += "shifted_blocks=" + std::to_string(shifted_blocks) + "\n";
  s += "shifted_fraction=" + fmt(shifted_fraction) + "\n";
  s += "overlap_matches=" + std::to_string(overlap_matches) + "\n";
  s += "overlap_positions=" + std::to_string(overlap_positions) + "\n";
  s += "overlap_fraction=" + fmt(overlap_fraction) + "\n";
  s += "lambda_sum=" + std::to_string(lambda_sum) + "\n";
  s += "delta_used=" + fmt(delta_used) + "\n";
  s += std::string("bound_a_holds=") + (bound_a_holds ? "true" : "false") + "\n";
  s += std::string("bound_b_holds=") + (bound_b_holds ? "true" : "false") + "\n";
  return s;
}

std::vector<std::uint64_t> packing_lambdas(const NdArray& x, const BlockSet& c, std::size_t m) {
  check_instance(x, c, m);
  std::vector<std::uint64_t> out;
  for_each_index(Dims(x.dim(), m), [&](const Dims& p) {
    out.push_back(z_count(x, ShiftVector(p), m, c));
  });
  return out;
}

namespace {

void apply_bounds(PackingReport& rep, double delta, std::size_t k, std::size_t m, std::size_t d) {
  rep.delta_used = delta;
  rep.bound_a_holds = static_cast<double>(rep.lambda) >=
                      (1.0 - 2.0 * delta) * static_cast<double>(rep.shifted_blocks);
  const double partition_elements =
      std::pow(static_cast<double>(k / m + 2), static_cast<double>(d));
  rep.bound_b_holds = static_cast<double>(rep.lambda) >= (1.0 - 4.0 * delta) * partition_elements;
}

PackingReport evaluate(const NdArray& x, const BlockSet& c, std::size_t m) {
  const std::size_t d = x.dim();
  const std::size_t k = x.dims()[0];
  PackingReport rep;

  const auto lambdas = packing_lambdas(x, c, m);
  std::size_t best = 0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    rep.lambda_sum += lambdas[i];
    if (lambdas[i] > lambdas[best]) best = i;
  }
  // Recover the shift vector of index `best` (lexicographic, axis 0 slowest).
  Dims p(d);
  std::size_t rest = best;
  for (std::size_t i = d; i-- > 0;) {
    p[i] = rest % m;
    rest /= m;
  }
  rep.best_shift = ShiftVector(p);
  rep.lambda = lambdas[best];
  rep.shifted_blocks = 1;
  for (std::size_t i = 0; i < d; ++i) rep.shifted_blocks *= (k - p[i]) / m;
  rep.shifted_fraction = rep.shifted_blocks == 0
                             ? 0.0
                             : static_cast<double>(rep.lambda) / static_cast<double>(rep.shifted_blocks);

  const auto overl = empirical_overlapping(x, m);
  rep.overlap_positions = overl.total_blocks;
  rep.overlap_matches = c.empty() ? 0 : overl.count_in(c);
  rep.overlap_fraction =
      static_cast<double>(rep.overlap_matches) / static_cast<double>(rep.overlap_positions);
  return rep;
}

}  // namespace

PackingReport find_packing_shift(const NdArray& x, const BlockSet& c, std::size_t m) {
  check_instance(x, c, m);
  const std::size_t d = x.dim();
  const std::size_t k = x.dims()[0];
  auto rep = evaluate(x, c, m);
  // Smallest delta meeting both packing hypotheses.
  const double delta = std::max(1.0 - rep.overlap_fraction,
                                static_cast<double>(d * m) / static_cast<double>(k));
  apply_bounds(rep, delta, k, m, d);
  return rep;
}

PackingCheck verify_packing_bounds(const NdArray& x, const BlockSet& c, std::size_t m,
                                   double delta) {
  check_instance(x, c, m);
  if (!(delta > 0.0 && delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  const std::size_t d = x.dim();
  const std::size_t k = x.dims()[0];
  PackingCheck out;
  out.report = evaluate(x, c, m);
  apply_bounds(out.report, delta, k, m, d);
  out.applicable = static_cast<double>(k) * delta >= static_cast<double>(d * m) &&
                   static_cast<double>(out.report.overlap_matches) >=
                       (1.0 - delta) * static_cast<double>(out.report.overlap_positions);
  out.bound_a_holds = out.report.bound_a_holds;
  out.bound_b_holds = out.report.bound_b_holds;
  return out;
}

}  // namespace mdts

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mdts {

// Flat key=value sweep description. Lists are comma separated, except
// `models`, whose entries are separated by '|'. Every key may be repeated on
// the command line as an override.
//
//   models     = bernoulli:p=0.1 | iid:A=2
//   n          = 64,128
//   d          = 2
//   k          = auto            # integer, "auto" (k schedule) or "guard"
//   epsilon    = 0.1
//   delta      = 0.1
//   alpha      = 0.2
//   h0         = 0.6
//   m          = 2
//   replicates = 3
//   metrics    = estimate,member
//   seed       = 7
//
// Metrics:
//   estimate      plug-in entropy rate at the cell's k
//   member        1 if the sample is universally typical for h0 at k, else 0
//   coverage      empirical k-block mass of the entropy-typical set C_k(delta)
//   tk_member     1 if the sample lies in the typical-sampling set built from C_m(delta)
//   lib_coverage  coverage of a random library of 2^(k^d (h0 - alpha)) distinct k-cubes
//   block_rate    bits/site of the block codec
//   lz78_rate     bits/site of Hilbert scan + LZ78
struct ExperimentSpec {
  std::vector<std::string> models;
  std::vector<std::size_t> n;
  std::vector<std::size_t> d{2};
  std::vector<std::string> k{"auto"};
  double epsilon = 0.1;
  std::vector<double> delta{0.1};
  std::vector<double> alpha{0.2};
  std::vector<double> h0{0.5};
  std::size_t m = 2;
  std::size_t replicates = 1;
  std::vector<std::string> metrics{"estimate"};
  std::uint64_t seed = 0;

  static ExperimentSpec parse(std::string_view text);
  void set(std::string_view key, std::string_view value);
  // Throws DomainError on an empty grid or unknown metric.
  void validate() const;
  std::size_t cell_count() const noexcept;
};

struct ExperimentRow {
  std::size_t cell = 0;
  std::string model;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t k = 0;
  double delta = 0.0;
  double alpha = 0.0;
  double h0 = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicate = 0;
  std::string metric;
  double value = 0.0;
  double wall_ms = -1.0;  // negative: not recorded

  std::string to_csv() const;
};

// cell,model,n,d,k,delta,alpha,h0,seed,replicate,metric,value,wall_ms
std::string experiment_csv_header();

struct ExperimentOptions {
  unsigned threads = 0;  // 0: MDTS_THREADS or hardware concurrency
  bool timing = false;   // fill wall_ms; makes output run-dependent
};

// Runs the grid and hands rows to `sink` in grid order (cell, replicate,
// metric), one call at a time. Replicate seeds are derive_seed(seed, cell, r).
void run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options,
                    const std::function<void(const ExperimentRow&)>& sink);

}  // namespace mdts

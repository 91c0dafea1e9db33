#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mdts/ndarray.hpp"

namespace mdts {

struct IidSource {
  std::vector<double> probabilities;
};

// Every line along `axis` is an independent Markov chain with the given
// transition matrix. An empty `initial` means "start in the stationary law".
struct MarkovRowsSource {
  std::vector<std::vector<double>> transition;
  std::vector<double> initial;
  std::size_t axis = 0;
};

// Binary 2D Ising field, single-site Gibbs sweeps in raster order on a torus.
struct Ising2DSource {
  double beta = 0.0;
  unsigned sweeps = 200;
};

struct PeriodicSource {
  NdArray tile;
};

using SourceVariant = std::variant<IidSource, MarkovRowsSource, Ising2DSource, PeriodicSource>;

class SourceModel {
 public:
  static SourceModel iid(std::vector<double> probabilities);
  static SourceModel uniform(unsigned alphabet_size);
  static SourceModel bernoulli(double p_one);
  static SourceModel markov_rows(std::vector<std::vector<double>> transition,
                                 std::vector<double> initial = {}, std::size_t axis = 0);
  static SourceModel ising2d(double beta, unsigned sweeps = 200);
  static SourceModel periodic(NdArray tile);

  // Descriptor syntax: family ':' key=value pairs joined by ';'
  //   iid:p=0.9,0.1         iid:A=4 (uniform)         bernoulli:p=0.1
  //   markov:P=0.9,0.1/0.1,0.9;init=1,0;axis=0
  //   ising:beta=0.4;sweeps=200
  //   periodic:dims=2x2;tile=0,1,1,0;A=2
  static SourceModel parse(std::string_view descriptor);
  std::string describe() const;

  const SourceVariant& variant() const noexcept { return variant_; }
  const Alphabet& alphabet() const noexcept { return alphabet_; }

  // Bits per site; nullopt when no closed form is known (Ising).
  std::optional<double> exact_entropy_rate() const;

  // Whether block marginals mu^m are available in closed form.
  bool has_block_marginals() const noexcept;

  // Chain start law used by generate() for MarkovRows.
  std::vector<double> markov_start() const;

 private:
  SourceModel(SourceVariant v, Alphabet a) : variant_(std::move(v)), alphabet_(a) {}

  SourceVariant variant_;
  Alphabet alphabet_;
};

// Deterministic in (model, dims, seed). Throws DomainError on a dims/model mismatch.
NdArray generate(const SourceModel& model, const Dims& dims, std::uint64_t seed);

// log2 of the probability the stationary process assigns to the cylinder of
// `block` anchored at the origin. Returns -infinity for impossible blocks.
// Throws UnsupportedModelError for Ising.
double log2_block_probability(const SourceModel& model, const NdArray& block);

// Stationary distribution of a row-stochastic matrix. For reducible chains the
// Cesaro limit started from `start` (uniform when empty) is returned.
std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition,
                                            const std::vector<double>& start = {});

double shannon_entropy_bits(const std::vector<double>& probabilities);

}  // namespace mdts

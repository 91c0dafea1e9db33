#include "mdts/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "mdts/errors.hpp"
#include "mdts/rng.hpp"
#include "text_util.hpp"

namespace mdts {

namespace {

constexpr double kSumTolerance = 1e-12;

// RNG streams, one per purpose, so that fields of different families never share draws.
enum Stream : std::uint64_t {
  kIidStream = 1,
  kMarkovStartStream = 2,
  kMarkovStepStream = 3,
  kIsingInitStream = 4,
  kIsingSweepStream = 5,
};

void check_distribution(const std::vector<double>& p, const char* what) {
  if (p.size() < 2 || p.size() > 256) {
    throw DomainError(std::string(what) + " must have between 2 and 256 entries");
  }
  double sum = 0;
  for (double v : p) {
    if (!(v >= 0.0) || v > 1.0) throw DomainError(std::string(what) + " has an entry outside [0,1]");
    sum += v;
  }
  if (std::fabs(sum - 1.0) > kSumTolerance) {
    throw DomainError(std::string(what) + " does not sum to 1");
  }
}

std::vector<double> cumulative(const std::vector<double>& p) {
  std::vector<double> c(p.size());
  std::partial_sum(p.begin(), p.end(), c.begin());
  c.back() = 1.0;
  return c;
}

std::uint8_t sample(const std::vector<double>& cum, double u) {
  const auto it = std::upper_bound(cum.begin(), cum.end(), u);
  return static_cast<std::uint8_t>(std::min<std::size_t>(
      static_cast<std::size_t>(it - cum.begin()), cum.size() - 1));
}

std::string join_doubles(const std::vector<double>& v, char sep = ',') {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += text::format_double(v[i]);
  }
  return s;
}

}  // namespace

double shannon_entropy_bits(const std::vector<double>& probabilities) {
  double h = 0;
  for (double p : probabilities) {
    if (p > 0) h -= p * std::log2(p);
  }
  return h;
}

std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& transition,
                                            const std::vector<double>& start) {
  const std::size_t n = transition.size();
  // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = transition[j][i] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;
  bool singular = false;
  for (std::size_t col = 0; col < n && !singular; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    }
    if (std::fabs(a[piv][col]) < 1e-12) {
      singular = true;
      break;
    }
    std::swap(a[piv], a[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  if (!singular) {
    std::vector<double> pi(n);
    double sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      pi[i] = std::max(0.0, a[i][n] / a[i][i]);
      sum += pi[i];
    }
    for (double& v : pi) v /= sum;
    return pi;
  }
  // Reducible chain: Cesaro average of the law started at `start`.
  std::vector<double> cur = start.empty() ? std::vector<double>(n, 1.0 / static_cast<double>(n)) : start;
  std::vector<double> avg(n, 0.0), next(n);
  constexpr int kIterations = 20000;
  for (int it = 0; it < kIterations; ++it) {
    for (std::size_t i = 0; i < n; ++i) avg[i] += cur[i];
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (cur[i] == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) next[j] += cur[i] * transition[i][j];
    }
    cur.swap(next);
  }
  for (double& v : avg) v /= kIterations;
  return avg;
}

SourceModel SourceModel::iid(std::vector<double> probabilities) {
  check_distribution(probabilities, "symbol distribution");
  const Alphabet a(static_cast<unsigned>(probabilities.size()));
  return SourceModel(IidSource{std::move(probabilities)}, a);
}

SourceModel SourceModel::uniform(unsigned alphabet_size) {
  const Alphabet a(alphabet_size);
  return iid(std::vector<double>(alphabet_size, 1.0 / alphabet_size));
}

SourceModel SourceModel::bernoulli(double p_one) { return iid({1.0 - p_one, p_one}); }

SourceModel SourceModel::markov_rows(std::vector<std::vector<double>> transition,
                                     std::vector<double> initial, std::size_t axis) {
  const std::size_t n = transition.size();
  if (n < 2 || n > 256) throw DomainError("transition matrix must be between 2x2 and 256x256");
  for (const auto& row : transition) {
    if (row.size() != n) throw DomainError("transition matrix must be square");
    check_distribution(row, "transition matrix row");
  }
  if (!initial.empty()) {
    if (initial.size() != n) throw DomainError("initial distribution size mismatch");
    check_distribution(initial, "initial distribution");
  }
  if (axis >= kMaxDim) throw DomainError("correlated axis must be 0, 1 or 2");
  const Alphabet a(static_cast<unsigned>(n));
  return SourceModel(MarkovRowsSource{std::move(transition), std::move(initial), axis}, a);
}

SourceModel SourceModel::ising2d(double beta, unsigned sweeps) {
  if (!std::isfinite(beta)) throw DomainError("Ising coupling must be finite");
  return SourceModel(Ising2DSource{beta, sweeps}, Alphabet(2));
}

SourceModel SourceModel::periodic(NdArray tile) {
  const Alphabet a = tile.alphabet();
  return SourceModel(PeriodicSource{std::move(tile)}, a);
}

std::vector<double> SourceModel::markov_start() const {
  const auto& m = std::get<MarkovRowsSource>(variant_);
  if (!m.initial.empty()) return m.initial;
  return stationary_distribution(m.transition);
}

bool SourceModel::has_block_marginals() const noexcept {
  return !std::holds_alternative<Ising2DSource>(variant_);
}

std::optional<double> SourceModel::exact_entropy_rate() const {
  return std::visit(
      [&](const auto& s) -> std::optional<double> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          return shannon_entropy_bits(s.probabilities);
        } else if constexpr (std::is_same_v<T, MarkovRowsSource>) {
          const auto pi = stationary_distribution(s.transition, s.initial);
          double h = 0;
          for (std::size_t i = 0; i < pi.size(); ++i) h += pi[i] * shannon_entropy_bits(s.transition[i]);
          return h;
        } else if constexpr (std::is_same_v<T, PeriodicSource>) {
          return 0.0;
        } else {
          return std::nullopt;
        }
      },
      variant_);
}

std::string SourceModel::describe() const {
  return std::visit(
      [&](const auto& s) -> std::string {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          return "iid:p=" + join_doubles(s.probabilities);
        } else if constexpr (std::is_same_v<T, MarkovRowsSource>) {
          std::string out = "markov:P=";
          for (std::size_t i = 0; i < s.transition.size(); ++i) {
            if (i) out += '/';
            out += join_doubles(s.transition[i]);
          }
          if (!s.initial.empty()) out += ";init=" + join_doubles(s.initial);
          out += ";axis=" + std::to_string(s.axis);
          return out;
        } else if constexpr (std::is_same_v<T, Ising2DSource>) {
          return "ising:beta=" + text::format_double(s.beta) + ";sweeps=" + std::to_string(s.sweeps);
        } else {
          std::string out = "periodic:dims=";
          for (std::size_t i = 0; i < s.tile.dim(); ++i) {
            if (i) out += 'x';
            out += std::to_string(s.tile.dims()[i]);
          }
          out += ";tile=";
          for (std::size_t i = 0; i < s.tile.volume(); ++i) {
            if (i) out += ',';
            out += std::to_string(s.tile.data()[i]);
          }
          out += ";A=" + std::to_string(s.tile.alphabet().size());
          return out;
        }
      },
      variant_);
}

SourceModel SourceModel::parse(std::string_view descriptor) {
  descriptor = text::trim(descriptor);
  const auto colon = descriptor.find(':');
  const std::string family(text::trim(descriptor.substr(0, colon)));
  std::map<std::string, std::string, std::less<>> kv;
  if (colon != std::string_view::npos) {
    for (auto item : text::split(descriptor.substr(colon + 1), ';')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string_view::npos) {
        throw DomainError("model parameter '" + std::string(item) + "' is not key=value");
      }
      kv[std::string(text::trim(item.substr(0, eq)))] = std::string(text::trim(item.substr(eq + 1)));
    }
  }
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto finish = [&](SourceModel m) {
    if (!kv.empty()) throw DomainError("unknown model parameter '" + kv.begin()->first + "'");
    return m;
  };
  if (family == "iid") {
    if (auto p = take("p")) return finish(iid(text::parse_doubles(*p)));
    if (auto a = take("A")) return finish(uniform(static_cast<unsigned>(text::parse_u64(*a))));
    throw DomainError("iid model needs p=... or A=...");
  }
  if (family == "bernoulli") {
    auto p = take("p");
    if (!p) throw DomainError("bernoulli model needs p=...");
    return finish(bernoulli(text::parse_double(*p)));
  }
  if (family == "markov") {
    auto p = take("P");
    if (!p) throw DomainError("markov model needs P=row/row/...");
    std::vector<std::vector<double>> rows;
    for (auto row : text::split(*p, '/')) rows.push_back(text::parse_doubles(row));
    std::vector<double> init;
    if (auto i = take("init")) init = text::parse_doubles(*i);
    std::size_t axis = 0;
    if (auto ax = take("axis")) axis = static_cast<std::size_t>(text::parse_u64(*ax));
    return finish(markov_rows(std::move(rows), std::move(init), axis));
  }
  if (family == "ising") {
    auto b = take("beta");
    if (!b) throw DomainError("ising model needs beta=...");
    unsigned sweeps = 200;
    if (auto s = take("sweeps")) sweeps = static_cast<unsigned>(text::parse_u64(*s));
    return finish(ising2d(text::parse_double(*b), sweeps));
  }
  if (family == "periodic") {
    auto dims = take("dims");
    auto tile = take("tile");
    if (!dims || !tile) throw DomainError("periodic model needs dims=... and tile=...");
    std::vector<std::uint8_t> data;
    unsigned max_sym = 0;
    for (auto s : text::split(*tile, ',')) {
      const auto v = text::parse_u64(s);
      if (v > 255) throw DomainError("tile symbol out of range");
      data.push_back(static_cast<std::uint8_t>(v));
      max_sym = std::max<unsigned>(max_sym, static_cast<unsigned>(v));
    }
    unsigned a = std::max(2u, max_sym + 1);
    if (auto as = take("A")) a = static_cast<unsigned>(text::parse_u64(*as));
    return finish(periodic(NdArray(Alphabet(a), text::parse_dims(*dims), std::move(data))));
  }
  throw DomainError("unknown model family '" + family + "'");
}

namespace {

NdArray generate_iid(const IidSource& s, const Alphabet& a, const Dims& dims, std::uint64_t seed) {
  std::size_t vol = 1;
  for (auto n : dims) vol *= n;
  const auto cum = cumulative(s.probabilities);
  std::vector<std::uint8_t> data(vol);
  for (std::size_t i = 0; i < vol; ++i) data[i] = sample(cum, counter_uniform(seed, kIidStream, i));
  return NdArray(a, dims, std::move(data));
}

NdArray generate_markov(const SourceModel& model, const MarkovRowsSource& s, const Dims& dims,
                        std::uint64_t seed) {
  if (s.axis >= dims.size()) {
    throw DomainError("correlated axis " + std::to_string(s.axis) + " does not exist in a " +
                      std::to_string(dims.size()) + "-dimensional array");
  }
  std::size_t vol = 1;
  for (auto n : dims) vol *= n;
  std::size_t stride = 1;
  for (std::size_t i = s.axis + 1; i < dims.size(); ++i) stride *= dims[i];
  const std::size_t len = dims[s.axis];
  const auto start = cumulative(model.markov_start());
  std::vector<std::vector<double>> rows;
  for (const auto& r : s.transition) rows.push_back(cumulative(r));

  std::vector<std::uint8_t> data(vol);
  // Line starts are the offsets whose coordinate along `axis` is zero.
  for (std::size_t off = 0; off < vol; ++off) {
    if ((off / stride) % len != 0) continue;
    std::uint8_t state = sample(start, counter_uniform(seed, kMarkovStartStream, off));
    data[off] = state;
    for (std::size_t t = 1; t < len; ++t) {
      const std::size_t cell = off + t * stride;
      state = sample(rows[state], counter_uniform(seed, kMarkovStepStream, cell));
      data[cell] = state;
    }
  }
  return NdArray(model.alphabet(), dims, std::move(data));
}

NdArray generate_ising(const Ising2DSource& s, const Dims& dims, std::uint64_t seed) {
  if (dims.size() != 2) throw DomainError("Ising model requires a 2-dimensional array");
  const std::size_t rows = dims[0], cols = dims[1], vol = rows * cols;
  std::vector<int> spin(vol);
  for (std::size_t i = 0; i < vol; ++i) {
    spin[i] = (counter_u64(seed, kIsingInitStream, i) & 1) ? 1 : -1;
  }
  // P(+1 | neighbours) for neighbour sums -4, -2, 0, 2, 4.
  double p_up[5];
  for (int j = 0; j < 5; ++j) p_up[j] = 1.0 / (1.0 + std::exp(-2.0 * s.beta * (2 * j - 4)));
  for (unsigned sweep = 0; sweep < s.sweeps; ++sweep) {
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t up = (r + rows - 1) % rows, down = (r + 1) % rows;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t left = (c + cols - 1) % cols, right = (c + 1) % cols;
        const int sum = spin[up * cols + c] + spin[down * cols + c] + spin[r * cols + left] +
                        spin[r * cols + right];
        const std::size_t i = r * cols + c;
        const double u = counter_uniform(seed, kIsingSweepStream, sweep * vol + i);
        spin[i] = u < p_up[(sum + 4) / 2] ? 1 : -1;
      }
    }
  }
  std::vector<std::uint8_t> data(vol);
  for (std::size_t i = 0; i < vol; ++i) data[i] = spin[i] > 0 ? 1 : 0;
  return NdArray(Alphabet(2), dims, std::move(data));
}

NdArray generate_periodic(const PeriodicSource& s, const Dims& dims) {
  const NdArray& tile = s.tile;
  if (dims.size() != tile.dim()) throw DomainError("periodic tile dimension does not match dims");
  std::vector<std::uint8_t> data;
  std::size_t vol = 1;
  for (auto n : dims) vol *= n;
  data.reserve(vol);
  Dims t(dims.size());
  for_each_index(dims, [&](const Dims& idx) {
    for (std::size_t i = 0; i < idx.size(); ++i) t[i] = idx[i] % tile.dims()[i];
    data.push_back(tile.at(t));
  });
  return NdArray(tile.alphabet(), dims, std::move(data));
}

}  // namespace

NdArray generate(const SourceModel& model, const Dims& dims, std::uint64_t seed) {
  if (dims.empty() || dims.size() > kMaxDim) throw DomainError("dims must have 1 to 3 entries");
  for (auto n : dims) {
    if (n == 0) throw DomainError("dims must be positive");
  }
  return std::visit(
      [&](const auto& s) -> NdArray {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          return generate_iid(s, model.alphabet(), dims, seed);
        } else if constexpr (std::is_same_v<T, MarkovRowsSource>) {
          return generate_markov(model, s, dims, seed);
        } else if constexpr (std::is_same_v<T, Ising2DSource>) {
          return generate_ising(s, dims, seed);
        } else {
          return generate_periodic(s, dims);
        }
      },
      model.variant());
}

double log2_block_probability(const SourceModel& model, const NdArray& block) {
  if (block.alphabet() != model.alphabet()) {
    throw DomainError("block alphabet does not match the model alphabet");
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IidSource>) {
          double lp = 0;
          for (auto sym : block.data()) {
            const double p = s.probabilities[sym];
            if (p == 0.0) return kNegInf;
            lp += std::log2(p);
          }
          return lp;
        } else if constexpr (std::is_same_v<T, MarkovRowsSource>) {
          if (s.axis >= block.dim()) throw DomainError("correlated axis outside block dimension");
          const auto start = model.markov_start();
          const Dims& dims = block.dims();
          std::size_t stride = 1;
          for (std::size_t i = s.axis + 1; i < dims.size(); ++i) stride *= dims[i];
          const std::size_t len = dims[s.axis];
          const auto data = block.data();
          double lp = 0;
          for (std::size_t off = 0; off < data.size(); ++off) {
            double p;
            if ((off / stride) % len == 0) {
              p = start[data[off]];
            } else {
              p = s.transition[data[off - stride]][data[off]];
            }
            if (p == 0.0) return kNegInf;
            lp += std::log2(p);
          }
          return lp;
        } else if constexpr (std::is_same_v<T, PeriodicSource>) {
          // Stationary periodic law: uniform over the tile phases.
          const NdArray& tile = s.tile;
          if (tile.dim() != block.dim()) throw DomainError("block dimension does not match tile");
          std::size_t hits = 0;
          Dims t(tile.dim());
          for_each_index(tile.dims(), [&](const Dims& phase) {
            bool match = true;
            for_each_index(block.dims(), [&](const Dims& idx) {
              if (!match) return;
              for (std::size_t i = 0; i < idx.size(); ++i) {
                t[i] = (phase[i] + idx[i]) % tile.dims()[i];
              }
              match = tile.at(t) == block.at(idx);
            });
            hits += match ? 1 : 0;
          });
          if (hits == 0) return kNegInf;
          return std::log2(static_cast<double>(hits)) - std::log2(static_cast<double>(tile.volume()));
        } else {
          throw UnsupportedModelError("Ising model has no closed-form block marginals");
        }
      },
      model.variant());
}

}  // namespace mdts

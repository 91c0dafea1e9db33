#include "mdts/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include "mdts/block_stats.hpp"
#include "mdts/codec.hpp"
#include "mdts/errors.hpp"
#include "mdts/rng.hpp"
#include "mdts/sources.hpp"
#include "mdts/typical_sets.hpp"
#include "text_util.hpp"

namespace mdts {

namespace {

const char* const kMetrics[] = {"estimate",     "member",     "coverage", "tk_member",
                                "lib_coverage", "block_rate", "lz78_rate"};

template <class T, class Parse>
std::vector<T> parse_list(std::string_view value, Parse parse) {
  std::vector<T> out;
  for (auto item : text::split(value, ',')) {
    item = text::trim(item);
    if (!item.empty()) out.push_back(parse(item));
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

void ExperimentSpec::set(std::string_view key, std::string_view value) {
  key = text::trim(key);
  value = text::trim(value);
  auto to_size = [](std::string_view s) { return static_cast<std::size_t>(text::parse_u64(s)); };
  auto to_string = [](std::string_view s) { return std::string(s); };
  if (key == "models") {
    models.clear();
    for (auto item : text::split(value, '|')) {
      item = text::trim(item);
      if (!item.empty()) models.push_back(SourceModel::parse(item).describe());
    }
  } else if (key == "n") {
    n = parse_list<std::size_t>(value, to_size);
  } else if (key == "d") {
    d = parse_list<std::size_t>(value, to_size);
  } else if (key == "k") {
    k = parse_list<std::string>(value, to_string);
  } else if (key == "epsilon") {
    epsilon = text::parse_double(value);
  } else if (key == "delta") {
    delta = text::parse_doubles(value);
  } else if (key == "alpha") {
    alpha = text::parse_doubles(value);
  } else if (key == "h0") {
    h0 = text::parse_doubles(value);
  } else if (key == "m") {
    m = to_size(value);
  } else if (key == "replicates") {
    replicates = to_size(value);
  } else if (key == "metrics") {
    metrics = parse_list<std::string>(value, to_string);
  } else if (key == "seed") {
    seed = text::parse_u64(value);
  } else {
    throw DomainError("unknown experiment key '" + std::string(key) + "'");
  }
}

ExperimentSpec ExperimentSpec::parse(std::string_view text_in) {
  ExperimentSpec spec;
  std::size_t line_no = 0;
  for (auto line : text::split(text_in, '\n')) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DomainError("line " + std::to_string(line_no) + ": expected key = value");
    }
    // Model descriptors contain '=' themselves, so only the first one splits.
    spec.set(line.substr(0, eq), line.substr(eq + 1));
  }
  return spec;
}

void ExperimentSpec::validate() const {
  if (models.empty() || n.empty() || d.empty() || k.empty() || delta.empty() || alpha.empty() ||
      h0.empty() || metrics.empty() || replicates == 0) {
    throw DomainError("experiment grid is empty");
  }
  for (const auto& name : metrics) {
    bool known = false;
    for (const char* m_name : kMetrics) known = known || name == m_name;
    if (!known) throw DomainError("unknown metric '" + name + "'");
  }
  for (const auto& kk : k) {
    if (kk != "auto" && kk != "guard" && text::parse_u64(kk) == 0) {
      throw DomainError("k must be a positive integer, auto or guard");
    }
  }
  for (std::size_t dd : d) {
    if (dd == 0 || dd > kMaxDim) throw DomainError("d must be 1..3");
  }
  for (std::size_t nn : n) {
    if (nn < 2) throw DomainError("n must be at least 2");
  }
}

std::size_t ExperimentSpec::cell_count() const noexcept {
  return models.size() * n.size() * d.size() * k.size() * delta.size() * alpha.size() * h0.size();
}

std::string experiment_csv_header() {
  return "cell,model,n,d,k,delta,alpha,h0,seed,replicate,metric,value,wall_ms";
}

std::string ExperimentRow::to_csv() const {
  std::string s;
  s += std::to_string(cell) + ',' + csv_quote(model) + ',' + std::to_string(n) + ',' +
       std::to_string(d) + ',' + std::to_string(k) + ',' + fmt("%.12g", delta) + ',' +
       fmt("%.12g", alpha) + ',' + fmt("%.12g", h0) + ',' + std::to_string(seed) + ',' +
       std::to_string(replicate) + ',' + metric + ',' + fmt("%.12g", value) + ',';
  if (wall_ms >= 0.0) s += fmt("%.3f", wall_ms);
  return s;
}

namespace {

struct Cell {
  std::size_t index;
  const std::string* model_text;
  SourceModel model;
  std::size_t n, d, k;
  double delta, alpha, h0;
};

std::size_t resolve_k(const std::string& rule, const Dims& dims, unsigned a, double epsilon) {
  const std::size_t n = dims[0];
  if (rule != "auto" && rule != "guard") {
    const auto k = static_cast<std::size_t>(text::parse_u64(rule));
    if (k > n) throw DomainError("k = " + rule + " exceeds n = " + std::to_string(n));
    return k;
  }
  std::size_t volume = 1;
  for (std::size_t s : dims) volume *= s;
  std::size_t k = std::min(k_schedule_for_volume(volume, dims.size(), a, epsilon), n);
  if (rule == "guard") k = std::min(k, well_sampled_k(dims, a));
  return k;
}

// Typical sets depend only on the cell, so replicates share them.
class SetCache {
 public:
  std::shared_ptr<const BlockSet> get(const Cell& c, std::size_t side) {
    const auto key = std::make_pair(c.index, side);
    std::lock_guard lock(mu_);
    auto& slot = sets_[key];
    if (!slot) {
      slot = std::make_shared<const BlockSet>(build_entropy_typical_set(c.model, c.d, side, c.delta));
    }
    return slot;
  }

 private:
  std::mutex mu_;
  std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const BlockSet>> sets_;
};

double measure(const std::string& metric, const Cell& c, const NdArray& x, std::uint64_t seed,
               const ExperimentSpec& spec, SetCache& cache) {
  if (metric == "estimate") {
    EstimateOptions opt;
    opt.k = c.k;
    return estimate_entropy_rate(x, opt).bits_per_site;
  }
  if (metric == "member") {
    UniversalSchedule sched;
    sched.k = c.k;
    return universal_typical_membership(x, c.h0, sched).member ? 1.0 : 0.0;
  }
  if (metric == "coverage") {
    return library_coverage(x, c.k, *cache.get(c, c.k));
  }
  if (metric == "tk_member") {
    return typical_sampling_membership(x, *cache.get(c, spec.m), c.delta).member ? 1.0 : 0.0;
  }
  if (metric == "lib_coverage") {
    const double log2_size =
        std::pow(static_cast<double>(c.k), static_cast<double>(c.d)) * (c.h0 - c.alpha);
    const auto size = static_cast<std::uint64_t>(std::max(1.0, std::floor(std::exp2(log2_size))));
    const auto lib = random_library(c.d, c.k, x.alphabet(), size, mix64(seed ^ 0x6C6962ULL));
    return library_coverage(x, c.k, lib);
  }
  if (metric == "block_rate") return encode(x).rate().bits_per_site;
  if (metric == "lz78_rate") return encode_lz78_hilbert(x).rate().bits_per_site;
  throw DomainError("unknown metric '" + metric + "'");
}

unsigned worker_count(unsigned requested, std::size_t tasks) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("MDTS_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

}  // namespace

void run_experiment(const ExperimentSpec& spec, const ExperimentOptions& options,
                    const std::function<void(const ExperimentRow&)>& sink) {
  spec.validate();

  std::vector<Cell> cells;
  std::size_t index = 0;
  for (const auto& model_text : spec.models) {
    const SourceModel model = SourceModel::parse(model_text);
    for (std::size_t n : spec.n) {
      for (std::size_t d : spec.d) {
        const Dims dims(d, n);
        if (std::pow(static_cast<double>(n), static_cast<double>(d)) > 0x1.0p28) {
          throw ResourceError("experiment sample n^d exceeds 2^28 sites");
        }
        for (const auto& k_rule : spec.k) {
          const std::size_t k = resolve_k(k_rule, dims, model.alphabet().size(), spec.epsilon);
          for (double delta : spec.delta) {
            for (double alpha : spec.alpha) {
              for (double h0 : spec.h0) {
                cells.push_back(Cell{index++, &model_text, model, n, d, k, delta, alpha, h0});
              }
            }
          }
        }
      }
    }
  }

  const std::size_t tasks = cells.size() * spec.replicates;
  std::vector<std::optional<std::vector<ExperimentRow>>> done(tasks);
  std::atomic<std::size_t> next{0};
  std::size_t emitted = 0;
  std::mutex out_mu;
  std::exception_ptr failure;
  std::atomic<bool> stop{false};
  SetCache cache;

  auto work = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks || stop.load()) return;
      const Cell& c = cells[t / spec.replicates];
      const std::size_t rep = t % spec.replicates;
      std::vector<ExperimentRow> rows;
      try {
        const std::uint64_t seed = derive_seed(spec.seed, c.index, rep);
        const NdArray x = generate(c.model, Dims(c.d, c.n), seed);
        for (const auto& metric : spec.metrics) {
          const auto t0 = std::chrono::steady_clock::now();
          const double value = measure(metric, c, x, seed, spec, cache);
          const auto t1 = std::chrono::steady_clock::now();
          ExperimentRow row{c.index, *c.model_text, c.n, c.d, c.k, c.delta, c.alpha, c.h0,
                            seed, rep, metric, value, -1.0};
          if (options.timing) row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
          rows.push_back(std::move(row));
        }
      } catch (...) {
        std::lock_guard lock(out_mu);
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
      std::lock_guard lock(out_mu);
      done[t] = std::move(rows);
      try {
        while (emitted < tasks && done[emitted] && !failure) {
          for (const auto& row : *done[emitted]) sink(row);
          done[emitted].reset();
          ++emitted;
        }
      } catch (...) {
        if (!failure) failure = std::current_exception();
        stop = true;
        return;
      }
    }
  };

  const unsigned n_workers = worker_count(options.threads, tasks);
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_workers; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mdts

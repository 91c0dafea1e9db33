// mdts command-line tool. Talks to the library only through the C interface.
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdts/mdts.h"

namespace {

constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct Failure {
  int code;
  std::string message;
};

void check(mdts_status st) {
  if (st == MDTS_OK) return;
  throw Failure{st == MDTS_ERR_ARGUMENT ? kExitUsage : kExitData,
                std::string(mdts_status_name(st)) + ": " + mdts_last_error()};
}

void usage(const std::string& message) { throw Failure{kExitUsage, message}; }

struct ArrayDeleter {
  void operator()(mdts_array* a) const { mdts_array_free(a); }
};
struct ModelDeleter {
  void operator()(mdts_model* m) const { mdts_model_free(m); }
};
struct SetDeleter {
  void operator()(mdts_blockset* s) const { mdts_blockset_free(s); }
};
using ArrayPtr = std::unique_ptr<mdts_array, ArrayDeleter>;
using ModelPtr = std::unique_ptr<mdts_model, ModelDeleter>;
using SetPtr = std::unique_ptr<mdts_blockset, SetDeleter>;

ArrayPtr load_array(const std::string& path) {
  mdts_array* a = nullptr;
  check(mdts_array_read(path.c_str(), &a));
  return ArrayPtr(a);
}

ModelPtr load_model(const std::string& descriptor) {
  mdts_model* m = nullptr;
  check(mdts_model_parse(descriptor.c_str(), &m));
  return ModelPtr(m);
}

std::vector<size_t> parse_dims(const std::string& text) {
  std::vector<size_t> dims;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, 'x')) {
    try {
      size_t used = 0;
      const unsigned long long v = std::stoull(part, &used);
      if (used != part.size() || v == 0) throw std::invalid_argument(part);
      dims.push_back(static_cast<size_t>(v));
    } catch (const std::exception&) {
      usage("bad --dims '" + text + "', expected e.g. 256x256");
    }
  }
  if (dims.empty() || dims.size() > 3) usage("--dims needs 1 to 3 sides");
  return dims;
}

const char* flag(int v) { return v ? "true" : "false"; }

void print_membership(const mdts_membership& m, size_t d) {
  std::printf("member=%s\n", flag(m.member));
  std::printf("statistic=%.6f\n", m.statistic);
  if (m.k_used) std::printf("k_used=%zu\n", m.k_used);
  if (m.has_witness) {
    std::printf("witness_shift=");
    for (size_t i = 0; i < d; ++i) std::printf(i ? ",%zu" : "%zu", m.witness[i]);
    std::printf("\n");
  }
}

void print_rate(const mdts_rate_report& r) {
  static const char* const names[] = {"RAW", "BLOCK", "LZ78-HILBERT"};
  std::printf("mode=%s\n", names[r.mode]);
  std::printf("k=%zu\n", r.k);
  std::printf("total_bits=%llu\n", static_cast<unsigned long long>(r.total_bits));
  std::printf("bits_per_site=%.6f\n", r.bits_per_site);
  std::printf("header_bits=%llu\n", static_cast<unsigned long long>(r.header_bits));
  std::printf("dictionary_bits=%llu\n", static_cast<unsigned long long>(r.dictionary_bits));
  std::printf("payload_bits=%llu\n", static_cast<unsigned long long>(r.payload_bits));
  std::printf("boundary_bits=%llu\n", static_cast<unsigned long long>(r.boundary_bits));
}

int write_row(const char* line, void* user) {
  auto* out = static_cast<std::FILE*>(user);
  if (std::fputs(line, out) < 0 || std::fputc('\n', out) == EOF || std::fflush(out) != 0) return 1;
  return 0;
}

// A block set either read from --set or built as C_m(delta) of --model.
SetPtr library_from(const std::string& set_path, const std::string& model_text, size_t d,
                    size_t side, double delta) {
  mdts_blockset* s = nullptr;
  if (!set_path.empty()) {
    check(mdts_blockset_read(set_path.c_str(), &s));
  } else if (!model_text.empty()) {
    if (side == 0) usage("building a typical set needs a block side");
    auto model = load_model(model_text);
    check(mdts_blockset_build_typical(model.get(), d, side, delta, &s));
  } else {
    usage("need --set or --model");
  }
  return SetPtr(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block statistics, typical sets and block coding on d-dimensional lattices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mdts_version());

  // gen
  auto* gen = app.add_subcommand("gen", "Sample a source model into an MDA1 file");
  std::string gen_model, gen_dims, gen_out;
  uint64_t gen_seed = 0;
  gen->add_option("--model", gen_model, "Model descriptor, e.g. bernoulli:p=0.1")->required();
  gen->add_option("--dims", gen_dims, "Shape, e.g. 256x256")->required();
  gen->add_option("--seed", gen_seed, "Seed");
  gen->add_option("--out", gen_out, "Output MDA1 path")->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Plug-in entropy-rate estimate");
  std::string est_in;
  size_t est_k = 0;
  double est_eps = 0.1;
  bool est_guard = false;
  est->add_option("--in", est_in, "MDA1 or PGM input")->required();
  est->add_option("--k", est_k, "Block side (default: k schedule)");
  est->add_option("--epsilon", est_eps, "Schedule slack");
  est->add_flag("--guard", est_guard, "Cap k so that blocks are well sampled");

  // compress / decompress
  auto* comp = app.add_subcommand("compress", "Encode MDA1 into MDTC");
  std::string comp_in, comp_out, comp_mode = "auto";
  size_t comp_k = 0;
  comp->add_option("--in", comp_in, "MDA1 or PGM input")->required();
  comp->add_option("--out", comp_out, "MDTC output")->required();
  comp->add_option("--k", comp_k, "Block side (default: smallest predicted size)");
  comp->add_option("--mode", comp_mode, "auto, block, raw or lz78")
      ->check(CLI::IsMember({"auto", "block", "raw", "lz78"}));

  auto* decomp = app.add_subcommand("decompress", "Decode MDTC into MDA1");
  std::string decomp_in, decomp_out;
  decomp->add_option("--in", decomp_in, "MDTC input")->required();
  decomp->add_option("--out", decomp_out, "MDA1 output")->required();

  // typical
  auto* typ = app.add_subcommand("typical", "Typical-set membership");
  std::string typ_in, typ_kind = "universal", typ_model, typ_set;
  double typ_h0 = 0.5, typ_delta = 0.1, typ_eps = 0.1;
  size_t typ_k = 0, typ_m = 0;
  typ->add_option("--in", typ_in, "Sample (or the block itself for --kind entropy)")->required();
  typ->add_option("--kind", typ_kind, "universal, entropy or sampling")
      ->check(CLI::IsMember({"universal", "entropy", "sampling"}));
  typ->add_option("--h0", typ_h0, "Entropy threshold per site (universal)");
  typ->add_option("--k", typ_k, "Block side (universal; default: k schedule)");
  typ->add_option("--epsilon", typ_eps, "Schedule slack (universal)");
  typ->add_option("--model", typ_model, "Source model (entropy, sampling)");
  typ->add_option("--delta", typ_delta, "Typicality slack");
  typ->add_option("--m", typ_m, "Library block side when building C_m (sampling)");
  typ->add_option("--set", typ_set, "Block-set file instead of building C_m (sampling)");

  // packing
  auto* pack = app.add_subcommand("packing", "Shifted-partition packing report");
  std::string pack_in, pack_model, pack_set;
  size_t pack_m = 0;
  double pack_delta = 0.0, pack_typical_delta = 0.1;
  pack->add_option("--in", pack_in, "Cubic sample")->required();
  pack->add_option("--set", pack_set, "Library block-set file");
  pack->add_option("--model", pack_model, "Build the library as C_m(--typical-delta) of this model");
  pack->add_option("--m", pack_m, "Library block side when building");
  pack->add_option("--typical-delta", pack_typical_delta, "Slack of the built library");
  pack->add_option("--delta", pack_delta, "Check the bounds at this delta (default: inferred)");

  // coverage
  auto* cov = app.add_subcommand("coverage", "Empirical k-block mass of a library");
  std::string cov_in, cov_model, cov_set;
  size_t cov_k = 0;
  double cov_delta = 0.1;
  uint64_t cov_random = 0, cov_seed = 0;
  cov->add_option("--in", cov_in, "Sample")->required();
  cov->add_option("--set", cov_set, "Library block-set file");
  cov->add_option("--model", cov_model, "Use C_k(--delta) of this model");
  cov->add_option("--k", cov_k, "Block side when building");
  cov->add_option("--delta", cov_delta, "Typicality slack");
  cov->add_option("--random", cov_random, "Use this many random distinct k-cubes");
  cov->add_option("--seed", cov_seed, "Seed of the random library");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a seeded parameter sweep to CSV");
  std::string exp_spec, exp_out;
  std::vector<std::string> exp_sets;
  uint64_t exp_seed = 0;
  unsigned exp_threads = 0;
  bool exp_timing = false;
  exp->add_option("--spec", exp_spec, "key=value config file")->required();
  auto* exp_seed_opt = exp->add_option("--seed", exp_seed, "Master seed (overrides the config)");
  exp->add_option("--set", exp_sets, "Override key=value (repeatable)");
  exp->add_option("--out", exp_out, "CSV path (default: stdout)");
  exp->add_option("--threads", exp_threads, "Worker threads (default: MDTS_THREADS or all cores)");
  exp->add_flag("--timing", exp_timing, "Record wall_ms (output no longer reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      const auto dims = parse_dims(gen_dims);
      auto model = load_model(gen_model);
      mdts_array* x = nullptr;
      check(mdts_generate(model.get(), dims.size(), dims.data(), gen_seed, &x));
      ArrayPtr owned(x);
      check(mdts_array_write(x, gen_out.c_str()));
    } else if (*est) {
      auto x = load_array(est_in);
      mdts_estimate e{};
      check(mdts_estimate_entropy(x.get(), est_k, est_eps, est_guard ? 1 : 0, &e));
      std::printf("estimate_bits_per_site=%.6f\n", e.bits_per_site);
      std::printf("k_used=%zu\n", e.k_used);
      std::printf("k_bound_by=%s\n", e.k_bound_by);
      std::printf("requested_k=%zu\n", e.requested_k);
      if (est_guard) std::printf("guard_k=%zu\n", e.guard_k);
      std::printf("total_blocks=%llu\n", static_cast<unsigned long long>(e.total_blocks));
      std::printf("distinct_blocks=%llu\n", static_cast<unsigned long long>(e.distinct_blocks));
      std::printf("block_entropy_bits=%.6f\n", e.block_entropy_bits);
    } else if (*comp) {
      int mode = MDTS_MODE_AUTO;
      if (comp_mode == "block") mode = MDTS_MODE_BLOCK;
      if (comp_mode == "raw") mode = MDTS_MODE_RAW;
      if (comp_mode == "lz78") mode = MDTS_MODE_LZ78_HILBERT;
      mdts_rate_report r{};
      check(mdts_compress_file(comp_in.c_str(), comp_out.c_str(), mode, comp_k, &r));
      print_rate(r);
    } else if (*decomp) {
      check(mdts_decompress_file(decomp_in.c_str(), decomp_out.c_str()));
    } else if (*typ) {
      auto x = load_array(typ_in);
      mdts_membership m{};
      if (typ_kind == "universal") {
        check(mdts_universal_membership(x.get(), typ_h0, typ_k, typ_eps, &m));
      } else if (typ_kind == "entropy") {
        if (typ_model.empty()) usage("--kind entropy needs --model");
        auto model = load_model(typ_model);
        check(mdts_entropy_typical_membership(x.get(), model.get(), typ_delta, &m));
      } else {
        auto set = library_from(typ_set, typ_model, mdts_array_dim(x.get()), typ_m, typ_delta);
        check(mdts_typical_sampling_membership(x.get(), set.get(), typ_delta, &m));
      }
      print_membership(m, mdts_array_dim(x.get()));
    } else if (*pack) {
      auto x = load_array(pack_in);
      const size_t d = mdts_array_dim(x.get());
      auto set = library_from(pack_set, pack_model, d, pack_m, pack_typical_delta);
      mdts_packing_report r{};
      check(mdts_packing(x.get(), set.get(), pack_delta, &r));
      std::printf("best_shift=");
      for (size_t i = 0; i < d; ++i) std::printf(i ? ",%zu" : "%zu", r.best_shift[i]);
      std::printf("\nlambda=%llu\n", static_cast<unsigned long long>(r.lambda));
      std::printf("shifted_blocks=%llu\n", static_cast<unsigned long long>(r.shifted_blocks));
      std::printf("shifted_fraction=%.6f\n", r.shifted_fraction);
      std::printf("overlap_matches=%llu\n", static_cast<unsigned long long>(r.overlap_matches));
      std::printf("overlap_positions=%llu\n", static_cast<unsigned long long>(r.overlap_positions));
      std::printf("overlap_fraction=%.6f\n", r.overlap_fraction);
      std::printf("lambda_sum=%llu\n", static_cast<unsigned long long>(r.lambda_sum));
      std::printf("delta_used=%.6f\n", r.delta_used);
      std::printf("applicable=%s\n", flag(r.applicable));
      std::printf("bound_a_holds=%s\n", flag(r.bound_a_holds));
      std::printf("bound_b_holds=%s\n", flag(r.bound_b_holds));
    } else if (*cov) {
      auto x = load_array(cov_in);
      const size_t d = mdts_array_dim(x.get());
      SetPtr set;
      if (cov_random > 0) {
        if (cov_k == 0) usage("--random needs --k");
        mdts_blockset* s = nullptr;
        check(mdts_blockset_random(d, cov_k, mdts_array_alphabet(x.get()), cov_random, cov_seed, &s));
        set.reset(s);
      } else {
        set = library_from(cov_set, cov_model, d, cov_k, cov_delta);
      }
      double fraction = 0.0;
      uint64_t hits = 0, total = 0;
      check(mdts_library_coverage(x.get(), set.get(), &fraction, &hits, &total));
      std::printf("coverage=%.6f\n", fraction);
      std::printf("hits=%llu\n", static_cast<unsigned long long>(hits));
      std::printf("total_blocks=%llu\n", static_cast<unsigned long long>(total));
      std::printf("library_size=%zu\n", mdts_blockset_size(set.get()));
    } else if (*exp) {
      std::ifstream in(exp_spec, std::ios::binary);
      if (!in) throw Failure{kExitData, "cannot read " + exp_spec};
      std::stringstream text;
      text << in.rdbuf();
      if (exp_seed_opt->count() > 0) exp_sets.push_back("seed=" + std::to_string(exp_seed));
      std::vector<const char*> overrides;
      for (const auto& s : exp_sets) overrides.push_back(s.c_str());

      std::FILE* out = stdout;
      if (!exp_out.empty()) {
        out = std::fopen(exp_out.c_str(), "wb");
        if (!out) throw Failure{kExitData, "cannot write " + exp_out};
      }
      write_row(mdts_experiment_header(), out);
      const mdts_status st = mdts_experiment_run(text.str().c_str(), overrides.data(), overrides.size(),
                                                 exp_threads, exp_timing ? 1 : 0, write_row, out);
      if (out != stdout) std::fclose(out);
      check(st);
    }
  } catch (const Failure& f) {
    std::fprintf(stderr, "mdts: %s\n", f.message.c_str());
    return f.code;
  }
  return 0;
}

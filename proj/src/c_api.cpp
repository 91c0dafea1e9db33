#include "mdts/mdts.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "mdts/block_set.hpp"
#include "mdts/block_stats.hpp"
#include "mdts/codec.hpp"
#include "mdts/errors.hpp"
#include "mdts/experiment.hpp"
#include "mdts/io.hpp"
#include "mdts/packing.hpp"
#include "mdts/sources.hpp"
#include "mdts/typical_sets.hpp"

struct mdts_array {
  mdts::NdArray value;
};

struct mdts_model {
  mdts::SourceModel value;
  std::string description;
};

struct mdts_blockset {
  mdts::BlockSet value;
};

namespace {

thread_local std::string last_error;

struct CallbackAbort {};

struct NullArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void require(const void* p, const char* name) {
  if (!p) throw NullArgument(std::string("null argument: ") + name);
}

template <class F>
mdts_status guarded(F&& f) noexcept {
  try {
    f();
    last_error.clear();
    return MDTS_OK;
  } catch (const NullArgument& e) {
    last_error = e.what();
    return MDTS_ERR_ARGUMENT;
  } catch (const mdts::DomainError& e) {
    last_error = e.what();
    return MDTS_ERR_DOMAIN;
  } catch (const mdts::FormatError& e) {
    last_error = e.what();
    return MDTS_ERR_FORMAT;
  } catch (const mdts::UnsupportedModelError& e) {
    last_error = e.what();
    return MDTS_ERR_UNSUPPORTED;
  } catch (const mdts::ResourceError& e) {
    last_error = e.what();
    return MDTS_ERR_RESOURCE;
  } catch (const mdts::IoError& e) {
    last_error = e.what();
    return MDTS_ERR_IO;
  } catch (const CallbackAbort&) {
    last_error = "aborted by row callback";
    return MDTS_ERR_IO;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return MDTS_ERR_RESOURCE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return MDTS_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return MDTS_ERR_INTERNAL;
  }
}

mdts::Dims to_dims(size_t d, const size_t* dims) {
  if (d == 0 || d > mdts::kMaxDim) throw mdts::DomainError("dimension must be 1..3");
  require(dims, "dims");
  return mdts::Dims(dims, dims + d);
}

void fill(mdts_membership* out, const mdts::MembershipResult& r) {
  *out = mdts_membership{};
  out->member = r.member ? 1 : 0;
  out->statistic = r.statistic;
  out->k_used = r.k_used;
  if (r.witness_shift) {
    out->has_witness = 1;
    for (size_t i = 0; i < r.witness_shift->p.size(); ++i) out->witness[i] = r.witness_shift->p[i];
  }
}

void fill(mdts_rate_report* out, const mdts::CompressedStream& s) {
  const auto rate = s.rate();
  out->mode = static_cast<int>(s.mode);
  out->k = s.k;
  out->total_bits = rate.total_bits;
  out->bits_per_site = rate.bits_per_site;
  out->header_bits = rate.header_bits;
  out->dictionary_bits = rate.dictionary_bits;
  out->payload_bits = rate.payload_bits;
  out->boundary_bits = rate.boundary_bits;
  out->payload_bit_length = s.payload.bit_length;
}

mdts::CompressedStream encode_with(const mdts::NdArray& x, int mode, size_t k) {
  switch (mode) {
    case MDTS_MODE_AUTO: {
      mdts::EncodeOptions opt;
      if (k) opt.k = k;
      return mdts::encode(x, opt);
    }
    case MDTS_MODE_RAW: return mdts::encode_raw(x);
    case MDTS_MODE_BLOCK: {
      mdts::EncodeOptions opt;
      if (k) opt.k = k;
      opt.allow_raw_fallback = false;
      return mdts::encode(x, opt);
    }
    case MDTS_MODE_LZ78_HILBERT: return mdts::encode_lz78_hilbert(x);
  }
  throw NullArgument("unknown codec mode " + std::to_string(mode));
}

}  // namespace

extern "C" {

const char* mdts_last_error(void) { return last_error.c_str(); }

const char* mdts_status_name(mdts_status status) {
  switch (status) {
    case MDTS_OK: return "ok";
    case MDTS_ERR_DOMAIN: return "domain error";
    case MDTS_ERR_FORMAT: return "format error";
    case MDTS_ERR_UNSUPPORTED: return "unsupported model";
    case MDTS_ERR_RESOURCE: return "resource limit";
    case MDTS_ERR_IO: return "i/o error";
    case MDTS_ERR_ARGUMENT: return "invalid argument";
    case MDTS_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* mdts_version(void) { return "1.0.0"; }

mdts_status mdts_array_create(unsigned alphabet_size, size_t d, const size_t* dims,
                              const uint8_t* symbols, mdts_array** out) {
  return guarded([&] {
    require(out, "out");
    auto shape = to_dims(d, dims);
    size_t vol = 1;
    for (size_t n : shape) vol *= n;
    require(symbols, "symbols");
    *out = new mdts_array{mdts::NdArray(mdts::Alphabet(alphabet_size), shape,
                                        std::vector<uint8_t>(symbols, symbols + vol))};
  });
}

void mdts_array_free(mdts_array* a) { delete a; }

mdts_status mdts_array_read(const char* path, mdts_array** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new mdts_array{mdts::read_array(path)};
  });
}

mdts_status mdts_array_write(const mdts_array* a, const char* path) {
  return guarded([&] {
    require(a, "array");
    require(path, "path");
    mdts::write_mda(path, a->value);
  });
}

size_t mdts_array_dim(const mdts_array* a) { return a ? a->value.dim() : 0; }

size_t mdts_array_side(const mdts_array* a, size_t axis) {
  return a && axis < a->value.dim() ? a->value.dims()[axis] : 0;
}

size_t mdts_array_volume(const mdts_array* a) { return a ? a->value.volume() : 0; }

unsigned mdts_array_alphabet(const mdts_array* a) { return a ? a->value.alphabet().size() : 0; }

const uint8_t* mdts_array_data(const mdts_array* a) { return a ? a->value.data().data() : nullptr; }

int mdts_array_equal(const mdts_array* a, const mdts_array* b) {
  return a && b && a->value == b->value ? 1 : 0;
}

mdts_status mdts_model_parse(const char* descriptor, mdts_model** out) {
  return guarded([&] {
    require(descriptor, "descriptor");
    require(out, "out");
    auto model = mdts::SourceModel::parse(descriptor);
    auto text = model.describe();
    *out = new mdts_model{std::move(model), std::move(text)};
  });
}

void mdts_model_free(mdts_model* m) { delete m; }

const char* mdts_model_describe(const mdts_model* m) { return m ? m->description.c_str() : ""; }

unsigned mdts_model_alphabet(const mdts_model* m) { return m ? m->value.alphabet().size() : 0; }

mdts_status mdts_model_entropy_rate(const mdts_model* m, double* out) {
  return guarded([&] {
    require(m, "model");
    require(out, "out");
    const auto h = m->value.exact_entropy_rate();
    if (!h) throw mdts::UnsupportedModelError("no closed-form entropy rate for " + m->description);
    *out = *h;
  });
}

mdts_status mdts_generate(const mdts_model* m, size_t d, const size_t* dims, uint64_t seed,
                          mdts_array** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "out");
    *out = new mdts_array{mdts::generate(m->value, to_dims(d, dims), seed)};
  });
}

mdts_status mdts_estimate_entropy(const mdts_array* x, size_t k, double epsilon,
                                  int well_sampled_guard, mdts_estimate* out) {
  return guarded([&] {
    require(x, "array");
    require(out, "out");
    mdts::EstimateOptions opt;
    if (k) opt.k = k;
    opt.epsilon = epsilon;
    opt.well_sampled_guard = well_sampled_guard != 0;
    const auto est = mdts::estimate_entropy_rate(x->value, opt);
    *out = mdts_estimate{};
    out->bits_per_site = est.bits_per_site;
    out->block_entropy_bits = est.block_entropy_bits;
    out->k_used = est.k_used;
    out->requested_k = est.requested_k;
    out->guard_k = est.guard_k;
    out->total_blocks = est.total_blocks;
    out->distinct_blocks = est.distinct_blocks;
    std::strncpy(out->k_bound_by, est.k_bound_by.c_str(), sizeof out->k_bound_by - 1);
  });
}

mdts_status mdts_blockset_build_typical(const mdts_model* m, size_t d, size_t side, double delta,
                                        mdts_blockset** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "out");
    *out = new mdts_blockset{mdts::build_entropy_typical_set(m->value, d, side, delta)};
  });
}

mdts_status mdts_blockset_random(size_t d, size_t side, unsigned alphabet_size, uint64_t size,
                                 uint64_t seed, mdts_blockset** out) {
  return guarded([&] {
    require(out, "out");
    *out = new mdts_blockset{
        mdts::random_library(d, side, mdts::Alphabet(alphabet_size), size, seed)};
  });
}

mdts_status mdts_blockset_read(const char* path, mdts_blockset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto bytes = mdts::read_file(path);
    *out = new mdts_blockset{
        mdts::BlockSet::parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()))};
  });
}

mdts_status mdts_blockset_write(const mdts_blockset* s, const char* path) {
  return guarded([&] {
    require(s, "blockset");
    require(path, "path");
    mdts::write_text_file(path, s->value.serialize());
  });
}

size_t mdts_blockset_size(const mdts_blockset* s) { return s ? s->value.size() : 0; }

size_t mdts_blockset_side(const mdts_blockset* s) { return s ? s->value.m() : 0; }

void mdts_blockset_free(mdts_blockset* s) { delete s; }

mdts_status mdts_entropy_typical_membership(const mdts_array* block, const mdts_model* m,
                                            double delta, mdts_membership* out) {
  return guarded([&] {
    require(block, "block");
    require(m, "model");
    require(out, "out");
    fill(out, mdts::entropy_typical_membership(block->value, m->value, delta));
  });
}

mdts_status mdts_typical_sampling_membership(const mdts_array* x, const mdts_blockset* cm,
                                             double delta, mdts_membership* out) {
  return guarded([&] {
    require(x, "array");
    require(cm, "blockset");
    require(out, "out");
    fill(out, mdts::typical_sampling_membership(x->value, cm->value, delta));
  });
}

mdts_status mdts_universal_membership(const mdts_array* x, double h0, size_t k, double epsilon,
                                      mdts_membership* out) {
  return guarded([&] {
    require(x, "array");
    require(out, "out");
    mdts::UniversalSchedule sched;
    if (k) sched.k = k;
    sched.epsilon = epsilon;
    fill(out, mdts::universal_typical_membership(x->value, h0, sched));
  });
}

mdts_status mdts_library_coverage(const mdts_array* x, const mdts_blockset* library,
                                  double* fraction, uint64_t* hits, uint64_t* total) {
  return guarded([&] {
    require(x, "array");
    require(library, "library");
    uint64_t t = 0;
    const uint64_t h = mdts::library_hits(x->value, library->value.m(), library->value, &t);
    if (fraction) *fraction = static_cast<double>(h) / static_cast<double>(t);
    if (hits) *hits = h;
    if (total) *total = t;
  });
}

mdts_status mdts_cardinality_bound(size_t n, size_t k, double h0, unsigned alphabet_size, size_t d,
                                   double* bits) {
  return guarded([&] {
    require(bits, "bits");
    *bits = mdts::typical_set_log_cardinality_bound(n, k, h0, alphabet_size, d);
  });
}

mdts_status mdts_packing(const mdts_array* x, const mdts_blockset* c, double delta,
                         mdts_packing_report* out) {
  return guarded([&] {
    require(x, "array");
    require(c, "blockset");
    require(out, "out");
    mdts::PackingReport rep;
    int applicable = 1;
    if (delta > 0.0) {
      const auto check = mdts::verify_packing_bounds(x->value, c->value, c->value.m(), delta);
      rep = check.report;
      applicable = check.applicable ? 1 : 0;
    } else {
      rep = mdts::find_packing_shift(x->value, c->value, c->value.m());
    }
    *out = mdts_packing_report{};
    for (size_t i = 0; i < rep.best_shift.p.size(); ++i) out->best_shift[i] = rep.best_shift.p[i];
    out->lambda = rep.lambda;
    out->shifted_blocks = rep.shifted_blocks;
    out->shifted_fraction = rep.shifted_fraction;
    out->overlap_matches = rep.overlap_matches;
    out->overlap_positions = rep.overlap_positions;
    out->overlap_fraction = rep.overlap_fraction;
    out->lambda_sum = rep.lambda_sum;
    out->delta_used = rep.delta_used;
    out->applicable = applicable;
    out->bound_a_holds = rep.bound_a_holds ? 1 : 0;
    out->bound_b_holds = rep.bound_b_holds ? 1 : 0;
  });
}

mdts_status mdts_compress(const mdts_array* x, int mode, size_t k, uint8_t** bytes, size_t* length,
                          mdts_rate_report* report) {
  return guarded([&] {
    require(x, "array");
    require(bytes, "bytes");
    require(length, "length");
    const auto stream = encode_with(x->value, mode, k);
    const auto buf = stream.serialize();
    auto* mem = static_cast<uint8_t*>(std::malloc(buf.empty() ? 1 : buf.size()));
    if (!mem) throw std::bad_alloc();
    std::memcpy(mem, buf.data(), buf.size());
    *bytes = mem;
    *length = buf.size();
    if (report) fill(report, stream);
  });
}

mdts_status mdts_decompress(const uint8_t* bytes, size_t length, mdts_array** out) {
  return guarded([&] {
    require(bytes, "bytes");
    require(out, "out");
    *out = new mdts_array{mdts::decompress(std::span<const uint8_t>(bytes, length))};
  });
}

void mdts_bytes_free(uint8_t* bytes) { std::free(bytes); }

mdts_status mdts_compress_file(const char* in_path, const char* out_path, int mode, size_t k,
                               mdts_rate_report* report) {
  return guarded([&] {
    require(in_path, "in_path");
    require(out_path, "out_path");
    const auto x = mdts::read_array(in_path);
    const auto stream = encode_with(x, mode, k);
    mdts::write_file(out_path, stream.serialize());
    if (report) fill(report, stream);
  });
}

mdts_status mdts_decompress_file(const char* in_path, const char* out_path) {
  return guarded([&] {
    require(in_path, "in_path");
    require(out_path, "out_path");
    mdts::write_mda(out_path, mdts::decompress(mdts::read_file(in_path)));
  });
}

mdts_status mdts_compare_rates(const mdts_array* x, mdts_rate_comparison* out) {
  return guarded([&] {
    require(x, "array");
    require(out, "out");
    const auto r = mdts::compare_rates(x->value);
    out->block_rate = r.block_rate;
    out->lz78_hilbert_rate = r.lz78_hilbert_rate;
    out->raw_rate = r.raw_rate;
    out->block_k = r.block_k;
    out->block_mode = static_cast<int>(r.block_mode);
  });
}

const char* mdts_experiment_header(void) {
  static const std::string header = mdts::experiment_csv_header();
  return header.c_str();
}

mdts_status mdts_experiment_run(const char* config_text, const char* const* overrides,
                                size_t n_overrides, unsigned threads, int timing,
                                mdts_row_callback callback, void* user) {
  return guarded([&] {
    require(config_text, "config_text");
    if (!callback) throw NullArgument("null argument: callback");
    auto spec = mdts::ExperimentSpec::parse(config_text);
    for (size_t i = 0; i < n_overrides; ++i) {
      require(overrides, "overrides");
      require(overrides[i], "override");
      const std::string_view kv(overrides[i]);
      const auto eq = kv.find('=');
      if (eq == std::string_view::npos) {
        throw mdts::DomainError("override must be key=value: " + std::string(kv));
      }
      spec.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    mdts::ExperimentOptions opt;
    opt.threads = threads;
    opt.timing = timing != 0;
    mdts::run_experiment(spec, opt, [&](const mdts::ExperimentRow& row) {
      if (callback(row.to_csv().c_str(), user) != 0) throw CallbackAbort{};
    });
  });
}

}  // extern "C"

/* C interface to the mdts library. All handles are opaque; every fallible call
 * returns an mdts_status and leaves a message for mdts_last_error(). */
#ifndef MDTS_H
#define MDTS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MDTS_BUILDING)
#    define MDTS_API __declspec(dllexport)
#  else
#    define MDTS_API __declspec(dllimport)
#  endif
#else
#  define MDTS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdts_status {
  MDTS_OK = 0,
  MDTS_ERR_DOMAIN = 1,      /* precondition violated */
  MDTS_ERR_FORMAT = 2,      /* malformed input data */
  MDTS_ERR_UNSUPPORTED = 3, /* model lacks closed-form marginals */
  MDTS_ERR_RESOURCE = 4,    /* enumeration guard exceeded */
  MDTS_ERR_IO = 5,
  MDTS_ERR_ARGUMENT = 6,    /* null pointer or bad enum */
  MDTS_ERR_INTERNAL = 7
} mdts_status;

typedef struct mdts_array mdts_array;
typedef struct mdts_model mdts_model;
typedef struct mdts_blockset mdts_blockset;

/* Message of the last failure on this thread, "" if none. */
MDTS_API const char* mdts_last_error(void);
MDTS_API const char* mdts_status_name(mdts_status status);
MDTS_API const char* mdts_version(void);

/* ---- arrays ---- */
MDTS_API mdts_status mdts_array_create(unsigned alphabet_size, size_t d, const size_t* dims,
                                       const uint8_t* symbols, mdts_array** out);
MDTS_API void mdts_array_free(mdts_array* a);
/* Reads MDA1 or binary PGM. */
MDTS_API mdts_status mdts_array_read(const char* path, mdts_array** out);
MDTS_API mdts_status mdts_array_write(const mdts_array* a, const char* path);
MDTS_API size_t mdts_array_dim(const mdts_array* a);
MDTS_API size_t mdts_array_side(const mdts_array* a, size_t axis);
MDTS_API size_t mdts_array_volume(const mdts_array* a);
MDTS_API unsigned mdts_array_alphabet(const mdts_array* a);
MDTS_API const uint8_t* mdts_array_data(const mdts_array* a);
MDTS_API int mdts_array_equal(const mdts_array* a, const mdts_array* b);

/* ---- source models ---- */
/* Descriptors: "iid:p=0.9,0.1", "bernoulli:p=0.1", "markov:P=0.9,0.1/0.1,0.9;axis=0",
 * "ising:beta=0.4;sweeps=200", "periodic:dims=2x2;tile=0,1,1,0;A=2". */
MDTS_API mdts_status mdts_model_parse(const char* descriptor, mdts_model** out);
MDTS_API void mdts_model_free(mdts_model* m);
/* Canonical descriptor; owned by the handle. */
MDTS_API const char* mdts_model_describe(const mdts_model* m);
MDTS_API unsigned mdts_model_alphabet(const mdts_model* m);
/* MDTS_ERR_UNSUPPORTED when the rate has no closed form. */
MDTS_API mdts_status mdts_model_entropy_rate(const mdts_model* m, double* out);
MDTS_API mdts_status mdts_generate(const mdts_model* m, size_t d, const size_t* dims, uint64_t seed,
                                   mdts_array** out);

/* ---- entropy estimation ---- */
typedef struct mdts_estimate {
  double bits_per_site;
  double block_entropy_bits;
  size_t k_used;
  size_t requested_k;
  size_t guard_k;            /* 0 unless the guard ran */
  uint64_t total_blocks;
  uint64_t distinct_blocks;
  char k_bound_by[16];       /* explicit, schedule, array or guard */
} mdts_estimate;

/* k = 0 selects the k schedule with the given epsilon. */
MDTS_API mdts_status mdts_estimate_entropy(const mdts_array* x, size_t k, double epsilon,
                                           int well_sampled_guard, mdts_estimate* out);

/* ---- block sets and typicality ---- */
typedef struct mdts_membership {
  int member;
  double statistic;
  size_t k_used;
  int has_witness;
  size_t witness[3];
} mdts_membership;

MDTS_API mdts_status mdts_blockset_build_typical(const mdts_model* m, size_t d, size_t side,
                                                 double delta, mdts_blockset** out);
MDTS_API mdts_status mdts_blockset_random(size_t d, size_t side, unsigned alphabet_size,
                                          uint64_t size, uint64_t seed, mdts_blockset** out);
MDTS_API mdts_status mdts_blockset_read(const char* path, mdts_blockset** out);
MDTS_API mdts_status mdts_blockset_write(const mdts_blockset* s, const char* path);
MDTS_API size_t mdts_blockset_size(const mdts_blockset* s);
MDTS_API size_t mdts_blockset_side(const mdts_blockset* s);
MDTS_API void mdts_blockset_free(mdts_blockset* s);

MDTS_API mdts_status mdts_entropy_typical_membership(const mdts_array* block, const mdts_model* m,
                                                     double delta, mdts_membership* out);
MDTS_API mdts_status mdts_typical_sampling_membership(const mdts_array* x, const mdts_blockset* cm,
                                                      double delta, mdts_membership* out);
/* k = 0 selects the k schedule with the given epsilon. */
MDTS_API mdts_status mdts_universal_membership(const mdts_array* x, double h0, size_t k,
                                               double epsilon, mdts_membership* out);
MDTS_API mdts_status mdts_library_coverage(const mdts_array* x, const mdts_blockset* library,
                                           double* fraction, uint64_t* hits, uint64_t* total);
MDTS_API mdts_status mdts_cardinality_bound(size_t n, size_t k, double h0, unsigned alphabet_size,
                                            size_t d, double* bits);

/* ---- packing ---- */
typedef struct mdts_packing_report {
  size_t best_shift[3];
  uint64_t lambda;
  uint64_t shifted_blocks;
  double shifted_fraction;
  uint64_t overlap_matches;
  uint64_t overlap_positions;
  double overlap_fraction;
  uint64_t lambda_sum;
  double delta_used;
  int applicable;            /* always 1 when delta was inferred */
  int bound_a_holds;
  int bound_b_holds;
} mdts_packing_report;

/* delta <= 0 infers the smallest admissible delta. */
MDTS_API mdts_status mdts_packing(const mdts_array* x, const mdts_blockset* c, double delta,
                                  mdts_packing_report* out);

/* ---- codec ---- */
typedef enum mdts_codec_mode {
  MDTS_MODE_AUTO = -1,
  MDTS_MODE_RAW = 0,
  MDTS_MODE_BLOCK = 1,
  MDTS_MODE_LZ78_HILBERT = 2
} mdts_codec_mode;

typedef struct mdts_rate_report {
  int mode;
  size_t k;
  uint64_t total_bits;
  double bits_per_site;
  uint64_t header_bits;
  uint64_t dictionary_bits;
  uint64_t payload_bits;
  uint64_t boundary_bits;
  uint64_t payload_bit_length;
} mdts_rate_report;

/* mode AUTO: block code with RAW fallback; k = 0 chooses k by size. The
 * returned buffer is released with mdts_bytes_free. report may be NULL. */
MDTS_API mdts_status mdts_compress(const mdts_array* x, int mode, size_t k, uint8_t** bytes,
                                   size_t* length, mdts_rate_report* report);
MDTS_API mdts_status mdts_decompress(const uint8_t* bytes, size_t length, mdts_array** out);
MDTS_API void mdts_bytes_free(uint8_t* bytes);
MDTS_API mdts_status mdts_compress_file(const char* in_path, const char* out_path, int mode,
                                        size_t k, mdts_rate_report* report);
MDTS_API mdts_status mdts_decompress_file(const char* in_path, const char* out_path);

typedef struct mdts_rate_comparison {
  double block_rate;
  double lz78_hilbert_rate;
  double raw_rate;
  size_t block_k;
  int block_mode;
} mdts_rate_comparison;

MDTS_API mdts_status mdts_compare_rates(const mdts_array* x, mdts_rate_comparison* out);

/* ---- experiment sweeps ---- */
/* Receives one CSV line (no newline). A nonzero return aborts the run with
 * MDTS_ERR_IO. */
typedef int (*mdts_row_callback)(const char* csv_line, void* user);

MDTS_API const char* mdts_experiment_header(void);
/* overrides are "key=value" strings applied after the config text. threads = 0
 * uses MDTS_THREADS or the hardware concurrency. */
MDTS_API mdts_status mdts_experiment_run(const char* config_text, const char* const* overrides,
                                         size_t n_overrides, unsigned threads, int timing,
                                         mdts_row_callback callback, void* user);

#ifdef __cplusplus
}
#endif

#endif /* MDTS_H */

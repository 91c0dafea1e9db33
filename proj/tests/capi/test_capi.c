/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "mdts/mdts.h"

static int failed = 0;

#define EXPECT(cond)                                                 \
  do {                                                               \
    if (!(cond)) {                                                   \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      ++failed;                                                      \
    }                                                                \
  } while (0)

#define EXPECT_STATUS(call, want)                                                       \
  do {                                                                                  \
    mdts_status st_ = (call);                                                           \
    if (st_ != (want)) {                                                                \
      fprintf(stderr, "%s:%d: %s returned %s (%s)\n", __FILE__, __LINE__, #call,         \
              mdts_status_name(st_), mdts_last_error());                                 \
      ++failed;                                                                         \
    }                                                                                   \
  } while (0)

static mdts_array* checkerboard(void) {
  uint8_t v[16];
  size_t dims[2] = {4, 4};
  mdts_array* a = NULL;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) v[i * 4 + j] = (uint8_t)((i + j) % 2);
  EXPECT_STATUS(mdts_array_create(2, 2, dims, v, &a), MDTS_OK);
  return a;
}

struct rows {
  int count;
  int stop_after;
  char first[512];
};

static int collect(const char* line, void* user) {
  struct rows* r = (struct rows*)user;
  if (r->count == 0) snprintf(r->first, sizeof r->first, "%s", line);
  ++r->count;
  return r->stop_after > 0 && r->count >= r->stop_after;
}

static void test_arrays_and_errors(const char* dir) {
  mdts_array* a = checkerboard();
  mdts_array* b = NULL;
  mdts_model* m = NULL;
  char path[1024];
  double rate = 0;
  size_t dims[2] = {4, 4};
  uint8_t bad[16] = {0, 0, 3};

  EXPECT(strlen(mdts_version()) > 0);
  EXPECT(mdts_array_dim(a) == 2);
  EXPECT(mdts_array_side(a, 1) == 4);
  EXPECT(mdts_array_volume(a) == 16);
  EXPECT(mdts_array_alphabet(a) == 2);
  EXPECT(mdts_array_data(a)[1] == 1);

  snprintf(path, sizeof path, "%s/capi_board.mda", dir);
  EXPECT_STATUS(mdts_array_write(a, path), MDTS_OK);
  EXPECT_STATUS(mdts_array_read(path, &b), MDTS_OK);
  EXPECT(mdts_array_equal(a, b));
  mdts_array_free(b);
  b = NULL;

  EXPECT_STATUS(mdts_array_create(2, 2, dims, bad, &b), MDTS_ERR_DOMAIN);
  EXPECT(strlen(mdts_last_error()) > 0);
  EXPECT_STATUS(mdts_array_create(2, 2, dims, NULL, &b), MDTS_ERR_ARGUMENT);
  EXPECT_STATUS(mdts_array_read("/nonexistent/dir/x.mda", &b), MDTS_ERR_IO);
  EXPECT_STATUS(mdts_model_parse("gauss:s=1", &m), MDTS_ERR_DOMAIN);
  EXPECT_STATUS(mdts_model_parse("ising:beta=0.3", &m), MDTS_OK);
  EXPECT_STATUS(mdts_model_entropy_rate(m, &rate), MDTS_ERR_UNSUPPORTED);
  mdts_model_free(m);
  EXPECT_STATUS(mdts_model_parse("bernoulli:p=0.1", &m), MDTS_OK);
  EXPECT(strcmp(mdts_model_describe(m), "iid:p=0.9,0.1") == 0);
  EXPECT_STATUS(mdts_model_entropy_rate(m, &rate), MDTS_OK);
  EXPECT(fabs(rate - 0.4689955935892812) < 1e-12);
  mdts_model_free(m);
  EXPECT(strcmp(mdts_status_name(MDTS_ERR_FORMAT), "format error") == 0);
  EXPECT(strcmp(mdts_status_name((mdts_status)42), "unknown status") == 0);

  /* Null handles are argument errors, never crashes. */
  EXPECT_STATUS(mdts_array_write(NULL, path), MDTS_ERR_ARGUMENT);
  mdts_array_free(NULL);
  mdts_array_free(a);
}

static void test_estimation_and_typicality(void) {
  mdts_array* a = checkerboard();
  mdts_array* zero = NULL;
  mdts_blockset* lib = NULL;
  mdts_membership mem;
  mdts_estimate est;
  mdts_packing_report pr;
  double frac = 0, bits = 0;
  uint64_t hits = 0, total = 0;
  size_t dims[2] = {64, 64};
  uint8_t* zeros = calloc(64 * 64, 1);

  EXPECT_STATUS(mdts_array_create(2, 2, dims, zeros, &zero), MDTS_OK);
  free(zeros);
  EXPECT_STATUS(mdts_estimate_entropy(zero, 0, 0.1, 0, &est), MDTS_OK);
  EXPECT(est.bits_per_site == 0.0);
  EXPECT(est.distinct_blocks == 1);
  EXPECT(strcmp(est.k_bound_by, "schedule") == 0);
  EXPECT_STATUS(mdts_estimate_entropy(zero, 0, 0.1, 1, &est), MDTS_OK);
  EXPECT(est.guard_k == 2);
  EXPECT_STATUS(mdts_estimate_entropy(zero, 65, 0.1, 0, &est), MDTS_ERR_DOMAIN);
  mdts_array_free(zero);

  EXPECT_STATUS(mdts_blockset_random(2, 2, 2, 16, 1, &lib), MDTS_OK);
  EXPECT(mdts_blockset_size(lib) == 16);
  EXPECT_STATUS(mdts_typical_sampling_membership(a, lib, 0.1, &mem), MDTS_OK);
  EXPECT(mem.member);
  EXPECT(mem.has_witness && mem.witness[0] == 0 && mem.witness[1] == 0);
  EXPECT(mem.statistic == 1.0);
  EXPECT_STATUS(mdts_library_coverage(a, lib, &frac, &hits, &total), MDTS_OK);
  EXPECT(frac == 1.0 && hits == 4 && total == 4);
  EXPECT_STATUS(mdts_packing(a, lib, 0.0, &pr), MDTS_OK);
  EXPECT(pr.lambda == 4 && pr.overlap_fraction == 1.0 && pr.lambda_sum == pr.overlap_matches);
  mdts_blockset_free(lib);

  EXPECT_STATUS(mdts_universal_membership(a, 0.5, 2, 0.1, &mem), MDTS_OK);
  EXPECT(mem.member && mem.k_used == 2 && mem.statistic == 0.0);
  EXPECT_STATUS(mdts_cardinality_bound(4, 1, 0.0, 2, 2, &bits), MDTS_OK);
  EXPECT(fabs(bits - 15.0) < 1e-12);
  EXPECT_STATUS(mdts_cardinality_bound(4, 5, 0.0, 2, 2, &bits), MDTS_ERR_DOMAIN);
  mdts_array_free(a);
}

static void test_codec(const char* dir) {
  mdts_model* m = NULL;
  mdts_array* x = NULL;
  mdts_array* y = NULL;
  uint8_t* bytes = NULL;
  size_t len = 0;
  size_t dims[2] = {64, 64};
  mdts_rate_report rep;
  mdts_rate_comparison cmp;
  char in[1024], out[1024], back[1024];

  EXPECT_STATUS(mdts_model_parse("bernoulli:p=0.5", &m), MDTS_OK);
  EXPECT_STATUS(mdts_generate(m, 2, dims, 9, &x), MDTS_OK);
  mdts_model_free(m);
  for (int mode = MDTS_MODE_AUTO; mode <= MDTS_MODE_LZ78_HILBERT; ++mode) {
    EXPECT_STATUS(mdts_compress(x, mode, mode == MDTS_MODE_BLOCK ? 2 : 0, &bytes, &len, &rep), MDTS_OK);
    EXPECT(rep.total_bits == 8 * (uint64_t)len);
    EXPECT(rep.header_bits + rep.dictionary_bits + rep.payload_bits + rep.boundary_bits == rep.total_bits);
    EXPECT_STATUS(mdts_decompress(bytes, len, &y), MDTS_OK);
    EXPECT(mdts_array_equal(x, y));
    mdts_array_free(y);
    y = NULL;
    bytes[0] ^= 0xFF;
    EXPECT_STATUS(mdts_decompress(bytes, len, &y), MDTS_ERR_FORMAT);
    mdts_bytes_free(bytes);
  }
  EXPECT_STATUS(mdts_compress(x, 7, 0, &bytes, &len, NULL), MDTS_ERR_ARGUMENT);
  EXPECT_STATUS(mdts_compare_rates(x, &cmp), MDTS_OK);
  EXPECT(cmp.raw_rate == 1.0);

  snprintf(in, sizeof in, "%s/capi_in.mda", dir);
  snprintf(out, sizeof out, "%s/capi_out.mdtc", dir);
  snprintf(back, sizeof back, "%s/capi_back.mda", dir);
  EXPECT_STATUS(mdts_array_write(x, in), MDTS_OK);
  EXPECT_STATUS(mdts_compress_file(in, out, MDTS_MODE_AUTO, 0, &rep), MDTS_OK);
  EXPECT_STATUS(mdts_decompress_file(out, back), MDTS_OK);
  EXPECT_STATUS(mdts_array_read(back, &y), MDTS_OK);
  EXPECT(mdts_array_equal(x, y));
  mdts_array_free(y);
  mdts_array_free(x);
}

static void test_experiment(void) {
  const char* config = "models = bernoulli:p=0.2\nn = 16\nreplicates = 3\nmetrics = estimate,member\n";
  const char* overrides[] = {"seed=5"};
  struct rows r = {0, 0, ""};
  struct rows stop = {0, 2, ""};

  EXPECT(strncmp(mdts_experiment_header(), "cell,model,n,d,k,", 17) == 0);
  EXPECT_STATUS(mdts_experiment_run(config, overrides, 1, 2, 0, collect, &r), MDTS_OK);
  EXPECT(r.count == 6);
  EXPECT(strncmp(r.first, "0,\"iid:p=0.8,0.2\",16,2,", 23) == 0);
  EXPECT_STATUS(mdts_experiment_run(config, NULL, 0, 1, 0, collect, &stop), MDTS_ERR_IO);
  EXPECT(stop.count == 2);
  EXPECT_STATUS(mdts_experiment_run("bogus = 1\n", NULL, 0, 1, 0, collect, &r), MDTS_ERR_DOMAIN);
  EXPECT_STATUS(mdts_experiment_run(config, NULL, 0, 1, 0, NULL, NULL), MDTS_ERR_ARGUMENT);
}

int main(int argc, char** argv) {
  const char* dir = argc > 1 ? argv[1] : ".";
  test_arrays_and_errors(dir);
  test_estimation_and_typicality();
  test_codec(dir);
  test_experiment();
  if (failed) {
    fprintf(stderr, "%d C API checks failed\n", failed);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}

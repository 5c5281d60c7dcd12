#ifndef BSFILL_H
#define BSFILL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BsfStatus {
  BSF_STATUS_OK = 0,
  BSF_STATUS_NULL_POINTER = 1,
  BSF_STATUS_INVALID_ARGUMENT = 2,
  BSF_STATUS_CAPACITY = 3,
  BSF_STATUS_NOT_UNITARY = 4,
  BSF_STATUS_STARVATION = 5,
  BSF_STATUS_PARSE = 6,
  BSF_STATUS_IO = 7,
  BSF_STATUS_MISMATCH = 8,
  BSF_STATUS_NUMERIC = 9,
  BSF_STATUS_PANIC = 10,
} BsfStatus;

typedef enum BsfSampler {
  BSF_SAMPLER_BOSON = 0,
  BSF_SAMPLER_DISTINGUISHABLE = 1,
  BSF_SAMPLER_MEAN_FIELD = 2,
  BSF_SAMPLER_UNIFORM = 3,
} BsfSampler;

typedef enum BsfSampleFormat {
  BSF_SAMPLE_FORMAT_OCCUPATION = 0,
  BSF_SAMPLE_FORMAT_MODE_LIST = 1,
} BsfSampleFormat;

// Opaque set of distinct samples.
typedef struct BsfSampleSet BsfSampleSet;

// Opaque interferometer matrix.
typedef struct BsfUnitary BsfUnitary;

typedef struct BsfDegreeStats {
  size_t n_samples;
  double mu;
  double sigma;
} BsfDegreeStats;

// Filling experiment with the default checkpoint grid.
typedef struct BsfPlan {
  size_t modes;
  uint32_t photons;
  enum BsfSampler sampler;
  // Nonzero: fresh Haar unitary per iteration; the unitary argument is ignored.
  uint8_t varied_unitary;
  size_t iterations;
  size_t n_max;
  uint32_t radius;
  uint64_t seed;
  uint8_t collision_free;
} BsfPlan;

// `(alpha_mu, alpha_sigma, beta_sigma)` with their errors.
typedef struct BsfFingerprint {
  size_t modes;
  uint32_t photons;
  uint32_t radius;
  double values[3];
  double errors[3];
} BsfFingerprint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message (NUL-terminated, truncated
// to `len`) into `buf` and returns the full message length without the NUL.
// Pass a null `buf` to query the length.
size_t bsf_last_error_message(char *buf, size_t len);

// Haar-random `m x m` unitary, deterministic in `seed`.
enum BsfStatus bsf_unitary_haar(size_t m, uint64_t seed, struct BsfUnitary **out);

// Unitary from `m * m` row-major entries; fails if not unitary.
enum BsfStatus bsf_unitary_from_entries(size_t m,
                                        const double *re,
                                        const double *im,
                                        struct BsfUnitary **out);

enum BsfStatus bsf_unitary_read(const char *path, struct BsfUnitary **out);

enum BsfStatus bsf_unitary_write(const struct BsfUnitary *u, const char *path);

// Dimension of `u`, or 0 for a null handle.
size_t bsf_unitary_dim(const struct BsfUnitary *u);

enum BsfStatus bsf_unitary_entry(const struct BsfUnitary *u,
                                 size_t row,
                                 size_t col,
                                 double *re,
                                 double *im);

void bsf_unitary_free(struct BsfUnitary *u);

// Permanent of a `k x k` row-major complex matrix.
enum BsfStatus bsf_permanent(size_t k,
                             const double *re,
                             const double *im,
                             double *out_re,
                             double *out_im);

// Number of `n`-photon occupation lists over `m` modes.
enum BsfStatus bsf_outcome_count(size_t m, uint32_t n, uint64_t *out);

// `count` distinct samples from the first `n` modes occupied. `u` may be
// null for the uniform sampler.
enum BsfStatus bsf_sample(enum BsfSampler sampler,
                          const struct BsfUnitary *u,
                          size_t m,
                          uint32_t n,
                          size_t count,
                          uint64_t seed,
                          uint8_t collision_free,
                          struct BsfSampleSet **out);

// Reads a sample file; `duplicates` (nullable) receives the dropped count.
enum BsfStatus bsf_samples_read(const char *path,
                                enum BsfSampleFormat format,
                                size_t m,
                                uint32_t n,
                                struct BsfSampleSet **out,
                                size_t *duplicates);

enum BsfStatus bsf_samples_write(const struct BsfSampleSet *set,
                                 const char *path,
                                 enum BsfSampleFormat format);

// Number of samples, or 0 for a null handle.
size_t bsf_samples_len(const struct BsfSampleSet *set);

// Mode count of every sample, or 0 for a null handle.
size_t bsf_samples_modes(const struct BsfSampleSet *set);

// Copies sample `index` into `counts`, which must hold `len >= modes` entries.
enum BsfStatus bsf_samples_get(const struct BsfSampleSet *set,
                               size_t index,
                               uint32_t *counts,
                               size_t len);

void bsf_samples_free(struct BsfSampleSet *set);

// Degree mean and population standard deviation of the radius-`radius` network.
enum BsfStatus bsf_degree_stats(const struct BsfSampleSet *set,
                                uint32_t radius,
                                struct BsfDegreeStats *out);

// Runs the filling experiment and fits its fingerprint. `u` is required for
// fixed-unitary plans with a unitary-dependent sampler.
enum BsfStatus bsf_run_fit(const struct BsfPlan *plan,
                           const struct BsfUnitary *u,
                           struct BsfFingerprint *out);

// Separation of two fingerprints; `two_param` (nullable) is set to 1 when
// `alpha_sigma` was dropped.
enum BsfStatus bsf_separation(const struct BsfFingerprint *a,
                              const struct BsfFingerprint *b,
                              double *out,
                              uint8_t *two_param);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BSFILL_H */

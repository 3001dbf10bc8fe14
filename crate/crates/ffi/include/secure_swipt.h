#ifndef SECURE_SWIPT_H
#define SECURE_SWIPT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SwiptStatus {
  SWIPT_STATUS_OK = 0,
  // A required pointer argument was null.
  SWIPT_STATUS_NULL_POINTER = 1,
  // A string was not UTF-8, an index was out of range, or a value was outside its domain.
  SWIPT_STATUS_INVALID_ARGUMENT = 2,
  // The configuration is malformed or inconsistent.
  SWIPT_STATUS_CONFIG = 3,
  // Input dimensions disagree with the network layout.
  SWIPT_STATUS_SHAPE = 4,
  // A JSON document could not be parsed.
  SWIPT_STATUS_PARSE = 5,
  SWIPT_STATUS_IO = 6,
  // The output buffer is too short; the required length was written.
  SWIPT_STATUS_BUFFER_TOO_SMALL = 7,
  SWIPT_STATUS_INTERNAL = 8,
  // A panic was caught at the boundary.
  SWIPT_STATUS_PANIC = 9,
} SwiptStatus;

typedef enum SwiptScheme {
  SWIPT_SCHEME_PROPOSED = 0,
  SWIPT_SCHEME_NO_AN = 1,
  SWIPT_SCHEME_ZF = 2,
} SwiptScheme;

// Which beamformer of a solution to read.
typedef enum SwiptBeam {
  // MBS beamformer of the macro user given by `index`.
  SWIPT_BEAM_MACRO = 0,
  // FBS information beamformer.
  SWIPT_BEAM_INFORMATION = 1,
  // FBS artificial-noise vector.
  SWIPT_BEAM_NOISE = 2,
} SwiptBeam;

typedef enum SwiptExperiment {
  // `trials` seeds on the base scenario.
  SWIPT_EXPERIMENT_BATCH = 0,
  SWIPT_EXPERIMENT_SWEEP_POWER = 1,
  SWIPT_EXPERIMENT_RUNTIME_VS_K = 2,
} SwiptExperiment;

// Channel realisation together with the network it was drawn for.
typedef struct SwiptChannel SwiptChannel;

// Experiment configuration.
typedef struct SwiptConfig SwiptConfig;

// Outcome of one scheme on one channel realisation.
typedef struct SwiptResult SwiptResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version of the library as a static NUL-terminated string.
const char *swipt_version(void);

// Message of the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *swipt_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void swipt_string_free(char *s);

// Default configuration.
//
// # Safety
// `out` must be valid for writes.
enum SwiptStatus swipt_config_new(struct SwiptConfig **out);

// Configuration read from a flat `key = value` file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writes.
enum SwiptStatus swipt_config_from_file(const char *path, struct SwiptConfig **out);

// Sets one configuration key, e.g. `network.p_th_dbm` to `"45"`.
//
// # Safety
// `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
enum SwiptStatus swipt_config_set(struct SwiptConfig *cfg, const char *key, const char *value);

// The configuration in file form.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_config_to_text(const struct SwiptConfig *cfg, char **out);

// # Safety
// `cfg` must come from this library and not have been freed. Null is ignored.
void swipt_config_free(struct SwiptConfig *cfg);

// Draws the channel realisation `seed` for the base network of `cfg`.
//
// # Safety
// `cfg` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_channel_generate(const struct SwiptConfig *cfg,
                                        uint64_t seed,
                                        struct SwiptChannel **out);

// Channel realisation parsed from JSON, checked against the base network of `cfg`.
//
// # Safety
// `cfg` must be a live handle; `json` a NUL-terminated string; `out` valid for writes.
enum SwiptStatus swipt_channel_from_json(const struct SwiptConfig *cfg,
                                         const char *json,
                                         struct SwiptChannel **out);

// # Safety
// `ch` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_channel_to_json(const struct SwiptChannel *ch, char **out);

// # Safety
// `ch` must come from this library and not have been freed. Null is ignored.
void swipt_channel_free(struct SwiptChannel *ch);

// Runs `scheme` on `ch` with the optimizer settings of `cfg`. An infeasible
// instance is not an error: the result reports `feasible = false`.
//
// # Safety
// `cfg` and `ch` must be live handles; `out` must be valid for writes.
enum SwiptStatus swipt_solve(const struct SwiptConfig *cfg,
                             const struct SwiptChannel *ch,
                             enum SwiptScheme scheme,
                             struct SwiptResult **out);

// # Safety
// `res` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_result_feasible(const struct SwiptResult *res, bool *out);

// Audited secrecy rate in bit/s/Hz, zero when infeasible.
//
// # Safety
// `res` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_result_secrecy_rate(const struct SwiptResult *res, double *out);

// SCA iterations; zero for the closed-form scheme.
//
// # Safety
// `res` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_result_iterations(const struct SwiptResult *res, size_t *out);

// Largest relative constraint violation of the solution; infinity without one.
//
// # Safety
// `res` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_result_worst_violation(const struct SwiptResult *res, double *out);

// Copies a beamformer as interleaved `(re, im)` pairs into `buf`. `len` is
// the capacity of `buf` in doubles; `written` receives the number of doubles
// needed. Pass a null `buf` to query the length. Fails with
// `SWIPT_STATUS_INVALID_ARGUMENT` when the result holds no solution.
//
// # Safety
// `res` must be a live handle, `buf` valid for `len` writes or null, and
// `written` valid for writes.
enum SwiptStatus swipt_result_beamformer(const struct SwiptResult *res,
                                         enum SwiptBeam beam,
                                         size_t index,
                                         double *buf,
                                         size_t len,
                                         size_t *written);

// The full result, including the constraint audit, as JSON.
//
// # Safety
// `res` must be a live handle; `out` must be valid for writes.
enum SwiptStatus swipt_result_to_json(const struct SwiptResult *res, char **out);

// # Safety
// `res` must come from this library and not have been freed. Null is ignored.
void swipt_result_free(struct SwiptResult *res);

// Runs an experiment and writes `results.csv`, `timings.csv` and
// `summary.json` into `out_dir`.
//
// # Safety
// `cfg` must be a live handle and `out_dir` a NUL-terminated string.
enum SwiptStatus swipt_run_experiment(const struct SwiptConfig *cfg,
                                      enum SwiptExperiment kind,
                                      const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SECURE_SWIPT_H */

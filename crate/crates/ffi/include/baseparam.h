#ifndef BASEPARAM_H
#define BASEPARAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum BpStatus {
  BP_STATUS_OK = 0,
  BP_STATUS_NULL_POINTER = 1,
  BP_STATUS_INVALID_UTF8 = 2,
  BP_STATUS_IO = 3,
  BP_STATUS_SCHEMA = 4,
  BP_STATUS_INVALID_MODEL = 5,
  BP_STATUS_OUT_OF_WORKSPACE = 6,
  BP_STATUS_NO_ACCEPTED_SAMPLES = 7,
  BP_STATUS_INVALID_ARGUMENT = 8,
  BP_STATUS_BUFFER_TOO_SMALL = 9,
  BP_STATUS_NOT_FOUND = 10,
  BP_STATUS_INTERNAL = 11,
  BP_STATUS_PANIC = 12,
} BpStatus;

/**
 * Opaque result of the nullspace analysis.
 */
typedef struct BpAnalysis BpAnalysis;

/**
 * Opaque robot model.
 */
typedef struct BpModel BpModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on this thread.
 */
const char *bp_last_error(void);

/**
 * Loads a robot description file.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BpStatus bp_model_load(const char *path, struct BpModel **out);

/**
 * Parses a robot description from JSON text.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BpStatus bp_model_from_json(const char *json, struct BpModel **out);

/**
 * Loads a bundled robot: `puma560`, `go2`, `2rru1rrs` or `2prs1psr`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum BpStatus bp_model_bundled(const char *name, struct BpModel **out);

/**
 * Replaces the apparent gravity acceleration (`0, 0, 9.81` when gravity
 * pulls along -z).
 *
 * # Safety
 * `model` must be a handle from a `bp_model_*` constructor.
 */
enum BpStatus bp_model_set_gravity(struct BpModel *model, double x, double y, double z);

/**
 * Number of bodies, or 0 for a null handle.
 *
 * # Safety
 * `model` must be null or a handle from a `bp_model_*` constructor.
 */
size_t bp_model_bodies(const struct BpModel *model);

/**
 * Releases a model. Null is ignored.
 *
 * # Safety
 * `model` must be null or a handle not yet released.
 */
void bp_model_free(struct BpModel *model);

/**
 * Computes the regressor nullspace and base space of a model.
 *
 * # Safety
 * `model` must be a valid handle and `out` a valid pointer.
 */
enum BpStatus bp_analyze(const struct BpModel *model, struct BpAnalysis **out);

/**
 * Nullspace dimension, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a handle from [`bp_analyze`].
 */
size_t bp_analysis_nullspace_dim(const struct BpAnalysis *a);

/**
 * Number of base parameters, or 0 for a null handle.
 *
 * # Safety
 * `a` must be null or a handle from [`bp_analyze`].
 */
size_t bp_analysis_base_count(const struct BpAnalysis *a);

/**
 * Copies the `10n x d` nullspace basis into `buf` in row-major order.
 * `len` is the capacity of `buf` in doubles; `*rows` and `*cols` receive
 * the shape (also when the buffer is too small).
 *
 * # Safety
 * `a` must be a valid handle; `buf` must hold `len` doubles; `rows` and
 * `cols` must be valid pointers.
 */
enum BpStatus bp_analysis_nullspace(const struct BpAnalysis *a,
                                    double *buf,
                                    size_t len,
                                    size_t *rows,
                                    size_t *cols);

/**
 * Analysis report as JSON. Release with [`bp_string_free`].
 *
 * # Safety
 * `a` must be a valid handle and `out` a valid pointer.
 */
enum BpStatus bp_analysis_report_json(const struct BpAnalysis *a, char **out);

/**
 * Releases an analysis. Null is ignored.
 *
 * # Safety
 * `a` must be null or a handle not yet released.
 */
void bp_analysis_free(struct BpAnalysis *a);

/**
 * Cross-validates the analytical nullspace against `samples` seeded
 * random samples. `*pass` receives 1 when both criteria hold, else 0;
 * `report_json`, when not null, receives the JSON report (release with
 * [`bp_string_free`]). `cond_gate` and `rank_tol` use the library
 * defaults when not positive.
 *
 * # Safety
 * `model` must be a valid handle; `pass` a valid pointer; `report_json`
 * null or a valid pointer.
 */
enum BpStatus bp_validate(const struct BpModel *model,
                          size_t samples,
                          uint64_t seed,
                          double cond_gate,
                          double rank_tol,
                          int32_t *pass,
                          char **report_json);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string returned by this library, not yet released.
 */
void bp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BASEPARAM_H */

#ifndef PCC_H
#define PCC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum PccStatus {
  PCC_STATUS_OK = 0,
  PCC_STATUS_NULL_POINTER = 1,
  PCC_STATUS_INVALID_PARAMETER = 2,
  PCC_STATUS_SHAPE = 3,
  PCC_STATUS_DOMAIN = 4,
  PCC_STATUS_PRECONDITION = 5,
  PCC_STATUS_CONVERGENCE = 6,
  PCC_STATUS_FORMAT = 7,
  PCC_STATUS_CHECKSUM = 8,
  PCC_STATUS_IO = 9,
  // A Rust panic was caught at the boundary.
  PCC_STATUS_INTERNAL = 10,
} PccStatus;

// Opaque trained model.
typedef struct PccModel PccModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Trains a model.
//
// `features` holds `n` instances of `d_x` values each, one instance after
// the other. `labels` holds `n` 1-based class labels in `1..=n_classes`.
// On success `*out` receives a handle to free with `pcc_model_free`.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum PccStatus pcc_model_fit(const double *features,
                             const uint32_t *labels,
                             size_t d_x,
                             size_t n,
                             size_t n_classes,
                             double alpha,
                             size_t n_e,
                             struct PccModel **out);

// Reads a model file written by `pcc_model_save` or the `pcc` tool.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be writable.
enum PccStatus pcc_model_load(const char *path, struct PccModel **out);

// # Safety
// `model` must come from this library; `path` must be NUL-terminated.
enum PccStatus pcc_model_save(const struct PccModel *model, const char *path);

// Releases a handle. Null is ignored.
//
// # Safety
// `model` must be null or a handle not yet freed.
void pcc_model_free(struct PccModel *model);

// Predicts the 1-based class of `x` (`x_len` must equal the feature
// dimension). `scores_out` may be null; otherwise it receives the
// `scores_len == n_classes` class scores.
//
// # Safety
// Pointers must be valid for the stated lengths.
enum PccStatus pcc_model_predict(const struct PccModel *model,
                                 const double *x,
                                 size_t x_len,
                                 uint32_t *label_out,
                                 double *scores_out,
                                 size_t scores_len);

// Like `pcc_model_predict`, with the 1-based `label` encoded in the input.
//
// # Safety
// Pointers must be valid for the stated lengths.
enum PccStatus pcc_model_predict_with_label(const struct PccModel *model,
                                            const double *x,
                                            size_t x_len,
                                            uint32_t label,
                                            uint32_t *label_out,
                                            double *scores_out,
                                            size_t scores_len);

// Feature dimension, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t pcc_model_d_x(const struct PccModel *model);

// Number of classes, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t pcc_model_n_classes(const struct PccModel *model);

// Retained components, or 0 for a null handle.
//
// # Safety
// `model` must be null or a live handle.
size_t pcc_model_n_e(const struct PccModel *model);

// Class weight α, or NaN for a null handle.
//
// # Safety
// `model` must be null or a live handle.
double pcc_model_alpha(const struct PccModel *model);

// Stored basis entries (`n_e * (d_x + n_classes)`), or 0 for null.
//
// # Safety
// `model` must be null or a live handle.
size_t pcc_model_parameter_count(const struct PccModel *model);

// Message of the last failure on this thread; empty if none. Owned by the
// library.
const char *pcc_last_error_message(void);

// Library version, NUL-terminated and static.
const char *pcc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCC_H */

#ifndef SQUASHLOGIC_H
#define SQUASHLOGIC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a call.
typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_PARAMETER = 2,
  SL_STATUS_DOMAIN = 3,
  SL_STATUS_SHAPE = 4,
  SL_STATUS_CONFIG = 5,
  SL_STATUS_DIVERGED = 6,
  SL_STATUS_IO = 7,
  SL_STATUS_IDX = 8,
  SL_STATUS_BUFFER_TOO_SMALL = 9,
  SL_STATUS_PANIC = 10,
} SlStatus;

typedef enum SlOperator {
  SL_OPERATOR_CONJUNCTION = 0,
  SL_OPERATOR_DISJUNCTION = 1,
  SL_OPERATOR_IMPLICATION = 2,
  SL_OPERATOR_MEAN = 3,
  SL_OPERATOR_PREFERENCE = 4,
  SL_OPERATOR_AGGREGATIVE = 5,
} SlOperator;

typedef enum SlActivation {
  SL_ACTIVATION_IDENTITY = 0,
  SL_ACTIVATION_RELU = 1,
  SL_ACTIVATION_SIGMOID = 2,
  SL_ACTIVATION_TANH = 3,
  // Trainable `beta`, `a = 0.5`, `lambda = 1`.
  SL_ACTIVATION_SQUASHING = 4,
  // Fixed `beta`, `a = 0.5`, `lambda = 1`.
  SL_ACTIVATION_SQUASHING_FIXED = 5,
} SlActivation;

typedef enum SlDatasetKind {
  SL_DATASET_KIND_GAUSSIAN = 0,
  SL_DATASET_KIND_CIRCLE = 1,
  SL_DATASET_KIND_SPIRAL = 2,
  SL_DATASET_KIND_TWO_LINE = 3,
  SL_DATASET_KIND_FOUR_LINE = 4,
} SlDatasetKind;

// Opaque labelled dataset.
typedef struct SlDataset SlDataset;

// Opaque trained or untrained network.
typedef struct SlNetwork SlNetwork;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the calling thread's last error message into `buf` as a
// NUL-terminated string, truncating to `len - 1` bytes. Returns the full
// message length in bytes (without the terminator).
//
// # Safety
// `buf` must be null or valid for `len` bytes.
size_t sl_last_error_message(char *buf, size_t len);

// Generalized cutting function `clamp((x - (a - lambda/2)) / lambda, 0, 1)`.
//
// # Safety
// `out_value` must be null or writable.
enum SlStatus sl_cut(double x, double a, double lambda, double *out_value);

// Squashing function and its partial derivatives at `x`. Any of the out
// pointers may be null to skip that quantity.
//
// # Safety
// Non-null out pointers must be writable.
enum SlStatus sl_squash(double x,
                        double a,
                        double lambda,
                        double beta,
                        double *out_value,
                        double *out_d_x,
                        double *out_d_beta);

// Two-input nilpotent operator. `beta <= 0` selects the crisp `[.]` clip,
// otherwise the unit Squashing with that sharpness.
//
// # Safety
// `out_value` must be null or writable.
enum SlStatus sl_operator(enum SlOperator op, double x, double y, double beta, double *out_value);

// Multi-layer perceptron over `sizes[0..n_sizes]` with Glorot-uniform
// weights from `seed`. `beta0` is the initial sharpness of squashing layers.
//
// # Safety
// `sizes` must be valid for `n_sizes` reads; `out_net` must be writable.
enum SlStatus sl_network_mlp(const size_t *sizes,
                             size_t n_sizes,
                             enum SlActivation hidden,
                             enum SlActivation output_activation,
                             double beta0,
                             uint64_t seed,
                             struct SlNetwork **out_net);

// Two-input network of `k` learned lines feeding a frozen `k`-input AND
// gate; the single output `o` is read as the class logits `(1 - o, o)`.
//
// # Safety
// `out_net` must be writable.
enum SlStatus sl_gate_network(size_t k,
                              double beta_layer1,
                              double beta_gate,
                              enum SlActivation act,
                              uint64_t seed,
                              struct SlNetwork **out_net);

// # Safety
// `net` must be null or a handle not yet freed.
void sl_network_free(struct SlNetwork *net);

// Input width and number of logits.
//
// # Safety
// `net` must be a live handle; out pointers null or writable.
enum SlStatus sl_network_shape(const struct SlNetwork *net, size_t *out_inputs, size_t *out_logits);

// Logits for `rows` row-major samples of `cols` features. `out_logits`
// receives `rows * n_logits` values.
//
// # Safety
// `x` valid for `rows * cols` reads, `out_logits` for `out_len` writes.
enum SlStatus sl_network_predict(const struct SlNetwork *net,
                                 const double *x,
                                 size_t rows,
                                 size_t cols,
                                 double *out_logits,
                                 size_t out_len);

// Arg-max class of each of `rows` samples.
//
// # Safety
// `x` valid for `rows * cols` reads, `out_classes` for `rows` writes.
enum SlStatus sl_network_classify(const struct SlNetwork *net,
                                  const double *x,
                                  size_t rows,
                                  size_t cols,
                                  size_t *out_classes);

// Number of squashing layers, and their current `beta` values copied into
// `out_betas` when it holds enough room (`out_len`).
//
// # Safety
// `out_count` writable; `out_betas` null or valid for `out_len` writes.
enum SlStatus sl_network_betas(const struct SlNetwork *net,
                               double *out_betas,
                               size_t out_len,
                               size_t *out_count);

// Adam on softmax cross-entropy; `batch_size == 0` means full batch.
// Writes the final training loss and accuracy.
//
// # Safety
// Handles live; out pointers null or writable.
enum SlStatus sl_network_train(struct SlNetwork *net,
                               const struct SlDataset *data,
                               size_t epochs,
                               double learning_rate,
                               size_t batch_size,
                               uint64_t seed,
                               double *out_loss,
                               double *out_accuracy);

// Dataset from `rows` row-major samples and their labels.
//
// # Safety
// `features` valid for `rows * cols` reads, `labels` for `rows`.
enum SlStatus sl_dataset_new(const double *features,
                             const size_t *labels,
                             size_t rows,
                             size_t cols,
                             size_t n_classes,
                             struct SlDataset **out_data);

// Seeded synthetic dataset. `n` is points per class for the Gaussian,
// circle and spiral sets and the total for the line regions.
//
// # Safety
// `out_data` must be writable.
enum SlStatus sl_dataset_generate(enum SlDatasetKind kind,
                                  size_t n,
                                  uint64_t seed,
                                  struct SlDataset **out_data);

// # Safety
// `data` must be null or a handle not yet freed.
void sl_dataset_free(struct SlDataset *data);

// Number of samples, features and classes.
//
// # Safety
// `data` live; out pointers writable.
enum SlStatus sl_dataset_shape(const struct SlDataset *data,
                               size_t *out_rows,
                               size_t *out_cols,
                               size_t *out_classes);

// Copies features (`rows * cols`, row-major) and labels (`rows`) out.
// Either pointer may be null.
//
// # Safety
// Non-null pointers must be valid for the stated number of writes.
enum SlStatus sl_dataset_copy(const struct SlDataset *data,
                              double *out_features,
                              size_t *out_labels);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SQUASHLOGIC_H */

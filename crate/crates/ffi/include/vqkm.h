#ifndef VQKM_H
#define VQKM_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  VQKM_STATUS_OK = 0,
  VQKM_STATUS_NULL_POINTER = 1,
  VQKM_STATUS_INVALID_ARGUMENT = 2,
  VQKM_STATUS_SHAPE_MISMATCH = 3,
  VQKM_STATUS_CAPACITY = 4,
  VQKM_STATUS_IO = 5,
  VQKM_STATUS_PARSE = 6,
  VQKM_STATUS_NUMERICAL = 7,
  VQKM_STATUS_EMPTY_CLUSTER = 8,
  VQKM_STATUS_UNSUPPORTED = 9,
  VQKM_STATUS_BUFFER_TOO_SMALL = 10,
  VQKM_STATUS_PANIC = 11,
} VqkmStatus;

typedef enum {
  VQKM_GENERATOR_BLOBS = 0,
  VQKM_GENERATOR_CIRCLES = 1,
  VQKM_GENERATOR_MOONS = 2,
  VQKM_GENERATOR_CORNERS = 3,
} VqkmGenerator;

typedef enum {
  VQKM_COST_STATE_OVERLAP = 0,
  VQKM_COST_HILBERT_SCHMIDT = 1,
} VqkmCost;

typedef enum {
  VQKM_CENTROID_MODE_DATA_MEAN = 0,
  VQKM_CENTROID_MODE_ENSEMBLE = 1,
} VqkmCentroidMode;

typedef struct VqkmDataset VqkmDataset;

typedef struct VqkmFeatureMap VqkmFeatureMap;

typedef struct VqkmTrainResult VqkmTrainResult;

/*
 Supervised training options; start from `vqkm_train_options_default`.
 */
typedef struct {
  uintptr_t k;
  VqkmCost cost;
  double step_size;
  uintptr_t max_epochs;
  uint64_t seed;
} VqkmTrainOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or NULL. Valid until the
 next call into the library on this thread.
 */
const char *vqkm_last_error_message(void);

/*
 Generates a labelled synthetic dataset with the default noise settings
 (blobs: 3 clusters; circles: radii 0.5 and 1; moons; corners).

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
VqkmStatus vqkm_dataset_generate(VqkmGenerator generator,
                                 uintptr_t n_per_cluster,
                                 uint64_t seed,
                                 VqkmDataset **out);

/*
 Builds a dataset from a row-major `n_points × dim` array. `labels` may be
 NULL; otherwise it holds `n_points` entries.

 # Safety
 Non-null pointers must reference arrays of the stated lengths.
 */
VqkmStatus vqkm_dataset_from_points(const double *points,
                                    uintptr_t n_points,
                                    uintptr_t dim,
                                    const uint32_t *labels,
                                    VqkmDataset **out);

/*
 Standardizes each feature and scales it into [−π/2, π/2], in place.

 # Safety
 `dataset` must be a live handle or NULL.
 */
VqkmStatus vqkm_dataset_preprocess(VqkmDataset *dataset);

/*
 Number of points; 0 for NULL.

 # Safety
 `dataset` must be a live handle or NULL.
 */
uintptr_t vqkm_dataset_len(const VqkmDataset *dataset);

/*
 Features per point; 0 for NULL.

 # Safety
 `dataset` must be a live handle or NULL.
 */
uintptr_t vqkm_dataset_dim(const VqkmDataset *dataset);

/*
 Copies the points row-major into `buf` (`len ≥ len·dim`).

 # Safety
 `buf` must hold `len` writable doubles.
 */
VqkmStatus vqkm_dataset_points(const VqkmDataset *dataset, double *buf, uintptr_t len);

/*
 Copies the ground-truth labels into `buf`.

 # Safety
 `buf` must hold `len` writable integers.
 */
VqkmStatus vqkm_dataset_labels(const VqkmDataset *dataset, uint32_t *buf, uintptr_t len);

/*
 # Safety
 `dataset` must be a handle from this library or NULL, freed at most once.
 */
void vqkm_dataset_free(VqkmDataset *dataset);

/*
 QAOA-style feature map with all parameters zero.

 # Safety
 `out` must be a valid pointer to writable storage for a handle.
 */
VqkmStatus vqkm_feature_map_new(uintptr_t n_qubits,
                                uintptr_t n_layers,
                                uintptr_t feature_dim,
                                VqkmFeatureMap **out);

/*
 Number of trainable parameters; 0 for NULL.

 # Safety
 `map` must be a live handle or NULL.
 */
uintptr_t vqkm_feature_map_param_count(const VqkmFeatureMap *map);

/*
 # Safety
 `theta` must hold `len` doubles.
 */
VqkmStatus vqkm_feature_map_set_theta(VqkmFeatureMap *map, const double *theta, uintptr_t len);

/*
 # Safety
 `buf` must hold `len` writable doubles.
 */
VqkmStatus vqkm_feature_map_get_theta(const VqkmFeatureMap *map, double *buf, uintptr_t len);

/*
 Embeds `x` and writes the 2^n amplitudes as separate real and imaginary parts.

 # Safety
 `x` must hold `dim` doubles; `re` and `im` must each hold `len` doubles.
 */
VqkmStatus vqkm_feature_map_embed(const VqkmFeatureMap *map,
                                  const double *x,
                                  uintptr_t dim,
                                  double *re,
                                  double *im,
                                  uintptr_t len);

/*
 Kernel value |⟨x|y⟩|² under the map.

 # Safety
 `x` and `y` must hold `dim` doubles; `out` must be writable.
 */
VqkmStatus vqkm_feature_map_kernel(const VqkmFeatureMap *map,
                                   const double *x,
                                   const double *y,
                                   uintptr_t dim,
                                   double *out);

/*
 # Safety
 `map` must be a handle from this library or NULL, freed at most once.
 */
void vqkm_feature_map_free(VqkmFeatureMap *map);

VqkmTrainOptions vqkm_train_options_default(void);

/*
 Supervised training on the dataset's labels. On success the map's
 parameters are set to the minimum-cost θ.

 # Safety
 Handles must be live; `options` readable; `out` writable.
 */
VqkmStatus vqkm_train(const VqkmDataset *dataset,
                      VqkmFeatureMap *map,
                      const VqkmTrainOptions *options,
                      VqkmTrainResult **out);

/*
 Lowest cost seen; NaN for NULL.

 # Safety
 `result` must be a live handle or NULL.
 */
double vqkm_train_result_min_cost(const VqkmTrainResult *result);

/*
 # Safety
 `result` must be a live handle or NULL.
 */
uintptr_t vqkm_train_result_argmin_epoch(const VqkmTrainResult *result);

/*
 Number of recorded epochs (including epoch 0).

 # Safety
 `result` must be a live handle or NULL.
 */
uintptr_t vqkm_train_result_len(const VqkmTrainResult *result);

/*
 Copies the per-epoch costs into `buf`.

 # Safety
 `buf` must hold `len` writable doubles.
 */
VqkmStatus vqkm_train_result_costs(const VqkmTrainResult *result, double *buf, uintptr_t len);

/*
 # Safety
 `result` must be a handle from this library or NULL, freed at most once.
 */
void vqkm_train_result_free(VqkmTrainResult *result);

/*
 Runs q-means with exact kernels and writes one label per point.

 # Safety
 Handles must be live; `labels` must hold `len` writable integers.
 */
VqkmStatus vqkm_cluster(const VqkmDataset *dataset,
                        const VqkmFeatureMap *map,
                        uintptr_t k,
                        VqkmCentroidMode mode,
                        uintptr_t restarts,
                        uint64_t seed,
                        uint32_t *labels,
                        uintptr_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VQKM_H */

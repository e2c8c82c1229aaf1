/* C interface of the skseg library. All handles are opaque; every call that
 * can fail returns an skseg_status and records a message retrievable with
 * skseg_last_error() on the calling thread. */
#ifndef SKSEG_SKSEG_H
#define SKSEG_SKSEG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SKSEG_API __declspec(dllexport)
#else
#define SKSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum skseg_status {
  SKSEG_OK = 0,
  SKSEG_ERR_INVALID_ARGUMENT = 1,
  SKSEG_ERR_DIMENSION = 2,
  SKSEG_ERR_IO = 3,
  SKSEG_ERR_NUMERIC = 4,
  SKSEG_ERR_CONFIG = 5,
  SKSEG_ERR_INTERNAL = 6
} skseg_status;

SKSEG_API const char* skseg_version(void);
SKSEG_API const char* skseg_status_name(skseg_status status);
/* Message of the last failed call on this thread; "" when none. */
SKSEG_API const char* skseg_last_error(void);
/* Per-slice failure messages of the last batch call on this thread, one per
 * line; "" when every slice succeeded. */
SKSEG_API const char* skseg_last_warnings(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct skseg_config skseg_config;

SKSEG_API skseg_status skseg_config_new(skseg_config** out);
SKSEG_API void skseg_config_free(skseg_config* cfg);
SKSEG_API skseg_status skseg_config_set(skseg_config* cfg, const char* key, const char* value);
SKSEG_API skseg_status skseg_config_load(skseg_config* cfg, const char* path);
/* Copies the value into buf (NUL-terminated, truncated to cap). *needed, if
 * non-null, receives the full length without the terminator. */
SKSEG_API skseg_status skseg_config_get(const skseg_config* cfg, const char* key, char* buf,
                                        size_t cap, size_t* needed);

SKSEG_API size_t skseg_config_key_count(void);
SKSEG_API const char* skseg_config_key_name(size_t i);
SKSEG_API const char* skseg_config_key_type(size_t i);
SKSEG_API const char* skseg_config_key_default(size_t i);
SKSEG_API const char* skseg_config_key_help(size_t i);

/* ---- images ----------------------------------------------------------- */

typedef struct skseg_image skseg_image;

/* Copies width * height row-major intensities. */
SKSEG_API skseg_status skseg_image_new(int width, int height, const double* data,
                                       skseg_image** out);
SKSEG_API skseg_status skseg_image_load(const char* path, skseg_image** out);
SKSEG_API skseg_status skseg_image_save(const skseg_image* img, const char* path);
SKSEG_API void skseg_image_free(skseg_image* img);
SKSEG_API int skseg_image_width(const skseg_image* img);
SKSEG_API int skseg_image_height(const skseg_image* img);
SKSEG_API skseg_status skseg_image_copy(const skseg_image* img, double* buf, size_t len);

/* SK reconstruction with the kernel.* and sk.* configuration keys. */
SKSEG_API skseg_status skseg_reconstruct(const skseg_config* cfg, const skseg_image* in,
                                         skseg_image** out);

/* ---- kernels ---------------------------------------------------------- */

typedef struct skseg_kernel_report {
  double k2_max_deviation;
  double m0;
  double m_beta;
  double beta;
  double l1_norm;
  int bounded_near_zero;
} skseg_kernel_report;

/* truncation <= 0 selects 200 for product kernels and the SK default for Wendland. */
SKSEG_API skseg_status skseg_check_kernel(const skseg_config* cfg, double beta, double start,
                                          double stop, double step, int truncation,
                                          skseg_kernel_report* out);
SKSEG_API double skseg_kernel_value_2d(const skseg_config* cfg, double x, double y);

/* ---- batch operations ------------------------------------------------- */

typedef struct skseg_batch_summary {
  size_t slices;
  size_t failures;
} skseg_batch_summary;

/* Segments every slice under in_dir into out_dir. Per-slice failures are
 * counted in the summary and listed in <out>/<patient>/errors.csv; the call
 * itself fails only when the series cannot be read. */
SKSEG_API skseg_status skseg_segment_series(const skseg_config* cfg, const char* in_dir,
                                            const char* out_dir, int no_sk,
                                            skseg_batch_summary* summary);

SKSEG_API skseg_status skseg_evaluate(const skseg_config* cfg, const char* pred_dir,
                                      const char* target_dir, const char* out_dir,
                                      const char* pred_name, double pred_threshold,
                                      int target_scale, skseg_batch_summary* summary);

/* Means of DCI per method are returned through the optional pointers. */
SKSEG_API skseg_status skseg_compare(const skseg_config* cfg, const char* a, const char* b,
                                     const char* name_a, const char* name_b, const char* out_dir,
                                     double* mean_dci_a, double* mean_dci_b);

SKSEG_API skseg_status skseg_phantom(const skseg_config* cfg, const char* out_dir, uint64_t seed,
                                     int count, int patients, double noise_sigma);

#ifdef __cplusplus
}
#endif

#endif

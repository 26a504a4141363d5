#ifndef HYBRIDEVS_H
#define HYBRIDEVS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HevsDemosaicMode {
  HEVS_DEMOSAIC_MODE_BILINEAR = 0,
  HEVS_DEMOSAIC_MODE_GRADIENT_CORRECTED = 1,
} HevsDemosaicMode;

typedef enum HevsDpcMode {
  HEVS_DPC_MODE_NONE = 0,
  HEVS_DPC_MODE_ZERO_MASK = 1,
  HEVS_DPC_MODE_MEDIAN_DEVIATION = 2,
  HEVS_DPC_MODE_BOTH = 3,
} HevsDpcMode;

/**
 * Result code of every fallible call.
 */
typedef enum HevsStatus {
  HEVS_STATUS_OK = 0,
  HEVS_STATUS_NULL_POINTER = 1,
  HEVS_STATUS_INVALID_PATTERN = 2,
  HEVS_STATUS_INVALID_DIMENSIONS = 3,
  HEVS_STATUS_LENGTH_MISMATCH = 4,
  HEVS_STATUS_RANGE_ERROR = 5,
  HEVS_STATUS_DIMENSION_MISMATCH = 6,
  HEVS_STATUS_TOO_SMALL = 7,
  HEVS_STATUS_INVALID_CONFIG = 8,
  HEVS_STATUS_INVALID_UTF8 = 9,
  HEVS_STATUS_PANIC = 10,
  HEVS_STATUS_OTHER = 99,
} HevsStatus;

/**
 * Opaque pattern handle.
 */
typedef struct HevsPattern HevsPattern;

/**
 * Opaque 10-bit raw frame handle.
 */
typedef struct HevsRaw HevsRaw;

/**
 * Opaque 8-bit RGB image handle.
 */
typedef struct HevsRgb HevsRgb;

/**
 * Pipeline settings. Obtain defaults from [`hevs_restore_options_default`].
 */
typedef struct HevsRestoreOptions {
  enum HevsDpcMode dpc;
  enum HevsDemosaicMode demosaic;
  uint16_t threshold;
  uint32_t radius;
  bool inpaint;
} HevsRestoreOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * NUL-terminated library version. Static storage, do not free.
 */
const char *hevs_version(void);

/**
 * Message of the last failed call on this thread, or an empty string.
 * Valid until the next call into the library from the same thread.
 */
const char *hevs_last_error_message(void);

/**
 * The default 4x4 pattern.
 */
struct HevsPattern *hevs_pattern_default(void);

/**
 * Parses a pattern from its 4-line text form.
 */
enum HevsStatus hevs_pattern_parse(const char *text, struct HevsPattern **out);

/**
 * Pixel class code ('R', 'G', 'B' or 'E') at (x, y).
 */
char hevs_pattern_classify(const struct HevsPattern *p, size_t x, size_t y);

void hevs_pattern_free(struct HevsPattern *p);

/**
 * Copies `width * height` row-major 10-bit samples into a new frame.
 */
enum HevsStatus hevs_raw_new(const uint16_t *samples,
                             size_t width,
                             size_t height,
                             struct HevsRaw **out);

/**
 * Decodes a headerless little-endian 16-bit container.
 */
enum HevsStatus hevs_raw_read(const uint8_t *bytes,
                              size_t len,
                              size_t width,
                              size_t height,
                              struct HevsRaw **out);

void hevs_raw_free(struct HevsRaw *p);

struct HevsRestoreOptions hevs_restore_options_default(void);

/**
 * Restores a raw frame to RGB. `pattern` and `options` may be null for
 * the defaults.
 */
enum HevsStatus hevs_restore(const struct HevsRaw *raw,
                             const struct HevsPattern *pattern,
                             const struct HevsRestoreOptions *options,
                             struct HevsRgb **out);

/**
 * Copies `width * height * 3` interleaved RGB bytes into a new image.
 */
enum HevsStatus hevs_rgb_new(const uint8_t *data,
                             size_t width,
                             size_t height,
                             struct HevsRgb **out);

size_t hevs_rgb_width(const struct HevsRgb *p);

size_t hevs_rgb_height(const struct HevsRgb *p);

/**
 * Borrowed pointer to the interleaved pixels, valid until the handle is freed.
 */
const uint8_t *hevs_rgb_data(const struct HevsRgb *p);

void hevs_rgb_free(struct HevsRgb *p);

/**
 * PSNR in dB between two RGB images of equal size.
 */
enum HevsStatus hevs_psnr(const struct HevsRgb *a, const struct HevsRgb *b, double *out);

/**
 * Mean SSIM between two RGB images of equal size, at least 11x11.
 */
enum HevsStatus hevs_ssim(const struct HevsRgb *a, const struct HevsRgb *b, double *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* HYBRIDEVS_H */

#ifndef FORGE_H
#define FORGE_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(FORGE_BUILDING_LIBRARY)
#define FORGE_API __declspec(dllexport)
#else
#define FORGE_API __declspec(dllimport)
#endif
#else
#define FORGE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every int-returning call returns FORGE_OK or one of the error codes below;
   forge_last_error() then holds a message for the calling thread. */
enum {
  FORGE_OK = 0,
  FORGE_INVALID_ARGUMENT = 1,
  FORGE_DIMENSION_MISMATCH = 2,
  FORGE_NON_IMMERSION = 3,
  FORGE_DEGENERATE_NORMAL_FRAME = 4,
  FORGE_NOT_HARMONIC = 5,
  FORGE_NOT_MINIMAL = 6,
  FORGE_NOT_ISOTHERMAL = 7,
  FORGE_NOT_HOLOMORPHIC = 8,
  FORGE_PATH_DEPENDENT = 9,
  FORGE_UMBILIC_POINT = 10,
  FORGE_NOT_INTEGRABLE = 11,
  FORGE_NON_POSITIVE_HEIGHT = 12,
  FORGE_ZERO_CROSSING = 13,
  FORGE_DOMAIN_VIOLATION = 14,
  FORGE_PROFILE_MISMATCH = 15,
  FORGE_HOLOMORPHY_VIOLATION = 16,
  FORGE_NOT_A_CONE = 17,
  FORGE_ASSOCIATED_FAMILY_UNAVAILABLE = 18,
  FORGE_AT_CENTER = 19,
  FORGE_NOT_RULED = 20,
  FORGE_NO_COMMON_VERTEX = 21,
  FORGE_GAUSS_MAP_MISMATCH = 22,
  FORGE_NOT_CONFORMAL = 23,
  FORGE_NOT_ORTHOGONAL = 24,
  FORGE_UNPAIRED_COMPLEX_EIGENVALUE = 25,
  FORGE_NOT_CLOSED = 26,
  FORGE_UNKNOWN_EXAMPLE = 27,
  FORGE_SLICE_UNAVAILABLE = 28,
  FORGE_MISSING_REPORTS = 29,
  FORGE_MISSING_PAIR = 30,
  FORGE_IO_ERROR = 31,
  FORGE_PARSE_ERROR = 32,
  FORGE_RESIDUAL_ABOVE_THRESHOLD = 33,
  FORGE_UNKNOWN = 99
};

/* Which chart of a pair. */
enum { FORGE_F = 0, FORGE_G = 1 };

typedef struct forge_pair forge_pair;
typedef struct forge_options forge_options;
typedef struct forge_report forge_report;

FORGE_API const char* forge_version(void);
FORGE_API const char* forge_last_error(void);
FORGE_API const char* forge_error_name(int code);

FORGE_API int forge_catalog_size(void);
/* NULL when out of range. */
FORGE_API const char* forge_catalog_name(int index);
FORGE_API int forge_catalog_info(const char* example, int* domain_dim, int* ambient_dim, int* default_resolution);

FORGE_API int forge_pair_build(const char* example, int resolution, forge_pair** out);
/* Reads a directory written by forge_pair_write. */
FORGE_API int forge_pair_load(const char* dir, forge_pair** out);
FORGE_API void forge_pair_free(forge_pair* pair);
FORGE_API const char* forge_pair_id(const forge_pair* pair);
FORGE_API int forge_pair_shape(const forge_pair* pair, int* domain_dim, int* ambient_dim, size_t* nodes);
/* Copies ambient_dim * nodes samples, node after node. */
FORGE_API int forge_pair_samples(const forge_pair* pair, int which, double* out, size_t count);
/* Replaces one chart by the given samples (same layout as forge_pair_samples). */
FORGE_API int forge_pair_set_samples(forge_pair* pair, int which, const double* samples, size_t count);
/* f.csv, g.csv, manifest.json and, when with_fields, fields.csv. */
FORGE_API int forge_pair_write(const forge_pair* pair, const char* dir, int with_fields);
FORGE_API int forge_pair_export_csv(const forge_pair* pair, int which, const char* path);
/* Surface slice spanned by grid axes a and b; fixed[d] (or -1 for the middle)
   holds the other axes. fixed may be NULL. */
FORGE_API int forge_pair_export_obj(const forge_pair* pair, int which, const char* path, int axis_a, int axis_b,
                                    const int* fixed, int fixed_len);

/* Thresholds shipped with a catalog example, a loaded pair, or defaults (example NULL). */
FORGE_API int forge_options_create(const char* example, forge_options** out);
FORGE_API int forge_options_for_pair(const forge_pair* pair, forge_options** out);
/* key: a residual name (sets its C), "cluster", "gauss_tol" or "max_sample_nodes". */
FORGE_API int forge_options_set(forge_options* options, const char* key, double value);
FORGE_API void forge_options_free(forge_options* options);

FORGE_API int forge_verify(const forge_pair* pair, const forge_options* options, forge_report** out);
FORGE_API int forge_convergence(const char* example, const int* resolutions, int count, const forge_options* options,
                                forge_report** out);
FORGE_API void forge_report_free(forge_report* report);
FORGE_API int forge_report_passed(const forge_report* report, int* passed);
/* Error code of the first failing residual, FORGE_OK when every one passes. */
FORGE_API int forge_report_failure(const forge_report* report);
/* Comma-separated failing residuals of all levels; empty when passed. */
FORGE_API const char* forge_report_failures(const forge_report* report);
FORGE_API int forge_report_residual(const forge_report* report, int level, const char* name, double* value);
FORGE_API int forge_report_levels(const forge_report* report, int* levels);
FORGE_API int forge_report_converges(const forge_report* report, double lo, double hi, int* ok);
/* Owned by the report. */
FORGE_API const char* forge_report_json(const forge_report* report);
FORGE_API int forge_report_write(const forge_report* report, const char* path);

/* Writes the long-format table over every report.json under run_dir. */
FORGE_API int forge_report_table(const char* run_dir, const char* out_path);

#ifdef __cplusplus
}
#endif

#endif

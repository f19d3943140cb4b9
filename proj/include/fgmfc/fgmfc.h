/* Copyright The fgmfc Authors.
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef FGMFC_FGMFC_H_
#define FGMFC_FGMFC_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define FGMFC_API __declspec(dllexport)
#else
#define FGMFC_API __attribute__((visibility("default")))
#endif

typedef enum fgmfc_status {
  FGMFC_OK = 0,
  FGMFC_INVALID_ARGUMENT = 1,
  FGMFC_CONFIG_ERROR = 2,
  FGMFC_NUMERIC_FAILURE = 3,
  FGMFC_FIXED_POINT_FAILURE = 4,
  FGMFC_PRECONDITION_VIOLATION = 5,
  FGMFC_INSUFFICIENT_DATA = 6,
  FGMFC_IO_ERROR = 7,
  FGMFC_CHECK_FAILED = 8,
  FGMFC_INTERNAL_ERROR = 9
} fgmfc_status;

typedef struct fgmfc_config fgmfc_config;
typedef struct fgmfc_solution fgmfc_solution;

/* Message of the last failed call on the calling thread ("" if none). */
FGMFC_API const char* fgmfc_last_error(void);
FGMFC_API const char* fgmfc_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
FGMFC_API void fgmfc_string_free(char* s);

FGMFC_API fgmfc_status fgmfc_config_load(const char* path, fgmfc_config** out);
FGMFC_API fgmfc_status fgmfc_config_parse(const char* json_text, fgmfc_config** out);
FGMFC_API void fgmfc_config_free(fgmfc_config* cfg);
/* Canonical JSON of the configuration, all defaults filled in. */
FGMFC_API fgmfc_status fgmfc_config_json(const fgmfc_config* cfg, char** out);
/* Validation warnings, one per line. */
FGMFC_API fgmfc_status fgmfc_config_warnings(const fgmfc_config* cfg, char** out);
FGMFC_API fgmfc_status fgmfc_config_output_dir(const fgmfc_config* cfg, char** out);

FGMFC_API fgmfc_status fgmfc_solve(const fgmfc_config* cfg, fgmfc_solution** out);
FGMFC_API void fgmfc_solution_free(fgmfc_solution* sol);
FGMFC_API fgmfc_status fgmfc_solution_report_json(const fgmfc_solution* sol, char** out);
/* Writes config.json, report.json, forward/ and backward/ into dir. */
FGMFC_API fgmfc_status fgmfc_solution_write(const fgmfc_solution* sol, const char* dir);
/* Coefficient (real and imaginary part) of mode k (length d) at time node s. */
FGMFC_API fgmfc_status fgmfc_solution_forward_coeff(const fgmfc_solution* sol, int s, const int* k,
                                                    double* re, double* im);
FGMFC_API fgmfc_status fgmfc_solution_backward_coeff(const fgmfc_solution* sol, int s, const int* k,
                                                     double* re, double* im);

/* Writes errors.csv, class_value.csv, report.json and config.json into dir. */
FGMFC_API fgmfc_status fgmfc_sweep(const fgmfc_config* cfg, const char* dir);

/* Runs the property suite and writes checks.json into dir (may be NULL).
 * *all_passed is set to 1 when every check passed or was skipped. */
FGMFC_API fgmfc_status fgmfc_check(const fgmfc_config* cfg, const char* dir, char** report_json,
                                   int* all_passed);

/* V^N(t_s, m) for the configured problem. */
FGMFC_API fgmfc_status fgmfc_value(const fgmfc_config* cfg, int t_index, double* out);

/* Reads a field CSV, keeps modes |k| <= band, and writes the result as CSV
 * text to *out. */
FGMFC_API fgmfc_status fgmfc_truncate_csv(const char* in_path, int band, char** out);

#ifdef __cplusplus
}
#endif

#endif /* FGMFC_FGMFC_H_ */

#ifndef CASL_H
#define CASL_H

/* C interface to the contrastive active-sampling library.
 *
 * All functions return a casl_status; on any failure a human-readable
 * message is available from casl_last_error() until the next call on the
 * same thread. Configs are opaque handles created from a named profile and
 * adjusted through key=value overrides, mirroring the CLI.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define CASL_API __declspec(dllexport)
#else
#define CASL_API __attribute__((visibility("default")))
#endif

typedef enum casl_status {
  CASL_OK = 0,
  CASL_ERROR_INVALID_ARGUMENT = 1, /* null handle / null pointer */
  CASL_ERROR_VALIDATION = 2,       /* bad key, value out of range */
  CASL_ERROR_IO = 3,               /* file missing or unwritable */
  CASL_ERROR_INTERNAL = 4          /* anything else */
} casl_status;

typedef struct casl_config casl_config;

/* Library version, static storage. */
CASL_API const char* casl_version(void);

/* Message for the most recent failure on this thread; empty string if the
 * last call succeeded. The pointer stays valid until the next API call on
 * the same thread. */
CASL_API const char* casl_last_error(void);

/* Creates a config from a profile ("desk" or "paper"). NULL profile means
 * "desk". Free with casl_config_destroy. */
CASL_API casl_status casl_config_create(const char* profile, casl_config** out);

/* Parses a config file (same format as `casl run --config`), replacing the
 * handle's state. The handle's profile supplies the defaults; a profile line
 * inside the file overrides it. Apply casl_config_set overrides after. */
CASL_API casl_status casl_config_load(casl_config* cfg, const char* path);

/* Applies one key=value override, e.g. casl_config_set(c, "loop.budget", "50"). */
CASL_API casl_status casl_config_set(casl_config* cfg, const char* key,
                                     const char* value);

/* Renders the config in file format. Caller frees with casl_string_free. */
CASL_API casl_status casl_config_emit(const casl_config* cfg, char** out);

CASL_API void casl_string_free(char* s);

CASL_API void casl_config_destroy(casl_config* cfg);

/* Generates the dataset for cfg and writes it to out_path; csv_path may be
 * NULL to skip the CSV view. */
CASL_API casl_status casl_gen_data(const casl_config* cfg, const char* out_path,
                                   const char* csv_path);

/* Runs every configured strategy x repetition plus the benchmark, writing
 * logs into the config's output directory. */
CASL_API casl_status casl_run(const casl_config* cfg);

/* Aggregates experiment logs from log_dir into summary tables and an SVG
 * chart under out_dir. */
CASL_API casl_status casl_report(const char* log_dir, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CASL_H */

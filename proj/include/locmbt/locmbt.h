/*
 * C interface to the locmbt toolkit: learning Mealy-machine models of
 * localization systems from abstracted traces and generating coverage test
 * suites from them.
 *
 * All objects are opaque handles released with their matching *_free
 * function. Functions return a locmbt_status; on failure a description is
 * available from locmbt_last_error() until the next call on the same thread.
 * Strings handed out through char** parameters are owned by the caller and
 * released with locmbt_string_free().
 */
#ifndef LOCMBT_LOCMBT_H
#define LOCMBT_LOCMBT_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(LOCMBT_BUILDING_LIBRARY)
#define LOCMBT_API __declspec(dllexport)
#else
#define LOCMBT_API __declspec(dllimport)
#endif
#else
#define LOCMBT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values match the CLI exit codes. */
typedef enum locmbt_status {
  LOCMBT_OK = 0,
  LOCMBT_ERR_USAGE = 1,
  LOCMBT_ERR_CONFIG = 2,
  LOCMBT_ERR_DATA = 3,
  LOCMBT_NEEDS_MORE_SAMPLES = 4,
  LOCMBT_ERR_INTERNAL = 5
} locmbt_status;

typedef enum locmbt_coverage {
  LOCMBT_STATE_COVERAGE = 0,
  LOCMBT_TRANSITION_COVERAGE = 1
} locmbt_coverage;

typedef struct locmbt_config locmbt_config;
typedef struct locmbt_samples locmbt_samples;
typedef struct locmbt_machine locmbt_machine;
typedef struct locmbt_suite locmbt_suite;

LOCMBT_API const char* locmbt_version(void);
LOCMBT_API const char* locmbt_last_error(void);
LOCMBT_API void locmbt_string_free(char* s);

/* Configuration. `overrides` holds n strings of the form "section.key=value". */
LOCMBT_API locmbt_status locmbt_config_load(const char* path, const char* const* overrides, size_t n,
                                            locmbt_config** out);
LOCMBT_API locmbt_status locmbt_config_parse(const char* text, const char* base_dir, const char* const* overrides,
                                             size_t n, locmbt_config** out);
LOCMBT_API void locmbt_config_free(locmbt_config* config);

/* Pipeline commands. `summary` receives key=value lines and may be NULL. */
LOCMBT_API locmbt_status locmbt_simulate(const locmbt_config* config, char** summary);
LOCMBT_API locmbt_status locmbt_run(const locmbt_config* config, char** summary);
LOCMBT_API locmbt_status locmbt_sweep(const locmbt_config* config, char** summary);

/* Sample sets. */
LOCMBT_API locmbt_status locmbt_prepare(const locmbt_config* config, locmbt_samples** out);
LOCMBT_API locmbt_status locmbt_samples_from_json(const char* json, locmbt_samples** out);
LOCMBT_API locmbt_status locmbt_samples_load(const char* path, locmbt_samples** out);
LOCMBT_API locmbt_status locmbt_samples_save(const locmbt_samples* samples, const char* path);
LOCMBT_API size_t locmbt_samples_count(const locmbt_samples* samples);
LOCMBT_API void locmbt_samples_free(locmbt_samples* samples);

/* Machines. */
LOCMBT_API locmbt_status locmbt_learn(const locmbt_samples* samples, locmbt_machine** out);
LOCMBT_API locmbt_status locmbt_machine_from_json(const char* json, locmbt_machine** out);
LOCMBT_API locmbt_status locmbt_machine_load(const char* path, locmbt_machine** out);
LOCMBT_API locmbt_status locmbt_machine_save(const locmbt_machine* machine, const char* json_path,
                                             const char* dot_path);
LOCMBT_API locmbt_status locmbt_machine_to_json(const locmbt_machine* machine, char** json);
LOCMBT_API locmbt_status locmbt_machine_to_dot(const locmbt_machine* machine, char** dot);
LOCMBT_API size_t locmbt_machine_state_count(const locmbt_machine* machine);
LOCMBT_API size_t locmbt_machine_transition_count(const locmbt_machine* machine);
/* Replays input labels; `outputs` receives the comma-joined output labels. An
 * undefined transition yields LOCMBT_ERR_DATA. */
LOCMBT_API locmbt_status locmbt_machine_run(const locmbt_machine* machine, const char* const* inputs, size_t n,
                                            char** outputs);
LOCMBT_API int locmbt_machine_isomorphic(const locmbt_machine* a, const locmbt_machine* b);
LOCMBT_API void locmbt_machine_free(locmbt_machine* machine);

/* Validation. `report_json` may be NULL. */
LOCMBT_API locmbt_status locmbt_validate(const locmbt_machine* machine, const locmbt_samples* samples,
                                         double* accuracy, char** report_json);

/* Test suites. prefix_elimination < 0 picks the default for the kind. */
LOCMBT_API locmbt_status locmbt_suite_generate(const locmbt_machine* machine, locmbt_coverage kind,
                                               int prefix_elimination, locmbt_suite** out);
LOCMBT_API locmbt_status locmbt_suite_from_json(const char* json, const locmbt_machine* machine,
                                                locmbt_suite** out);
LOCMBT_API locmbt_status locmbt_suite_load(const char* path, const locmbt_machine* machine, locmbt_suite** out);
LOCMBT_API locmbt_status locmbt_suite_to_json(const locmbt_suite* suite, char** json);
LOCMBT_API locmbt_status locmbt_suite_save(const locmbt_suite* suite, const char* path);
LOCMBT_API size_t locmbt_suite_size(const locmbt_suite* suite);
/* *full is set to 1 when every coverage target is exercised. */
LOCMBT_API locmbt_status locmbt_suite_check(const locmbt_machine* machine, const locmbt_suite* suite, int* full,
                                            char** verdict_json);
/* Writes one trajectory CSV per sequence into out_dir as <prefix>_NNN.csv. */
LOCMBT_API locmbt_status locmbt_suite_map(const locmbt_config* config, const locmbt_machine* machine,
                                          const locmbt_suite* suite, const char* out_dir, const char* prefix,
                                          char** summary);
LOCMBT_API void locmbt_suite_free(locmbt_suite* suite);

#ifdef __cplusplus
}
#endif

#endif /* LOCMBT_LOCMBT_H */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef IRRARRAY_H
#define IRRARRAY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result codes.
 */
typedef enum IrrStatus {
  IRR_STATUS_OK = 0,
  IRR_STATUS_NULL_POINTER = 1,
  IRR_STATUS_INVALID_UTF8 = 2,
  IRR_STATUS_INVALID_ARGUMENT = 3,
  IRR_STATUS_INVALID_LAYOUT = 4,
  IRR_STATUS_DEGENERATE_CHANNEL = 5,
  IRR_STATUS_DEGENERATE_MASK = 6,
  IRR_STATUS_EVALUATION = 7,
  IRR_STATUS_SCENARIO = 8,
  IRR_STATUS_IO = 9,
  IRR_STATUS_JSON = 10,
  IRR_STATUS_OUT_OF_RANGE = 11,
  IRR_STATUS_PANIC = 12,
} IrrStatus;

/*
 One array layout.
 */
typedef struct IrrConfig IrrConfig;

/*
 Layouts produced by enumeration.
 */
typedef struct IrrConfigList IrrConfigList;

/*
 Scenario parameters.
 */
typedef struct IrrScenario IrrScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread (empty after a
 success). Never NULL.
 */
const char *irr_last_error(void);

/*
 Releases a string returned by this library.

 # Safety
 `s` must be NULL or a pointer obtained from this library that has not
 been freed yet.
 */
void irr_string_free(char *s);

/*
 Exact number of domino tilings of a `rows × cols` board, as a decimal
 string.

 # Safety
 `out` must be a valid pointer to writable storage.
 */
enum IrrStatus irr_count_domino(size_t rows, size_t cols, char **out);

/*
 Exact number of `elements`-element thinned layouts spanning the full
 `rows × cols` aperture, as a decimal string.

 # Safety
 `out` must be a valid pointer to writable storage.
 */
enum IrrStatus irr_count_thinned(size_t rows, size_t cols, size_t elements, char **out);

/*
 Enumerates up to `cap` tilings of `kind` (`"domino"` or `"tetromino"`);
 `seed` fixes the search order.

 # Safety
 `kind` must be a NUL-terminated string; `out` must be writable.
 */
enum IrrStatus irr_enumerate(const char *kind,
                             size_t rows,
                             size_t cols,
                             size_t cap,
                             uint64_t seed,
                             struct IrrConfigList **out);

/*
 Number of layouts in `list` (0 for NULL).

 # Safety
 `list` must be NULL or a live handle.
 */
size_t irr_config_list_len(const struct IrrConfigList *list);

/*
 Copies layout `index` of `list` into a new handle.

 # Safety
 `list` must be a live handle; `out` must be writable.
 */
enum IrrStatus irr_config_list_get(const struct IrrConfigList *list,
                                   size_t index,
                                   struct IrrConfig **out);

/*
 # Safety
 `list` must be NULL or a handle not yet freed.
 */
void irr_config_list_free(struct IrrConfigList *list);

/*
 Uniformly random full-aperture thinned layout.

 # Safety
 `out` must be writable.
 */
enum IrrStatus irr_sample_thinned(size_t rows,
                                  size_t cols,
                                  size_t elements,
                                  uint64_t seed,
                                  struct IrrConfig **out);

/*
 Parses and validates a layout from its JSON form.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum IrrStatus irr_config_from_json(const char *json, struct IrrConfig **out);

/*
 JSON form of a layout.

 # Safety
 `config` must be a live handle; `out` must be writable.
 */
enum IrrStatus irr_config_to_json(const struct IrrConfig *config, char **out);

/*
 Number of feeds (clusters) of a layout (0 for NULL).

 # Safety
 `config` must be NULL or a live handle.
 */
size_t irr_config_feeds(const struct IrrConfig *config);

/*
 # Safety
 `config` must be NULL or a handle not yet freed.
 */
void irr_config_free(struct IrrConfig *config);

/*
 Built-in default scenario.

 # Safety
 `out` must be writable.
 */
enum IrrStatus irr_scenario_default(struct IrrScenario **out);

/*
 Scenario from TOML text; omitted keys take their defaults.

 # Safety
 `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum IrrStatus irr_scenario_from_toml(const char *toml, struct IrrScenario **out);

/*
 # Safety
 `scenario` must be NULL or a handle not yet freed.
 */
void irr_scenario_free(struct IrrScenario *scenario);

/*
 Monte-Carlo evaluation of `config` with architecture `arch` (`"fd"`,
 `"hfc"` or `"hpc"`) at the scenario SNR, including sidelobe levels.
 `realizations = 0` uses the scenario's count. The report is written as
 JSON.

 # Safety
 Handles must be live, `arch` NUL-terminated and `out_json` writable.
 */
enum IrrStatus irr_evaluate(const struct IrrScenario *scenario,
                            const struct IrrConfig *config,
                            const char *arch,
                            size_t realizations,
                            char **out_json);

/*
 Scalarized objective `β·R̄/R̄_ref + (1 − β)·Φ/Φ_ref` (SLLs in dB).

 # Safety
 `out` must be writable.
 */
enum IrrStatus irr_objective(double mean_se,
                             double sll_db,
                             double beta,
                             double r_ref,
                             double phi_ref_db,
                             double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* IRRARRAY_H */

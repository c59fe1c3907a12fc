#ifndef QNET_H
#define QNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QnetStatus {
  QNET_STATUS_OK = 0,
  QNET_STATUS_NULL_ARGUMENT = 1,
  QNET_STATUS_INVALID_UTF8 = 2,
  QNET_STATUS_PARSE = 3,
  QNET_STATUS_VALIDATION = 4,
  QNET_STATUS_RESOURCE = 5,
  QNET_STATUS_SOLVER = 6,
  QNET_STATUS_PANIC = 7,
} QnetStatus;

/**
 * A validated network with its path catalog and link set.
 */
typedef struct QnetNetwork QnetNetwork;

/**
 * A solved schedule.
 */
typedef struct QnetSchedule QnetSchedule;

typedef struct QnetSolveOptions {
  uintptr_t max_iterations;
  uint64_t pricing_node_budget;
  double termination_rel;
} QnetSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into the library from this thread.
 */
const char *qnet_last_error_message(void);

struct QnetSolveOptions qnet_solve_options_default(void);

/**
 * Parses and validates a network document. `path_cap` of 0 selects the
 * default cap.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum QnetStatus qnet_network_from_json(const char *json,
                                       uintptr_t path_cap,
                                       struct QnetNetwork **out);

/**
 * # Safety
 * `network` must be null or a handle from [`qnet_network_from_json`] not
 * yet freed.
 */
void qnet_network_free(struct QnetNetwork *network);

/**
 * # Safety
 * `network` must be a live handle.
 */
uintptr_t qnet_network_path_count(const struct QnetNetwork *network);

/**
 * # Safety
 * `network` must be a live handle.
 */
uintptr_t qnet_network_link_count(const struct QnetNetwork *network);

/**
 * Runs column generation. A null `options` selects the defaults.
 *
 * # Safety
 * `network` must be a live handle, `options` null or valid, `out` valid.
 */
enum QnetStatus qnet_solve(const struct QnetNetwork *network,
                           const struct QnetSolveOptions *options,
                           struct QnetSchedule **out);

/**
 * # Safety
 * `schedule` must be null or a handle from [`qnet_solve`] not yet freed.
 */
void qnet_schedule_free(struct QnetSchedule *schedule);

/**
 * Max-min weighted rate of the schedule, or NaN for a null handle.
 *
 * # Safety
 * `schedule` must be a live handle.
 */
double qnet_schedule_objective(const struct QnetSchedule *schedule);

/**
 * # Safety
 * `schedule` must be a live handle.
 */
uintptr_t qnet_schedule_iterations(const struct QnetSchedule *schedule);

/**
 * Schedule document as JSON, or null for a null handle. Free with
 * [`qnet_string_free`].
 *
 * # Safety
 * `schedule` must be a live handle.
 */
char *qnet_schedule_to_json(const struct QnetSchedule *schedule);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void qnet_string_free(char *s);

/**
 * Link weight of a path with the given total attenuation (dB) and priority.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum QnetStatus qnet_path_weight(double attenuation_db, double priority, double *out);

/**
 * Generates a random network from a generator spec in JSON and writes the
 * network document to `out`. Free it with [`qnet_string_free`].
 *
 * # Safety
 * `spec_json` must be a nul-terminated string and `out` a valid pointer.
 */
enum QnetStatus qnet_generate_json(const char *spec_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QNET_H */

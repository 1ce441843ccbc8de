#ifndef WIRETRACK_H
#define WIRETRACK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum WtEvent {
  WT_EVENT_MEASURE = 0,
  WT_EVENT_MOVE_START = 1,
  WT_EVENT_MOVE_END = 2,
  WT_EVENT_TRIAL_START = 3,
  WT_EVENT_TRIAL_END = 4,
  WT_EVENT_RETRIGGER = 5,
  WT_EVENT_SLEEP = 6,
  WT_EVENT_WAKE = 7,
  WT_EVENT_CLAMP = 8,
  WT_EVENT_SATURATION = 9,
} WtEvent;

typedef enum WtPhase {
  WT_PHASE_SLEEP = 0,
  WT_PHASE_SEARCHING = 1,
  WT_PHASE_MONITORING = 2,
} WtPhase;

typedef enum WtStatus {
  WT_STATUS_OK = 0,
  WT_STATUS_NULL_POINTER = 1,
  WT_STATUS_PARSE = 2,
  WT_STATUS_INVALID = 3,
  WT_STATUS_DOMAIN = 4,
  WT_STATUS_IO = 5,
  WT_STATUS_RUNTIME = 6,
  WT_STATUS_INDEX = 7,
  WT_STATUS_UTF8 = 8,
  WT_STATUS_PANIC = 9,
} WtStatus;

/**
 * A finished run: its report and full trace.
 */
typedef struct WtRun WtRun;

/**
 * A parsed, validated scenario.
 */
typedef struct WtScenario WtScenario;

typedef struct WtSweep {
  double x_star_m;
  double p_star_w;
  double grid_delta_m;
} WtSweep;

typedef struct WtReport {
  size_t trials;
  double final_g_best_w;
  double final_x_best_m;
  double harvested_j;
  double consumed_j;
  double clamp_overflow_j;
  double clamp_deficit_j;
  double net_j;
  double initial_charge_j;
  double final_charge_j;
  double distance_m;
  double end_t_s;
} WtReport;

typedef struct WtTraceRow {
  double t_s;
  double x_m;
  enum WtPhase phase;
  enum WtEvent event;
  double p_w;
  double g_best_w;
  double x_best_m;
  double inertia;
  double dx_m;
  /**
   * +1 forward, -1 backward.
   */
  int8_t direction;
  double charge_j;
  double odometer_m;
} WtTraceRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or "" after a success.
 * The pointer stays valid until the next `wt_*` call on this thread.
 */
const char *wt_last_error_message(void);

/**
 * Library version, a static NUL-terminated string.
 */
const char *wt_version(void);

/**
 * Load and validate a scenario file. On success `*out` owns a new handle.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum WtStatus wt_scenario_load(const char *path, struct WtScenario **out);

/**
 * Parse and validate scenario text. On success `*out` owns a new handle.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum WtStatus wt_scenario_parse(const char *text, struct WtScenario **out);

/**
 * Release a scenario. Null is ignored.
 *
 * # Safety
 * `scenario` must come from this library and not be used afterwards.
 */
void wt_scenario_free(struct WtScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle.
 */
enum WtStatus wt_scenario_set_seed(struct WtScenario *scenario, uint64_t seed);

/**
 * Select the strategy by its [`WtStrategy`] value.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum WtStatus wt_scenario_set_strategy(struct WtScenario *scenario, uint32_t strategy);

/**
 * Wire length of the scenario in metres.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum WtStatus wt_scenario_length_m(const struct WtScenario *scenario, double *out);

/**
 * Power available to the panel at `x_m` (metres along the wire) and `t_s`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum WtStatus wt_available_power(const struct WtScenario *scenario,
                                 double x_m,
                                 double t_s,
                                 double *out);

/**
 * Grid argmax of the field at `t_s` with spacing `delta_m`.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum WtStatus wt_sweep_argmax(const struct WtScenario *scenario,
                              double t_s,
                              double delta_m,
                              struct WtSweep *out);

/**
 * Simulate the scenario with its current seed and strategy.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum WtStatus wt_run(const struct WtScenario *scenario, struct WtRun **out);

/**
 * Release a run. Null is ignored.
 *
 * # Safety
 * `run` must come from this library and not be used afterwards.
 */
void wt_run_free(struct WtRun *run);

/**
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum WtStatus wt_run_report(const struct WtRun *run, struct WtReport *out);

/**
 * Number of trace rows, 0 for a null handle.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t wt_run_trace_len(const struct WtRun *run);

/**
 * Copy trace row `index` into `*out`.
 *
 * # Safety
 * `run` must be a live handle; `out` must be writable.
 */
enum WtStatus wt_run_trace_row(const struct WtRun *run, size_t index, struct WtTraceRow *out);

/**
 * Write the trace as CSV.
 *
 * # Safety
 * `run` must be a live handle; `path` a NUL-terminated string.
 */
enum WtStatus wt_run_write_csv(const struct WtRun *run, const char *path);

/**
 * Write the run report as JSON.
 *
 * # Safety
 * `run` must be a live handle; `path` a NUL-terminated string.
 */
enum WtStatus wt_run_write_report(const struct WtRun *run, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WIRETRACK_H */

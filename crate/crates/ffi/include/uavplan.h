#ifndef UAVPLAN_H
#define UAVPLAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum UavAlgorithm {
  UAV_ALGORITHM_GREEDY = 0,
  UAV_ALGORITHM_STRIP = 1,
  UAV_ALGORITHM_ZIGZAG = 2,
  UAV_ALGORITHM_EXACT = 3,
} UavAlgorithm;

typedef enum UavStatus {
  UAV_STATUS_OK = 0,
  UAV_STATUS_NULL_POINTER = 1,
  UAV_STATUS_INVALID_ARGUMENT = 2,
  UAV_STATUS_INVALID_SCENARIO = 3,
  UAV_STATUS_INFEASIBLE = 4,
  UAV_STATUS_NO_DATA_COLLECTED = 5,
  UAV_STATUS_TOO_MANY_NODES = 6,
  UAV_STATUS_PARSE = 7,
  UAV_STATUS_BUFFER_TOO_SMALL = 8,
  UAV_STATUS_INTERNAL = 99,
} UavStatus;

/**
 * A planned and evaluated flight.
 */
typedef struct UavFlight UavFlight;

/**
 * A validated scenario plus the area used by the sweep baselines.
 */
typedef struct UavScenario UavScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *uav_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void uav_string_free(char *s);

/**
 * Builds a scenario from node arrays of length `n`; node ids are 1..=n.
 * Estimation parameters default to sigma2 = 1, W = 1, S = 10.
 *
 * # Safety
 * `xs`, `ys` and `radii` must point to `n` readable values (or `n == 0`);
 * `out` must be writable.
 */
enum UavStatus uav_scenario_new(size_t n,
                                const double *xs,
                                const double *ys,
                                const double *radii,
                                double start_x,
                                double start_y,
                                double end_x,
                                double end_y,
                                double v_max,
                                double horizon,
                                struct UavScenario **out);

/**
 * Random scenario with `n` nodes in a `width` x `height` area centered on
 * the origin, flying corner to corner.
 *
 * # Safety
 * `out` must be writable.
 */
enum UavStatus uav_scenario_generate(uint64_t seed,
                                     size_t n,
                                     double width,
                                     double height,
                                     double radius,
                                     double v_max,
                                     double horizon,
                                     struct UavScenario **out);

/**
 * Parses a scenario JSON document.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum UavStatus uav_scenario_from_json(const char *json, struct UavScenario **out);

/**
 * Serializes a scenario; free the result with [`uav_string_free`].
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum UavStatus uav_scenario_to_json(const struct UavScenario *scenario, char **out);

/**
 * Number of sensor nodes, or 0 for a null handle.
 *
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t uav_scenario_node_count(const struct UavScenario *scenario);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void uav_scenario_free(struct UavScenario *scenario);

/**
 * Plans and evaluates a flight. `algorithm` is a [`UavAlgorithm`] value.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be writable.
 */
enum UavStatus uav_plan(const struct UavScenario *scenario,
                        int32_t algorithm,
                        struct UavFlight **out);

/**
 * Number of nodes whose data is collected (K).
 *
 * # Safety
 * `flight` must be null or a live handle.
 */
size_t uav_flight_visited_count(const struct UavFlight *flight);

/**
 * Path length in meters, or NaN for a null handle.
 *
 * # Safety
 * `flight` must be null or a live handle.
 */
double uav_flight_length(const struct UavFlight *flight);

/**
 * Copies the visited node ids in visiting order (greedy and exact) or in
 * id order (sweeps). `written` receives the required length; fails with
 * `BufferTooSmall` if `capacity` is less.
 *
 * # Safety
 * `flight` must be a live handle; `ids` must have room for `capacity`
 * values; `written` must be writable.
 */
enum UavStatus uav_flight_order(const struct UavFlight *flight,
                                size_t *ids,
                                size_t capacity,
                                size_t *written);

/**
 * Number of trajectory vertices.
 *
 * # Safety
 * `flight` must be null or a live handle.
 */
size_t uav_flight_vertex_count(const struct UavFlight *flight);

/**
 * Copies trajectory vertices as `[t, x, y]` triples into `txy`, which must
 * hold `3 * capacity` doubles.
 *
 * # Safety
 * `flight` must be a live handle; `txy` must have room for `3 * capacity`
 * values; `written` must be writable.
 */
enum UavStatus uav_flight_vertices(const struct UavFlight *flight,
                                   double *txy,
                                   size_t capacity,
                                   size_t *written);

/**
 * # Safety
 * `flight` must be null or a handle not yet freed.
 */
void uav_flight_free(struct UavFlight *flight);

/**
 * Estimation MSE after collecting `k` readings. `k == 0` gives
 * `NoDataCollected`.
 *
 * # Safety
 * `out` must be writable.
 */
enum UavStatus uav_mse(double sigma2, double half_range, uint32_t bits, size_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UAVPLAN_H */

#ifndef QBAYES_H
#define QBAYES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

typedef enum QbStatus {
  QB_STATUS_OK = 0,
  QB_STATUS_NULL_POINTER = 1,
  QB_STATUS_INVALID_INPUT = 2,
  QB_STATUS_PARSE = 3,
  QB_STATUS_NO_RESULT = 4,
  QB_STATUS_INTERNAL = 5,
  QB_STATUS_PANIC = 6,
} QbStatus;

// A validated game definition.
typedef struct QbGame QbGame;

// Equilibria found by [`qb_solve`].
typedef struct QbSolution QbSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into the library on this thread.
const char *qb_last_error_message(void);

// Built-in game by name (`extended-bos` or `three-player`).
//
// # Safety
// `name` must be a NUL-terminated string; `out` must be writable.
enum QbStatus qb_game_builtin(const char *name, struct QbGame **out);

// Parses and validates a game definition in the JSON file format.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum QbStatus qb_game_from_json(const char *json, struct QbGame **out);

// Serializes a game; free the string with [`qb_string_free`].
//
// # Safety
// `game` must come from this library; `out` must be writable.
enum QbStatus qb_game_to_json(const struct QbGame *game, char **out);

// # Safety
// `game` must come from this library; `out` must be writable.
enum QbStatus qb_game_player_count(const struct QbGame *game, size_t *out);

// # Safety
// `game` must come from this library or be null; it must not be used afterwards.
void qb_game_free(struct QbGame *game);

// # Safety
// `s` must be a string returned by this library or null.
void qb_string_free(char *s);

// Joint probabilities for `n_angles / 2` players. `angles` holds two angles
// per player (type 0, type 1), each in `[0, 2π)`. `out` receives
// `4^n` values, type profile outer and move profile inner, player 0 as the
// most significant bit.
//
// # Safety
// `angles` must hold `n_angles` values and `out` room for `out_len`.
enum QbStatus qb_joint_probabilities(const double *angles,
                                     size_t n_angles,
                                     double gamma,
                                     double phi,
                                     double *out,
                                     size_t out_len);

// Type-averaged payoff of every player; `out` receives one value per player.
//
// # Safety
// `game` must come from this library; `angles` must hold `n_angles` values
// and `out` room for `out_len`.
enum QbStatus qb_payoffs(const struct QbGame *game,
                         const double *angles,
                         size_t n_angles,
                         double gamma,
                         double phi,
                         double *out,
                         size_t out_len);

// Largest left-hand side over the 64 two-player Cereceda variants.
//
// # Safety
// `angles` must hold 4 values; `out` must be writable.
enum QbStatus qb_max_cereceda(const double *angles, double gamma, double phi, double *out);

// Searches for equilibria of a two-player game. `n_starts` random starts
// are added to the corner profiles; `seed` fixes them. Returns
// [`QbStatus::NoResult`] (and no handle) when nothing converges.
//
// # Safety
// `game` must come from this library; `out` must be writable.
enum QbStatus qb_solve(const struct QbGame *game,
                       double gamma,
                       double phi,
                       size_t n_starts,
                       uint64_t seed,
                       struct QbSolution **out);

// Number of distinct equilibria or families in a solution.
//
// # Safety
// `solution` must come from this library; `out` must be writable.
enum QbStatus qb_solution_count(const struct QbSolution *solution, size_t *out);

// Representative profile and payoffs of equilibrium `index`. `angles_out`
// needs room for 2 values per player, `payoffs_out` for one per player.
//
// # Safety
// `solution` must come from this library; the output buffers must have the
// stated sizes.
enum QbStatus qb_solution_get(const struct QbSolution *solution,
                              size_t index,
                              double *angles_out,
                              double *payoffs_out);

// Full-precision JSON report; free the string with [`qb_string_free`].
//
// # Safety
// `solution` must come from this library; `out` must be writable.
enum QbStatus qb_solution_to_json(const struct QbSolution *solution, char **out);

// # Safety
// `solution` must come from this library or be null; it must not be used afterwards.
void qb_solution_free(struct QbSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QBAYES_H */

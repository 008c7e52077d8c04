#ifndef QGAME_H
#define QGAME_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QgFamilyKind {
  QG_FAMILY_KIND_POINT = 0,
  QG_FAMILY_KIND_PHI_SUM = 1,
  QG_FAMILY_KIND_ALL_STRATEGIES = 2,
  QG_FAMILY_KIND_CUSTOM = 3,
} QgFamilyKind;

// Result code of every fallible call.
typedef enum QgStatus {
  QG_STATUS_OK = 0,
  QG_STATUS_NULL_POINTER = 1,
  QG_STATUS_OUT_OF_RANGE = 2,
  QG_STATUS_INVALID_ARGUMENT = 3,
  QG_STATUS_UNKNOWN_GAME = 4,
  // Malformed or invalid game-definition document.
  QG_STATUS_PARSE_ERROR = 5,
  QG_STATUS_BUFFER_TOO_SMALL = 6,
  QG_STATUS_INTERNAL = 7,
} QgStatus;

// A 2×2 game, optionally tagged with its builtin id.
typedef struct QgGame QgGame;

// Equilibrium families found at one corruption rate.
typedef struct QgNeReport QgNeReport;

typedef struct QgStrategy {
  double theta;
  double phi;
} QgStrategy;

typedef struct QgPayoffs {
  double alice;
  double bob;
} QgPayoffs;

// One equilibrium family: its representative profile and summary.
typedef struct QgFamily {
  enum QgFamilyKind kind;
  struct QgStrategy alice;
  struct QgStrategy bob;
  struct QgPayoffs payoffs;
  double max_gain;
  size_t member_count;
  // Nonzero when members do not share one payoff pair.
  int32_t payoff_parametric;
} QgFamily;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next failing call on the same thread.
const char *qg_last_error(void);

// Creates one of the builtin games `"pd"`, `"sd"` or `"bos"`.
//
// # Safety
// `id` must be a NUL-terminated string; `out` must be writable.
enum QgStatus qg_game_builtin(const char *id, struct QgGame **out);

// Creates a game from a game-definition JSON document.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum QgStatus qg_game_from_json(const char *json, struct QgGame **out);

// Releases a game. Null is ignored.
//
// # Safety
// `game` must come from a `qg_game_*` constructor and not be used afterwards.
void qg_game_free(struct QgGame *game);

// Expected payoffs of a quantum strategy pair at corruption rate `r`.
//
// # Safety
// `game` must be a live handle; `out` must be writable.
enum QgStatus qg_quantum_payoffs(const struct QgGame *game,
                                 double r,
                                 struct QgStrategy alice,
                                 struct QgStrategy bob,
                                 struct QgPayoffs *out);

// Expected payoffs when each player applies `σ₀` with the given probability
// and `iσ_y` otherwise.
//
// # Safety
// `game` must be a live handle; `out` must be writable.
enum QgStatus qg_classical_payoffs(const struct QgGame *game,
                                   double r,
                                   double alice_p0,
                                   double bob_p0,
                                   struct QgPayoffs *out);

// Outcome probabilities `p[2j + l]`, Alice's action `j`, Bob's `l`.
//
// # Safety
// `out` must point to four writable doubles.
enum QgStatus qg_outcome_distribution(double r,
                                      struct QgStrategy alice,
                                      struct QgStrategy bob,
                                      double *out);

// Corruption rates where `player` (0 Alice, 1 Bob) gets the same payoff
// from the default quantum profile as from the classical equilibrium played
// through the same corrupt source. Writes up to `capacity` rates and the
// total count; fails with `BufferTooSmall` when they do not fit.
//
// # Safety
// `game` must be a live handle; `rates` must hold `capacity` doubles (may
// be null when `capacity` is 0); `count` must be writable.
enum QgStatus qg_critical_rates(const struct QgGame *game,
                                int32_t player,
                                double *rates,
                                size_t capacity,
                                size_t *count);

// Searches the two-parameter strategy space for ε-equilibria at rate `r`
// with the default grids and ε = 1e-6.
//
// # Safety
// `game` must be a live handle; `out` must be writable.
enum QgStatus qg_ne_search(const struct QgGame *game, double r, struct QgNeReport **out);

// Number of families in a report; 0 for null.
//
// # Safety
// `report` must be a live handle or null.
size_t qg_ne_report_len(const struct QgNeReport *report);

// Summary of family `index`.
//
// # Safety
// `report` must be a live handle; `out` must be writable.
enum QgStatus qg_ne_report_family(const struct QgNeReport *report,
                                  size_t index,
                                  struct QgFamily *out);

// Releases a report. Null is ignored.
//
// # Safety
// `report` must come from [`qg_ne_search`] and not be used afterwards.
void qg_ne_report_free(struct QgNeReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QGAME_H */

#ifndef EWL_H
#define EWL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum EwlStatus {
  EWL_STATUS_OK = 0,
  EWL_STATUS_NULL_POINTER = 1,
  EWL_STATUS_INVALID_UTF8 = 2,
  EWL_STATUS_PARSE = 3,
  EWL_STATUS_DOMAIN = 4,
  EWL_STATUS_NOT_EXACT = 5,
  EWL_STATUS_NOT_RATIONAL = 6,
  EWL_STATUS_INVALID_CLASS_PARAMS = 7,
  EWL_STATUS_NOT_DISCRETE = 8,
  EWL_STATUS_DIMENSION_MISMATCH = 9,
  EWL_STATUS_OUT_OF_RANGE = 10,
  EWL_STATUS_PANIC = 11,
} EwlStatus;

// An extended game over a finite set of unitary strategies.
typedef struct EwlExtendedGame EwlExtendedGame;

// A classical 2×2 game.
typedef struct EwlGame EwlGame;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *ewl_last_error_message(void);

// Library version as a static string.
const char *ewl_version(void);

// Parses `{"payoffs": [[[a,b],[c,d]],[[e,f],[g,h]]]}`. With `exact`, entries
// must be integers or rational strings such as `"17/8"`.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum EwlStatus ewl_game_from_json(const char *json, bool exact, struct EwlGame **out);

// Float game from `a00, b00, a01, b01, a10, b10, a11, b11`.
//
// # Safety
// `payoffs` must point to 8 doubles and `out` must be valid.
enum EwlStatus ewl_game_from_doubles(const double *payoffs, struct EwlGame **out);

// # Safety
// `game` must come from this library or be null.
void ewl_game_free(struct EwlGame *game);

// Extends `game` with the reference member of a class (`"A1"` … `"E2"`).
// `theta1` is an angle such as `"1/3 pi"`; pass null for A1, A2 and B.
//
// # Safety
// Pointers must be valid; `theta1` may be null.
enum EwlStatus ewl_extend_class(const struct EwlGame *game,
                                const char *class_name,
                                const char *theta1,
                                struct EwlExtendedGame **out);

// Extends `game` with a JSON list of strategies, each `[theta, alpha, beta]`
// or `{"theta", "alpha", "beta"}`; angles are strings like `"1/2 pi"` or
// numbers in radians.
//
// # Safety
// Pointers must be valid.
enum EwlStatus ewl_extend_strategies(const struct EwlGame *game,
                                     const char *strategies_json,
                                     struct EwlExtendedGame **out);

// # Safety
// `game` must come from this library or be null.
void ewl_extended_free(struct EwlExtendedGame *game);

// Number of strategies per player, or 0 for a null handle.
//
// # Safety
// `game` must be valid or null.
size_t ewl_extended_size(const struct EwlExtendedGame *game);

// Payoff pair at `(row, col)` as doubles.
//
// # Safety
// Pointers must be valid.
enum EwlStatus ewl_extended_payoff(const struct EwlExtendedGame *game,
                                   size_t row,
                                   size_t col,
                                   double *u1,
                                   double *u2);

// `{"labels": [...], "payoffs": [[[u1, u2], ...], ...]}`; exact games use rational strings.
//
// # Safety
// Pointers must be valid.
enum EwlStatus ewl_extended_to_json(const struct EwlExtendedGame *game, char **out);

// All equilibria as a JSON array of `{"p1", "p2", "payoff", "kind", ...}`.
//
// # Safety
// Pointers must be valid.
enum EwlStatus ewl_equilibria_json(const struct EwlExtendedGame *game, char **out);

// Checks whether the extensions of all four isomorphic variants of `game`
// are strongly isomorphic. A failed check is not an error: `*isomorphic` is false.
//
// # Safety
// Pointers must be valid.
enum EwlStatus ewl_verify(const struct EwlGame *game,
                          const char *strategies_json,
                          bool *isomorphic);

// Payoffs of `U(p1)` against `U(p2)`, each given as `{theta, alpha, beta}` in radians.
//
// # Safety
// `p1` and `p2` must point to 3 doubles; other pointers must be valid.
enum EwlStatus ewl_payoff(const struct EwlGame *game,
                          const double *p1,
                          const double *p2,
                          double *u1,
                          double *u2);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library or be null.
void ewl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EWL_H */

#ifndef SFC_H
#define SFC_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define SFC_PASS -1

#define SFC_NUM_FEATURES 10

typedef enum SfcStatus {
  SFC_STATUS_OK = 0,
  SFC_STATUS_NULL_POINTER = 1,
  SFC_STATUS_INVALID_ARGUMENT = 2,
  SFC_STATUS_ILLEGAL_MOVE = 3,
  SFC_STATUS_TERMINAL_POSITION = 4,
  SFC_STATUS_IO = 5,
  SFC_STATUS_BAD_MODEL = 6,
  SFC_STATUS_BUFFER_TOO_SMALL = 7,
  SFC_STATUS_PANIC = 8,
} SfcStatus;

/**
 * Opaque per-phase model table.
 */
typedef struct SfcModel SfcModel;

/**
 * Opaque position handle.
 */
typedef struct SfcPosition SfcPosition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next failing call on the same thread.
 */
const char *sfc_last_error(void);

/**
 * Standard starting position. Never null.
 */
struct SfcPosition *sfc_position_initial(void);

/**
 * Builds a position from bitboards (bit `rank * 8 + file`, a1 = bit 0).
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum SfcStatus sfc_position_from_masks(uint64_t black,
                                       uint64_t white,
                                       bool black_to_move,
                                       struct SfcPosition **out);

/**
 * # Safety
 * `pos` must be null or a handle from this library not yet freed.
 */
void sfc_position_free(struct SfcPosition *pos);

/**
 * # Safety
 * `pos` must be a live handle; `black`, `white` and `black_to_move` must be
 * null or writable.
 */
enum SfcStatus sfc_position_masks(const struct SfcPosition *pos,
                                  uint64_t *black,
                                  uint64_t *white,
                                  bool *black_to_move);

/**
 * Bitmask of legal placements; zero when the mover must pass or the game
 * is over.
 *
 * # Safety
 * `pos` must be a live handle or null (null yields 0).
 */
uint64_t sfc_position_moves(const struct SfcPosition *pos);

/**
 * # Safety
 * `pos` must be a live handle or null (null yields false).
 */
bool sfc_position_is_terminal(const struct SfcPosition *pos);

/**
 * Plays `square` (0..63) or [`SFC_PASS`], writing a new handle to `out`.
 *
 * # Safety
 * `pos` must be a live handle and `out` writable.
 */
enum SfcStatus sfc_position_apply(const struct SfcPosition *pos,
                                  int32_t square,
                                  struct SfcPosition **out);

/**
 * Black's discs minus White's.
 *
 * # Safety
 * `pos` must be a live handle or null (null yields 0).
 */
int32_t sfc_position_black_differential(const struct SfcPosition *pos);

/**
 * Writes the [`SFC_NUM_FEATURES`] feature values into `out`.
 *
 * # Safety
 * `pos` must be a live handle and `out` must hold `len` doubles.
 */
enum SfcStatus sfc_position_features(const struct SfcPosition *pos, double *out, size_t len);

/**
 * Loads every model file in a directory as one phase table.
 *
 * # Safety
 * `dir` must be a NUL-terminated string and `out` writable.
 */
enum SfcStatus sfc_model_load_dir(const char *dir, struct SfcModel **out);

/**
 * Loads a single model file, used for every phase.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum SfcStatus sfc_model_load_file(const char *path, struct SfcModel **out);

/**
 * # Safety
 * `model` must be null or a handle from this library not yet freed.
 */
void sfc_model_free(struct SfcModel *model);

/**
 * Winning probability of the side to move.
 *
 * # Safety
 * `model` and `pos` must be live handles and `out` writable.
 */
enum SfcStatus sfc_model_evaluate(const struct SfcModel *model,
                                  const struct SfcPosition *pos,
                                  double *out);

/**
 * Iterative-deepening search. A null `model` uses the built-in heuristic.
 * Writes the chosen square (or [`SFC_PASS`]) and its value in [0, 1].
 *
 * # Safety
 * `model` must be null or live, `pos` live, outputs writable or null.
 */
enum SfcStatus sfc_search(const struct SfcModel *model,
                          const struct SfcPosition *pos,
                          uint32_t depth,
                          uint32_t wdl_empties,
                          int32_t *out_square,
                          double *out_score);

/**
 * `(wins + draws/2) / games`; 0.5 when no games were played.
 */
double sfc_winning_percentage(uint32_t wins, uint32_t draws, uint32_t losses);

/**
 * Conservative match p-value; `significant` is set when it is below `level`.
 *
 * # Safety
 * Outputs must be writable or null.
 */
enum SfcStatus sfc_significance(uint32_t wins,
                                uint32_t draws,
                                uint32_t losses,
                                double level,
                                double *out_p,
                                bool *out_significant);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SFC_H */

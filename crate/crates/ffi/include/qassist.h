#ifndef QASSIST_H
#define QASSIST_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QassistStatus {
  QASSIST_STATUS_OK = 0,
  QASSIST_STATUS_NULL_ARGUMENT = 1,
  QASSIST_STATUS_INVALID_UTF8 = 2,
  QASSIST_STATUS_INVALID_JSON = 3,
  QASSIST_STATUS_EMPTY_INPUT = 4,
  QASSIST_STATUS_TOO_LARGE = 5,
  QASSIST_STATUS_NOT_FOUND = 6,
  QASSIST_STATUS_INVALID_PARAMS = 7,
  QASSIST_STATUS_NOT_CONFIRMED = 8,
  QASSIST_STATUS_INSTANCE_TOO_LARGE = 9,
  QASSIST_STATUS_TIMEOUT = 10,
  QASSIST_STATUS_NO_FEASIBLE_SOLUTION = 11,
  QASSIST_STATUS_STORAGE = 12,
  QASSIST_STATUS_INTERNAL = 13,
  QASSIST_STATUS_PANIC = 14,
} QassistStatus;

/**
 * Opaque engine handle. Safe to share between threads.
 */
typedef struct QassistEngine QassistEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Opens an engine whose logs live in `data_dir`.
 *
 * # Safety
 * `data_dir` must be a NUL-terminated string and `out` a valid pointer.
 */
enum QassistStatus qassist_engine_new(const char *data_dir, struct QassistEngine **out);

/**
 * # Safety
 * `engine` must come from [`qassist_engine_new`] and not be used afterwards. Null is ignored.
 */
void qassist_engine_free(struct QassistEngine *engine);

/**
 * Sends one user message. `session_id` may be null to start a session.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum QassistStatus qassist_chat(const struct QassistEngine *engine,
                                const char *session_id,
                                const char *text,
                                char **out_json);

/**
 * Confirms the pending request. `params_json` may be null to accept the extracted parameters.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum QassistStatus qassist_confirm(const struct QassistEngine *engine,
                                   const char *session_id,
                                   const char *params_json,
                                   char **out_json);

/**
 * Runs the solver for a confirmed TSP or knapsack request. Blocks until done or timed out.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum QassistStatus qassist_compute(const struct QassistEngine *engine,
                                   const char *session_id,
                                   const char *compute_token,
                                   char **out_json);

/**
 * # Safety
 * Pointers must be valid; `comment` may be null.
 */
enum QassistStatus qassist_feedback(const struct QassistEngine *engine,
                                    const char *session_id,
                                    int32_t stars,
                                    const char *comment,
                                    char **out_json);

/**
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum QassistStatus qassist_delete_session(const struct QassistEngine *engine,
                                          const char *session_id,
                                          char **out_json);

/**
 * Classifies an utterance without touching any session.
 *
 * # Safety
 * `text` must be NUL-terminated and `out_json` valid.
 */
enum QassistStatus qassist_classify(const char *text, char **out_json);

/**
 * Span comparison used for extraction scoring: case, punctuation and spacing are ignored.
 *
 * # Safety
 * Both strings must be NUL-terminated and `out` valid.
 */
enum QassistStatus qassist_exact_match(const char *predicted, const char *expected, bool *out);

/**
 * Error envelope JSON of the last failed call on this thread, or null.
 * The pointer stays valid until the next call on the same thread.
 */
const char *qassist_last_error(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void qassist_string_free(char *s);

/**
 * Static version string of the engine.
 */
const char *qassist_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QASSIST_H */

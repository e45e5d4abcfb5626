#ifndef LM_H
#define LM_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LmStatus {
  LM_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  LM_STATUS_NULL = 1,
  LM_STATUS_INVALID_ARG = 2,
  /**
   * A value left `[-M, M]` under the trap policy, or stepped off the grid.
   */
  LM_STATUS_BOUNDARY = 3,
  /**
   * A set would exceed `M^2` elements.
   */
  LM_STATUS_CARDINALITY = 4,
  LM_STATUS_PARSE = 5,
  LM_STATUS_DIV_ZERO = 6,
  /**
   * Derivative requested outside the polynomial fragment.
   */
  LM_STATUS_FRAGMENT = 7,
  /**
   * Q8.8 result outside 16 bits.
   */
  LM_STATUS_TRAP = 8,
  /**
   * An enumeration or state space is above the configured cap.
   */
  LM_STATUS_CAP = 9,
  /**
   * A step budget ran out before a decision.
   */
  LM_STATUS_BUDGET = 10,
  LM_STATUS_CONTEXT_MISMATCH = 11,
  /**
   * A result does not fit the C output type.
   */
  LM_STATUS_OVERFLOW = 12,
  LM_STATUS_PANIC = 13,
} LmStatus;

typedef enum LmPolicy {
  LM_POLICY_SATURATE = 0,
  LM_POLICY_TRAP = 1,
} LmPolicy;

typedef enum LmRounding {
  LM_ROUNDING_TRUNCATE = 0,
  LM_ROUNDING_SYMMETRIC = 1,
} LmRounding;

typedef enum LmLaw {
  LM_LAW_COMMUTATIVITY = 0,
  LM_LAW_ASSOCIATIVITY = 1,
  LM_LAW_DISTRIBUTIVITY = 2,
  LM_LAW_CANCELLATION = 3,
} LmLaw;

typedef enum LmOutcomeKind {
  LM_OUTCOME_KIND_HALTED = 0,
  LM_OUTCOME_KIND_CYCLE = 1,
  LM_OUTCOME_KIND_TRAPPED = 2,
} LmOutcomeKind;

/**
 * Opaque one-variable function.
 */
typedef struct LmFunction LmFunction;

/**
 * Opaque VM program.
 */
typedef struct LmProgram LmProgram;

/**
 * Opaque cardinality-bounded set.
 */
typedef struct LmSet LmSet;

/**
 * Summary of one exhaustive law check. `canonical` holds the numerators of
 * the `(M, M, -M)` associativity witness when `has_canonical` is set.
 */
typedef struct LmLawSummary {
  uint64_t universe;
  uint64_t in_range_universe;
  uint64_t counterexample_count;
  bool holds_universally;
  bool in_range_holds;
  bool meets_expectation;
  bool has_canonical;
  int64_t canonical[3];
} LmLawSummary;

/**
 * Result of [`lm_program_decide`]. `steps` is set for halted and trapped
 * runs; `prefix` and `period` for cycles.
 */
typedef struct LmOutcome {
  uint32_t kind;
  uint64_t steps;
  uint64_t prefix;
  uint64_t period;
} LmOutcome;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the last error message on this thread, or null if the last call
 * succeeded. Release with [`lm_string_free`].
 */
char *lm_last_error_message(void);

void lm_string_free(char *s);

/**
 * Static name of a status code, `"UNKNOWN"` for anything else.
 */
const char *lm_status_name(uint32_t status);

/**
 * `M = 2^bits - 1`.
 */
enum LmStatus lm_context_m(uint32_t bits, int64_t *out_m);

/**
 * Maps `num/den` onto the grid; writes the numerator over `M`.
 */
enum LmStatus lm_value_map(uint32_t bits, int64_t num, int64_t den, int64_t *out_k);

/**
 * Like [`lm_value_map`] for a literal such as `"0.3"`, `"-3/10"` or `"7"`.
 */
enum LmStatus lm_value_map_str(uint32_t bits, const char *literal, int64_t *out_k);

/**
 * Whether `num/den` is a grid point.
 */
enum LmStatus lm_in_grid(uint32_t bits, int64_t num, int64_t den, bool *out_flag);

enum LmStatus lm_add(uint32_t bits, uint32_t policy_, int64_t a, int64_t b, int64_t *out_k);

enum LmStatus lm_mul(uint32_t bits, uint32_t policy_, int64_t a, int64_t b, int64_t *out_k);

enum LmStatus lm_set_new(uint32_t bits, struct LmSet **out_set);

void lm_set_free(struct LmSet *set);

/**
 * Inserts `k/M` in place. On a cardinality violation the set is unchanged.
 */
enum LmStatus lm_set_insert(struct LmSet *set, int64_t k);

enum LmStatus lm_set_contains(const struct LmSet *set, int64_t k, bool *out_flag);

enum LmStatus lm_set_card(const struct LmSet *set, uint64_t *out_card);

/**
 * Maximum cardinality, `M^2`.
 */
enum LmStatus lm_set_capacity(const struct LmSet *set, uint64_t *out_cap);

/**
 * New handle holding `a ∪ b`.
 */
enum LmStatus lm_set_union(const struct LmSet *a, const struct LmSet *b, struct LmSet **out_set);

/**
 * New handle holding `a ∩ b`.
 */
enum LmStatus lm_set_intersect(const struct LmSet *a,
                               const struct LmSet *b,
                               struct LmSet **out_set);

/**
 * Parses a one-variable function body such as `"0.3*x"`. The variable is
 * whichever single name occurs; a constant body takes `x`.
 */
enum LmStatus lm_function_parse(const char *body, struct LmFunction **out_fn);

void lm_function_free(struct LmFunction *f);

/**
 * `f^M(k/M)`: exact evaluation mapped once onto the grid.
 */
enum LmStatus lm_function_eval(const struct LmFunction *f,
                               uint32_t bits,
                               uint32_t policy_,
                               int64_t k,
                               int64_t *out_k);

/**
 * Grid value of the exact derivative at `k/M`.
 */
enum LmStatus lm_function_mapped_derivative(const struct LmFunction *f,
                                            uint32_t bits,
                                            int64_t k,
                                            int64_t *out_k);

/**
 * Naive grid difference quotient `(f^M(x + 1/M) - f^M(x)) * M` at `k/M`.
 */
enum LmStatus lm_function_finite_difference(const struct LmFunction *f,
                                            uint32_t bits,
                                            int64_t k,
                                            int64_t *out_k);

enum LmStatus lm_q88_add(int16_t a, int16_t b, int16_t *out_raw);

enum LmStatus lm_q88_mul(int16_t a, int16_t b, uint32_t rounding, int16_t *out_raw);

/**
 * Raw word for `floor(256 * num/den)`; traps outside 16 bits.
 */
enum LmStatus lm_q88_from_ratio(int64_t num, int64_t den, int16_t *out_raw);

/**
 * Exhaustive check of one law; `cap` bounds the operand-tuple count
 * (0 selects the default).
 */
enum LmStatus lm_check_law(uint32_t bits,
                           uint32_t law,
                           uint64_t cap,
                           struct LmLawSummary *out_summary);

/**
 * Parses a program in the text format (`#bits`, `#regs`, optional
 * `#policy`, one instruction per line).
 */
enum LmStatus lm_program_parse(const char *src, struct LmProgram **out_prog);

void lm_program_free(struct LmProgram *p);

enum LmStatus lm_program_regs(const struct LmProgram *p, size_t *out_regs);

/**
 * `|Σ| = (len + 1) * (2 M^2 + 1)^R`. `OVERFLOW` when it needs more than
 * 64 bits.
 */
enum LmStatus lm_program_state_space(const struct LmProgram *p, uint64_t *out_size);

/**
 * Decides termination from `pc = 0` with the given register numerators
 * (`regs` may be null when `nregs` is 0; registers past `nregs` start at zero). `budget` 0
 * means no budget.
 */
enum LmStatus lm_program_decide(const struct LmProgram *p,
                                const int64_t *regs,
                                size_t nregs,
                                uint64_t budget,
                                struct LmOutcome *out_outcome);

/**
 * Renders `k/M` as text. Release with [`lm_string_free`]; null on error.
 */
char *lm_value_to_string(uint32_t bits, int64_t k);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LM_H */

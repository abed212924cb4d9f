#ifndef FFMU_H
#define FFMU_H

/* Generated by cbindgen from the ffmu-capi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum FfmuStatus {
  FFMU_STATUS_OK = 0,
  FFMU_STATUS_NULL_POINTER = 1,
  FFMU_STATUS_INVALID_UTF8 = 2,
  FFMU_STATUS_PARSE_ERROR = 3,
  FFMU_STATUS_INVALID_ARGUMENT = 4,
  FFMU_STATUS_TABLE_TOO_SMALL = 5,
  FFMU_STATUS_IO_ERROR = 6,
  // The requested identity check ran and found the two sides unequal.
  FFMU_STATUS_IDENTITY_FAILED = 7,
} FfmuStatus;

// A field of order q, shared by every object built over it.
typedef struct FfmuField FfmuField;

// An immutable table of all primes up to a maximum degree.
typedef struct FfmuTable FfmuTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Detail text of the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *ffmu_last_error_message(void);

// Release a string returned by any ffmu call.
void ffmu_string_free(char *s);

// Create GF(q) for a prime power q, using built-in moduli for q in {4,8,9}.
enum FfmuStatus ffmu_field_new(uint64_t q, struct FfmuField **out);

// Create GF(q) with an explicit extension modulus over GF(p), given in the
// polynomial text format (e.g. "1,0,1" or "T^2+1").
enum FfmuStatus ffmu_field_new_with_modulus(uint64_t q,
                                            const char *modulus,
                                            struct FfmuField **out);

void ffmu_field_free(struct FfmuField *field);

// The order q of the field.
uint64_t ffmu_field_order(const struct FfmuField *field);

// Enumerate and validate all primes up to max_degree.
enum FfmuStatus ffmu_table_build(const struct FfmuField *field,
                                 uint32_t max_degree,
                                 uint32_t workers,
                                 struct FfmuTable **out);

// Load a table cache, re-validating per-degree counts.
enum FfmuStatus ffmu_table_load(const struct FfmuField *field,
                                const char *path,
                                struct FfmuTable **out);

// Write the table in the line-oriented cache format.
enum FfmuStatus ffmu_table_save(const struct FfmuTable *table, const char *path);

void ffmu_table_free(struct FfmuTable *table);

uint32_t ffmu_table_max_degree(const struct FfmuTable *table);

// Number of primes of one degree held by the table.
uint64_t ffmu_table_prime_count(const struct FfmuTable *table, uint32_t degree);

// Exact count of monic irreducibles of degree n, as a decimal string.
enum FfmuStatus ffmu_prime_count(const struct FfmuField *field, uint32_t n, char **out);

// Deterministic irreducibility test; writes 1 or 0 into `out`.
enum FfmuStatus ffmu_is_irreducible(const struct FfmuField *field, const char *poly, int32_t *out);

// Mobius function of a monic polynomial.
enum FfmuStatus ffmu_mobius(const struct FfmuField *field,
                            const struct FfmuTable *table,
                            const char *poly,
                            int64_t *out);

// Full factorization as a JSON report string.
enum FfmuStatus ffmu_factor_json(const struct FfmuField *field,
                                 const struct FfmuTable *table,
                                 const char *poly,
                                 char **out_json);

// Check the order-k duality identities on a profile literal
// (`d:<deg>[,S][*<mult>] ...`) with a weight spec (`x`, `x^K`, `ind`,
// `table:v1,...`). Writes 1 into `pass` iff every order agrees; a clean run
// that finds a mismatch returns `IdentityFailed`.
enum FfmuStatus ffmu_duality_check_json(const char *profile,
                                        const char *weight,
                                        uint32_t k_max,
                                        char **out_json,
                                        int32_t *pass);

// Exact partial sums of a weighted Mobius series as a JSON report.
// `weight` is "mu" or "mu_omega"; `restriction` is "none", "d_s",
// "delta1_eq:<n>", or "delta1_ge:<n>"; `subset` uses the subset grammar.
enum FfmuStatus ffmu_series_json(const struct FfmuField *field,
                                 const struct FfmuTable *table,
                                 const char *weight,
                                 const char *restriction,
                                 const char *subset,
                                 uint32_t x,
                                 int32_t include_unit,
                                 uint32_t workers,
                                 char **out_json);

// The exact equivalence identity at degree n. Writes 1 into `equal` iff the
// two routes agree; inequality returns `IdentityFailed`.
enum FfmuStatus ffmu_equivalence_json(const struct FfmuField *field,
                                      const struct FfmuTable *table,
                                      const char *subset,
                                      uint32_t n,
                                      uint32_t workers,
                                      char **out_json,
                                      int32_t *equal);

// The finite weighted-series identity at cutoff x. Writes 1 into `equal`
// iff both sides agree; inequality returns `IdentityFailed`.
enum FfmuStatus ffmu_landau_identity_json(const struct FfmuField *field,
                                          const struct FfmuTable *table,
                                          uint32_t x,
                                          uint32_t workers,
                                          char **out_json,
                                          int32_t *equal);

// Exact Mertens product with the n*e^gamma reference, as JSON.
enum FfmuStatus ffmu_mertens_json(const struct FfmuField *field, uint32_t n, char **out_json);

// Exact sum of member-prime counts at the k-th largest degree, as JSON.
enum FfmuStatus ffmu_qsum_json(const struct FfmuField *field,
                               const struct FfmuTable *table,
                               const char *subset,
                               uint32_t k,
                               uint32_t n,
                               uint32_t workers,
                               char **out_json);

// Smooth count of the given order (1 or 2) by both routes when a table is
// supplied, by the recurrence alone otherwise. Writes 1 into `equal` when
// both routes ran and agreed (and always when only one ran); disagreement
// returns `IdentityFailed`.
enum FfmuStatus ffmu_smooth_json(const struct FfmuField *field,
                                 const struct FfmuTable *table,
                                 uint32_t order,
                                 uint32_t n,
                                 uint32_t m,
                                 uint32_t workers,
                                 char **out_json,
                                 int32_t *equal);

// Exact density-error statistics for a subset with a declared density.
enum FfmuStatus ffmu_density_stats_json(const struct FfmuField *field,
                                        const struct FfmuTable *table,
                                        const char *subset,
                                        char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FFMU_H */

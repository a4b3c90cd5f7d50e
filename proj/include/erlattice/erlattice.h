/* C interface to the erlattice core.
 *
 * Handles are opaque. Every function returns an erl_status; on failure the
 * message is available from erl_last_error() on the same thread. Structured
 * results are returned as NUL-terminated JSON strings owned by the caller
 * and released with erl_string_free(). Counts inside the JSON are decimal
 * strings and rationals are {"num": "...", "den": "..."} objects.
 */
#ifndef ERLATTICE_H
#define ERLATTICE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ERL_API __declspec(dllexport)
#elif defined(__GNUC__)
#define ERL_API __attribute__((visibility("default")))
#else
#define ERL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum erl_status {
  ERL_OK = 0,
  ERL_ERR_INTERNAL = 1,     /* engine fault or unexpected exception */
  ERL_ERR_USAGE = 2,        /* malformed input, parameter out of range */
  ERL_ERR_CAPABILITY = 3,   /* size or budget cap exceeded */
  ERL_ERR_VERIFY = 4,       /* reserved for callers reporting failed checks */
  ERL_ERR_PRECONDITION = 5  /* mathematical precondition does not hold */
} erl_status;

typedef struct erl_family erl_family;
typedef struct erl_partition erl_partition;

ERL_API const char* erl_version(void);
ERL_API const char* erl_last_error(void);
ERL_API void erl_string_free(char* s);

/* --- families ------------------------------------------------------------ */

/* specifier: all | level:j | middle:j | random:p,seed | file:PATH. n may be 0 for
 * file: specifiers. mirror selects the upper block of middle:j on ties. */
ERL_API erl_status erl_family_parse(const char* specifier, int n, int mirror, erl_family** out);
/* {"n": n, "sets": [[1,2], ...]} */
ERL_API erl_status erl_family_from_json(const char* text, erl_family** out);
ERL_API void erl_family_free(erl_family* fam);
ERL_API erl_status erl_family_size(const erl_family* fam, size_t* size);
ERL_API erl_status erl_family_ground(const erl_family* fam, int* n);
ERL_API erl_status erl_family_to_json(const erl_family* fam, char** out);

/* --- counting ------------------------------------------------------------ */

/* method: auto | bruteforce | backtrack | layered (NULL means auto).
 * budget 0 keeps the method's default. Output {"count", "method"}. */
ERL_API erl_status erl_count(const erl_family* fam, int r, int k, const char* method, uint64_t budget, int threads,
                             char** out);
/* colours[i] is the colour of member i. Output {"valid", "chain"}; *valid is
 * set to 0 or 1. */
ERL_API erl_status erl_validate(const erl_family* fam, int r, int k, const int* colours, size_t len, int* valid,
                                char** out);

/* --- structure and inequalities -------------------------------------------- */

ERL_API erl_status erl_comparable_pairs(const erl_family* fam, char** out);
/* *holds: comparable pairs >= ceil((n+1)/2) * max(0, |F| - C(n, n/2)). */
ERL_API erl_status erl_kleitman(const erl_family* fam, int* holds, char** out);
/* *holds: the LYM-type sum is at most 1. */
ERL_API erl_status erl_lym(const erl_family* fam, int* holds, char** out);
/* delta may be NULL; otherwise "NUM/DEN" in (0, 1/2) adds the comparable
 * pair supersaturation check. *holds covers every check whose hypothesis
 * applies. */
ERL_API erl_status erl_weight(const erl_family* fam, int k, const char* delta, int* holds, char** out);
ERL_API erl_status erl_mirsky(const erl_family* fam, char** out);

/* --- partition engine -------------------------------------------------------- */

/* epsilon: "NUM/DEN" or NULL for 1/(500k^2); omega < 0 keeps the default
 * derived from epsilon. */
ERL_API erl_status erl_partition_init(const erl_family* fam, int k, const char* epsilon, int64_t omega, int paranoid,
                                      erl_partition** out);
ERL_API void erl_partition_free(erl_partition* p);
/* stage in 1..4, in order. */
ERL_API erl_status erl_partition_run_stage(erl_partition* p, int stage);
ERL_API erl_status erl_partition_run_all(erl_partition* p);
/* *all_pass: Q1-Q9 and P1-P5 hold. Output is the full state with checks. */
ERL_API erl_status erl_partition_verify(const erl_partition* p, int* all_pass, char** out);
ERL_API erl_status erl_partition_to_json(const erl_partition* p, char** out);
/* One line per operation. */
ERL_API erl_status erl_partition_trace(const erl_partition* p, char** out);

/* --- constructions and search ------------------------------------------------ */

/* exhaustive: n <= 4, all isomorphism classes. Otherwise hill climbing with
 * the given evaluation budget (0: default), seed and restarts. csv selects
 * the CSV summary instead of JSON. */
ERL_API erl_status erl_search(int n, int r, int k, int exhaustive, uint64_t budget, uint64_t seed, int restarts,
                              int threads, int csv, char** out);
/* kind: middle (n, j, mirror) | paired (n) | assignment (r, k, n optional). */
ERL_API erl_status erl_construct(const char* kind, int n, int r, int k, int j, int mirror, char** out);

/* --- acceptance ------------------------------------------------------------ */

ERL_API int erl_acceptance_count(void);
/* Runs criterion id. *pass is 0 or 1; with_time adds wall time fields. */
ERL_API erl_status erl_acceptance_run(int id, int with_time, int* pass, char** out);

#ifdef __cplusplus
}
#endif

#endif /* ERLATTICE_H */

#ifndef NBU_NBU_H
#define NBU_NBU_H

/* C interface to the Nielsen-Borsuk-Ulam calculator for torus maps.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Functions return an nbu_status; on failure
 * nbu_last_error() describes the problem (per thread, valid until the next
 * call on that thread). */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(NBU_BUILDING_LIBRARY)
#    define NBU_API __declspec(dllexport)
#  else
#    define NBU_API __declspec(dllimport)
#  endif
#else
#  define NBU_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nbu_status {
  NBU_OK = 0,
  NBU_ERR_PARSE = 1,
  NBU_ERR_UNSUPPORTED = 2,
  NBU_ERR_DIMENSION = 3,
  NBU_ERR_NUMERIC = 4,
  NBU_ERR_INVALID_ARGUMENT = 5,
  NBU_ERR_INTERNAL = 6
} nbu_status;

typedef enum nbu_format { NBU_FORMAT_JSON = 0, NBU_FORMAT_CSV = 1, NBU_FORMAT_TEXT = 2 } nbu_format;

typedef struct nbu_matrix nbu_matrix;
typedef struct nbu_involution nbu_involution;
typedef struct nbu_report nbu_report;

/* Numeric and batch settings; start from nbu_options_default(). */
typedef struct nbu_options {
  size_t grid;
  double tol;
  uint64_t seed;
  size_t count;
  long range_lo;
  long range_hi;
  unsigned threads; /* 0: hardware concurrency */
} nbu_options;

NBU_API nbu_options nbu_options_default(void);

NBU_API const char* nbu_last_error(void);
NBU_API const char* nbu_status_string(nbu_status s);

/* "1,0;0,2" or "[[1,0],[0,2]]". dim 0 infers the size. */
NBU_API nbu_status nbu_matrix_parse(const char* text, size_t dim, nbu_matrix** out);
NBU_API size_t nbu_matrix_dimension(const nbu_matrix* m);
NBU_API void nbu_matrix_free(nbu_matrix* m);

/* Catalog tag ("t3.h2") or short name ("h2"). */
NBU_API nbu_status nbu_involution_catalog(size_t dim, const char* tag, nbu_involution** out);
/* x -> L x + t with L as matrix text and t as "0,1/2" (NULL means zero).
 * Rejected unless it is an involution without fixed points. */
NBU_API nbu_status nbu_involution_custom(const char* linear, const char* translation, size_t dim,
                                         nbu_involution** out);
NBU_API void nbu_involution_free(nbu_involution* s);

/* Closed-form value. *known is 0 when the status is not exact; the branch
 * label is copied into branch (truncated to branch_len, always terminated). */
NBU_API nbu_status nbu_closed_form(const nbu_matrix* m, const nbu_involution* s, long long* value, int* known,
                                   char* branch, size_t branch_len);
/* Essential class count and coincidence pair count of an explicit realizer. */
NBU_API nbu_status nbu_first_principles(const nbu_matrix* m, const nbu_involution* s, const nbu_options* opts,
                                        long long* value, size_t* pairs);

NBU_API nbu_status nbu_compute(const nbu_matrix* m, const nbu_involution* s, nbu_report** out);
NBU_API nbu_status nbu_verify(const nbu_matrix* m, const nbu_involution* s, const nbu_options* opts,
                              nbu_report** out);
NBU_API nbu_status nbu_realize(const nbu_matrix* m, const nbu_involution* s, const nbu_options* opts,
                               nbu_report** out);
/* Random cases in dimension dim (0: dimensions 1..4), for one involution or
 * all (tag NULL). curated != 0 prepends the branch exemplars and gates
 * coverage of every closed-form branch. */
NBU_API nbu_status nbu_batch(size_t dim, const char* tag, const nbu_options* opts, int curated, nbu_report** out);

/* 0 ok, 1 invalid input, 2 verification mismatch. */
NBU_API int nbu_report_exit_code(const nbu_report* r);
/* Owned by the report; valid until nbu_report_free. */
NBU_API const char* nbu_report_render(nbu_report* r, nbu_format f);
NBU_API void nbu_report_free(nbu_report* r);

#ifdef __cplusplus
}
#endif

#endif /* NBU_NBU_H */

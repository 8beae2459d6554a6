#ifndef GSLEARN_H
#define GSLEARN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GslNoiseMode {
  GSL_NOISE_MODE_PAULI_INJECT = 0,
  GSL_NOISE_MODE_BITFLIP = 1,
} GslNoiseMode;

typedef enum GslStatus {
  GSL_STATUS_OK = 0,
  GSL_STATUS_INVALID_ARGUMENT = 1,
  GSL_STATUS_INFEASIBLE = 2,
  GSL_STATUS_GENERATION = 3,
  GSL_STATUS_PARSE = 4,
  GSL_STATUS_RESOURCE = 5,
  GSL_STATUS_IO = 6,
  GSL_STATUS_NULL_POINTER = 7,
  GSL_STATUS_PANIC = 8,
} GslStatus;

typedef struct GslCandidates GslCandidates;

typedef struct GslGraph GslGraph;

typedef struct GslRng GslRng;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the last failure on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *gsl_last_error(void);

// Creates a random stream keyed by `(master_seed, purpose, index)`;
// `purpose` is 0 graph, 1 learn, 2 sample, 3 verify.
//
// # Safety
// `out` must be a valid pointer to writable storage for a handle.
enum GslStatus gsl_rng_new(uint64_t master_seed,
                           uint32_t purpose,
                           uint64_t index,
                           struct GslRng **out);

// # Safety
// `rng` must be NULL or a handle from [`gsl_rng_new`] not yet freed.
void gsl_rng_free(struct GslRng *rng);

// Draws a random d-regular graph on n vertices.
//
// # Safety
// `rng` must be a live handle; `out` must be writable.
enum GslStatus gsl_graph_random_regular(size_t n,
                                        size_t d,
                                        struct GslRng *rng,
                                        struct GslGraph **out);

// Builds a graph from `edge_count` pairs stored flat in `edges`
// (`u0, v0, u1, v1, ...`, 0-indexed).
//
// # Safety
// `edges` must point to `2 * edge_count` readable values; `out` must be writable.
enum GslStatus gsl_graph_from_edges(size_t n,
                                    size_t d,
                                    const uint32_t *edges,
                                    size_t edge_count,
                                    struct GslGraph **out);

// Parses the text edge-list format (header `n d`, then 1-indexed edges).
//
// # Safety
// `text` must be a NUL-terminated string; `out` must be writable.
enum GslStatus gsl_graph_parse(const char *text, struct GslGraph **out);

// Serializes to the edge-list format. Free the result with [`gsl_string_free`].
//
// # Safety
// `g` must be a live handle; `out` must be writable.
enum GslStatus gsl_graph_to_edge_list(const struct GslGraph *g, char **out);

// # Safety
// `s` must be NULL or a string returned by this library, not yet freed.
void gsl_string_free(char *s);

// # Safety
// `g` must be NULL or a live graph handle.
void gsl_graph_free(struct GslGraph *g);

// # Safety
// `g` must be a live handle; `n` and `d` must be writable.
enum GslStatus gsl_graph_shape(const struct GslGraph *g, size_t *n, size_t *d);

// Writes the sorted neighbors of `v` into `buf`, which must hold `d` entries.
//
// # Safety
// `g` must be a live handle; `buf` must have room for `cap` values.
enum GslStatus gsl_graph_neighbors(const struct GslGraph *g, size_t v, uint32_t *buf, size_t cap);

// Measures one copy of the graph state in `basis`, under depolarizing
// noise of strength `p`, and writes the `n` outcome bits to `outcome`.
//
// # Safety
// `basis` and `outcome` must each point to `n` bytes, `n` = vertex count.
enum GslStatus gsl_sample(const struct GslGraph *g,
                          const uint8_t *basis,
                          double p,
                          enum GslNoiseMode mode,
                          struct GslRng *rng,
                          uint8_t *outcome);

// Exact noiseless probability of `outcome` when measuring in `basis`.
//
// # Safety
// `basis` and `outcome` must each point to `n` bytes; `prob` must be writable.
enum GslStatus gsl_exact_prob(const struct GslGraph *g,
                              const uint8_t *basis,
                              const uint8_t *outcome,
                              double *prob);

// Runs the learner on copies of `g`'s state. `w = 0` picks the default
// weight `⌈(n−d)/d⌉`.
//
// # Safety
// `g` and `rng` must be live handles; `out` must be writable.
enum GslStatus gsl_learn(const struct GslGraph *g,
                         size_t m,
                         size_t r,
                         size_t w,
                         double p,
                         enum GslNoiseMode mode,
                         struct GslRng *rng,
                         struct GslCandidates **out);

// Number of surviving candidates for vertex `v`.
//
// # Safety
// `c` must be a live handle; `count` must be writable.
enum GslStatus gsl_candidates_count(const struct GslCandidates *c, size_t v, size_t *count);

// Whether every candidate set is exactly the true neighborhood in `g`.
//
// # Safety
// `c` and `g` must be live handles; `success` must be writable.
enum GslStatus gsl_candidates_is_success(const struct GslCandidates *c,
                                         const struct GslGraph *g,
                                         bool *success);

// # Safety
// `c` must be NULL or a live candidates handle.
void gsl_candidates_free(struct GslCandidates *c);

// # Safety
// `out` must be writable.
enum GslStatus gsl_bound_m_noiseless(size_t n, size_t d, double eps, uint64_t *out);

// # Safety
// `out` must be writable.
enum GslStatus gsl_bound_m_noisy(size_t n, size_t d, double eps, uint64_t *out);

// # Safety
// `out` must be writable.
enum GslStatus gsl_bound_r_noisy(size_t n, size_t d, double eps, double p, uint64_t *out);

// # Safety
// `out` must be writable.
enum GslStatus gsl_bound_p_samp(size_t n, size_t d, size_t w, double *out);

// # Safety
// `out` must be writable.
enum GslStatus gsl_bound_gamma(double p, size_t d, double *out);

// # Safety
// `out` must be writable.
enum GslStatus gsl_bound_converse_n(size_t n, size_t d, double p, double eps, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GSLEARN_H */

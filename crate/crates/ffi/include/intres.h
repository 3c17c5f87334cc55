#ifndef INTRES_H
#define INTRES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum IntresStatus {
  INTRES_STATUS_OK = 0,
  INTRES_STATUS_NULL_POINTER = 1,
  INTRES_STATUS_INVALID_UTF8 = 2,
  // Unparseable JSON, schema violation or unsupported characteristic.
  INTRES_STATUS_MALFORMED = 3,
  // Non-commutative module, cyclic relations or a non-interval.
  INTRES_STATUS_VALIDATION = 4,
  // Step limit or internal invariant breach.
  INTRES_STATUS_INTERNAL = 5,
  INTRES_STATUS_PANIC = 6,
} IntresStatus;

// Opaque module handle.
typedef struct IntresModule IntresModule;

// Opaque poset handle.
typedef struct IntresPoset IntresPoset;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The
// pointer stays valid until the next failing call on the same thread.
const char *intres_last_error(void);

// Library version as a static nul-terminated string.
const char *intres_version(void);

// # Safety
// `s` must be null or a string returned by this library, freed once.
void intres_string_free(char *s);

// Parses a poset document `{"elements": [...], "relations": [[a, b], ...]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum IntresStatus intres_poset_from_json(const char *json, struct IntresPoset **out);

// # Safety
// `p` must be null or a handle from [`intres_poset_from_json`], freed once.
void intres_poset_free(struct IntresPoset *p);

// # Safety
// `p` must be a live poset handle; `out` must be writable.
enum IntresStatus intres_poset_len(const struct IntresPoset *p, uintptr_t *out);

// Number of intervals (connected convex subsets).
//
// # Safety
// `p` must be a live poset handle; `out` must be writable.
enum IntresStatus intres_poset_interval_count(const struct IntresPoset *p, uintptr_t *out);

// Interval resolution global dimension over GF(`prime`).
//
// # Safety
// `p` must be a live poset handle; `out` must be writable.
enum IntresStatus intres_poset_interval_gldim(const struct IntresPoset *p,
                                              uint32_t prime,
                                              uintptr_t *out);

// Global dimension of the incidence algebra over GF(`prime`).
//
// # Safety
// `p` must be a live poset handle; `out` must be writable.
enum IntresStatus intres_poset_projective_gldim(const struct IntresPoset *p,
                                                uint32_t prime,
                                                uintptr_t *out);

// Shape verdict as JSON; `*accepted` is set when the poset has interval
// resolution global dimension zero. Either out pointer may be null.
//
// # Safety
// `p` must be a live poset handle.
enum IntresStatus intres_poset_classify(const struct IntresPoset *p,
                                        bool *accepted,
                                        char **out_json);

// Parses and validates a module document. `default_prime` applies when
// the document has no `p`. Poset file references resolve against the
// working directory.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum IntresStatus intres_module_from_json(const char *json,
                                          uint32_t default_prime,
                                          struct IntresModule **out);

// # Safety
// `m` must be null or a handle from [`intres_module_from_json`], freed once.
void intres_module_free(struct IntresModule *m);

// Total dimension of the module.
//
// # Safety
// `m` must be a live module handle; `out` must be writable.
enum IntresStatus intres_module_total_dim(const struct IntresModule *m, uintptr_t *out);

// Interval resolution dimension.
//
// # Safety
// `m` must be a live module handle; `out` must be writable.
enum IntresStatus intres_module_resdim(const struct IntresModule *m, uintptr_t *out);

// Interval cover as JSON: summands, generators and the covering map.
//
// # Safety
// `m` must be a live module handle; `out` must be writable.
enum IntresStatus intres_module_cover_json(const struct IntresModule *m, char **out);

// Minimal interval resolution as JSON.
//
// # Safety
// `m` must be a live module handle; `out` must be writable.
enum IntresStatus intres_module_resolution_json(const struct IntresModule *m,
                                                bool reduce_support,
                                                char **out);

// Number of indecomposable modules over the cycle poset `C(m, l)`.
uintptr_t intres_count_indecomposables(uintptr_t m, uintptr_t l);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* INTRES_H */

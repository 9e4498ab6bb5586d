#ifndef BLOCH_ATLAS_H
#define BLOCH_ATLAS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes. Zero is success; the first three error codes agree with
// the command-line exit codes.
typedef enum BaStatus {
  BA_STATUS_OK = 0,
  BA_STATUS_INVALID_ARGUMENT = 1,
  BA_STATUS_NUMERICAL = 2,
  BA_STATUS_COMPARISON = 3,
  BA_STATUS_NULL_POINTER = 4,
  BA_STATUS_IO = 5,
  BA_STATUS_INTERNAL = 6,
} BaStatus;

// Equivalence classes of an enumeration.
typedef struct BaClassTable BaClassTable;

// Result of one pair or triad analysis.
typedef struct BaScenario BaScenario;

typedef struct BaMeasures {
  double total;
  double joint;
  double probability;
  double error_estimate;
} BaMeasures;

// Boundary measures: lengths for pairs, surface areas for triads.
// `interior_length` is NaN when not computed.
typedef struct BaBoundary {
  double total;
  double classified;
  double probability;
  double interior_length;
} BaBoundary;

typedef struct BaClass {
  size_t representative_a;
  size_t representative_b;
  size_t count;
} BaClass;

typedef struct BaClassMeasures {
  double total;
  double joint;
  double probability;
} BaClassMeasures;

// A Monte-Carlo estimate. `reference` is NaN when no published constant
// exists for the case and constraint set.
typedef struct BaEstimate {
  double mean;
  double standard_error;
  double reference;
  double z_score;
} BaEstimate;

typedef struct BaComparison {
  size_t compared;
  size_t failures;
  double max_deviation;
  // Nonzero when the table is informational only.
  int32_t informational;
  // Nonzero when the comparison passed.
  int32_t passed;
} BaComparison;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread (empty after a success).
// Valid until the next call into the library on this thread.
const char *ba_last_error_message(void);

// Library version, a static NUL-terminated string.
const char *ba_version(void);

// Analyses the section spanned by generators `a` and `b` of SU(`n`) under
// the comma-separated decompositions in `decomposition` (e.g. `"3x2,2x3"`).
//
// # Safety
// `decomposition` must be a valid NUL-terminated string and `out` a valid
// pointer to writable storage for one handle.
enum BaStatus ba_analyze_pair(size_t n,
                              size_t a,
                              size_t b,
                              const char *decomposition,
                              bool with_boundary,
                              struct BaScenario **out);

// Analyses the section spanned by generators `a`, `b`, `c`.
//
// # Safety
// As for [`ba_analyze_pair`].
enum BaStatus ba_analyze_triad(size_t n,
                               size_t a,
                               size_t b,
                               size_t c,
                               const char *decomposition,
                               bool with_surface,
                               struct BaScenario **out);

// # Safety
// `h` must be null or a handle from this library not yet freed.
void ba_scenario_free(struct BaScenario *h);

// # Safety
// `h` must be a live handle and `out` writable.
enum BaStatus ba_scenario_measures(const struct BaScenario *h, struct BaMeasures *out);

// Number of PPT conditions; zero for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t ba_scenario_condition_count(const struct BaScenario *h);

// Measure of the region satisfying condition `k` alone (0-based).
//
// # Safety
// `h` must be a live handle and `out` writable.
enum BaStatus ba_scenario_condition_measure(const struct BaScenario *h, size_t k, double *out);

// Boundary measures; `InvalidArgument` when the analysis did not request
// them.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum BaStatus ba_scenario_boundary(const struct BaScenario *h, struct BaBoundary *out);

// The full result as JSON; null on failure. Release with
// [`ba_string_free`].
//
// # Safety
// `h` must be a live handle.
char *ba_scenario_to_json(const struct BaScenario *h);

// # Safety
// `s` must be null or a string returned by this library not yet freed.
void ba_string_free(char *s);

// Groups all generator pairs of SU(`n`) into equivalence classes.
// `parallel` is the worker count (0 for all cores).
//
// # Safety
// `decomposition` must be a valid string and `out` writable.
enum BaStatus ba_enumerate(size_t n,
                           const char *decomposition,
                           size_t parallel,
                           struct BaClassTable **out);

// # Safety
// `h` must be null or a live class-table handle.
void ba_class_table_free(struct BaClassTable *h);

// Number of nontrivial classes; zero for a null handle.
//
// # Safety
// `h` must be null or a live handle.
size_t ba_class_table_len(const struct BaClassTable *h);

// Number of trivial pairs (PPT region equal to the whole section).
//
// # Safety
// `h` must be null or a live handle.
size_t ba_class_table_trivial_count(const struct BaClassTable *h);

// Class `i` (0-based, ordered by representative).
//
// # Safety
// `h` must be a live handle; `class_out` and `measures_out` writable (either
// may be null to skip it).
enum BaStatus ba_class_table_get(const struct BaClassTable *h,
                                 size_t i,
                                 struct BaClass *class_out,
                                 struct BaClassMeasures *measures_out);

// Quasi-Monte-Carlo estimate of a minor-relaxation volume.
// `case` is `"real"` or `"complex"`; `constraints` one of `"base"`,
// `"ppt"`, `"refine1"`, `"refine2"`.
//
// # Safety
// String arguments must be valid; `out` writable.
enum BaStatus ba_fullspace_estimate(const char *case_,
                                    const char *constraints,
                                    uint64_t samples,
                                    uint64_t seed,
                                    struct BaEstimate *out);

// Recomputes a reference table and compares at absolute tolerance `tol`.
// Returns `Comparison` when a verified row is out of tolerance; `out` is
// filled either way.
//
// # Safety
// `table_id` must be a valid string; `out` writable.
enum BaStatus ba_compare_table(const char *table_id,
                               double tol,
                               size_t parallel,
                               struct BaComparison *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* BLOCH_ATLAS_H */

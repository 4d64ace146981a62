#ifndef ENCHI_H
#define ENCHI_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define ENCHI_OK 0

#define ENCHI_ERR_PARSE 1

#define ENCHI_ERR_INVALID 2

#define ENCHI_ERR_COMPUTE 3

#define ENCHI_ERR_ARGUMENT 4

#define ENCHI_ERR_PANIC 5

/**
 * Opaque handle around per-coset detection data.
 */
typedef struct EnchiDetection EnchiDetection;

/**
 * Opaque handle around a doubly-pointed genus-1 diagram.
 */
typedef struct EnchiDiagram EnchiDiagram;

/**
 * Opaque handle around a group-ring element with its group and names.
 */
typedef struct EnchiElement EnchiElement;

/**
 * Opaque handle around a finite group presentation with meridian.
 */
typedef struct EnchiPresentation EnchiPresentation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Toolkit semantic version as a static string; do not free.
 */
const char *enchi_version(void);

/**
 * The last error message on this thread, as a fresh string.
 */
int32_t enchi_last_error(char **out);

/**
 * Releases a string allocated by this library.
 *
 * # Safety
 * `s` must come from this library and must not be used afterwards.
 */
void enchi_string_free(char *s);

/**
 * Parses a presentation in the `.gp` text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be a valid pointer.
 */
int32_t enchi_presentation_parse(const char *text, struct EnchiPresentation **out);

/**
 * # Safety
 * `p` must come from `enchi_presentation_parse` and not be used afterwards.
 */
void enchi_presentation_free(struct EnchiPresentation *p);

/**
 * The sutured torsion of the presentation, printed as an element literal.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid.
 */
int32_t enchi_sutured_torsion(const struct EnchiPresentation *p, char **out);

/**
 * The Turaev torsion when it lands in the group ring; "indeterminate"
 * otherwise.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid.
 */
int32_t enchi_turaev_torsion(const struct EnchiPresentation *p, char **out);

/**
 * Parses a diagram in the `.od` text format and validates it.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid.
 */
int32_t enchi_diagram_parse(const char *text, struct EnchiDiagram **out);

/**
 * # Safety
 * `d` must come from `enchi_diagram_parse` and not be used afterwards.
 */
void enchi_diagram_free(struct EnchiDiagram *d);

/**
 * Knot Floer report of a diagram: total dimension, chi, and certificate,
 * as `key=value` lines.
 *
 * # Safety
 * `d` must be a live handle; `out` must be valid.
 */
int32_t enchi_hfk_report(const struct EnchiDiagram *d, char **out);

/**
 * Compares the bigon and Fox-calculus pipelines on one diagram; sets
 * `agree` to 1 on exact agreement.
 *
 * # Safety
 * `d` must be a live handle; `agree` and `out` must be valid.
 */
int32_t enchi_crosscheck(const struct EnchiDiagram *d, int32_t *agree, char **out);

/**
 * Parses a group-ring element: a group literal, whitespace-separated
 * generator names, and an element literal.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be valid.
 */
int32_t enchi_element_parse(const char *group,
                            const char *gens,
                            const char *elem,
                            struct EnchiElement **out);

/**
 * # Safety
 * `e` must come from `enchi_element_parse` and not be used afterwards.
 */
void enchi_element_free(struct EnchiElement *e);

/**
 * Canonical printing of an element.
 *
 * # Safety
 * `e` must be a live handle; `out` must be valid.
 */
int32_t enchi_element_format(const struct EnchiElement *e, char **out);

/**
 * The coefficient norm of an element, as a decimal or fraction string.
 *
 * # Safety
 * `e` must be a live handle; `out` must be valid.
 */
int32_t enchi_element_norm(const struct EnchiElement *e, char **out);

/**
 * Equality of the two elements as classes up to sign and translation;
 * sets `equal` to 1 on equality.
 *
 * # Safety
 * `a` and `b` must be live handles; `equal` must be valid.
 */
int32_t enchi_pm_equal(const struct EnchiElement *a, const struct EnchiElement *b, int32_t *equal);

/**
 * Parses detection input in the `.det` text format.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be valid.
 */
int32_t enchi_detection_parse(const char *text, struct EnchiDetection **out);

/**
 * # Safety
 * `d` must come from `enchi_detection_parse` and not be used afterwards.
 */
void enchi_detection_free(struct EnchiDetection *d);

/**
 * Runs the classifier. `verdict` receives 0 for unknot, 1 for
 * genus-one-fibred, 2 for a reported fibred genus, 3 for inconsistent,
 * 4 for unknown; `out` receives a one-line description.
 *
 * # Safety
 * `d` must be a live handle; `verdict` and `out` must be valid.
 */
int32_t enchi_classify(const struct EnchiDetection *d, int32_t *verdict, char **out);

/**
 * Window-constant report for the given parameters, as `key=value` lines.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
int32_t enchi_window_report(uint64_t q,
                            int64_t chi_bar_plus,
                            uint64_t n,
                            int64_t tau_plus,
                            int64_t tau_minus,
                            int64_t tau_nat,
                            char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENCHI_H */

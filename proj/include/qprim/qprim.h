/* C interface to libqprim.
 *
 * Every object is an opaque handle released by its matching *_destroy call.
 * Functions return a qp_status; on failure qp_last_error() holds a message
 * for the calling thread until its next failing call. Strings returned
 * through `char**` are owned by the caller and released with qp_string_free.
 */
#ifndef QPRIM_QPRIM_H
#define QPRIM_QPRIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(QPRIM_BUILDING)
#    define QPRIM_API __declspec(dllexport)
#  else
#    define QPRIM_API __declspec(dllimport)
#  endif
#else
#  define QPRIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qp_status {
  QP_OK = 0,
  QP_ERR_INVALID_ARGUMENT = 1,
  QP_ERR_INVALID_EXPONENT = 2,
  QP_ERR_REFINEMENT_CAP = 3,
  QP_ERR_DOUBLING_CAP = 4,
  QP_ERR_ITERATION_CAP = 5,
  QP_ERR_DIVERGENCE = 6,
  QP_ERR_PARSE = 7,
  QP_ERR_IO = 8,
  QP_ERR_INTERNAL = 9
} qp_status;

QPRIM_API const char* qp_status_name(qp_status status);
QPRIM_API const char* qp_last_error(void);
QPRIM_API void qp_string_free(char* s);

/* ---- grid functions: elements of L_p[0,1] on uniform cells ------------- */

typedef struct qp_grid qp_grid;

QPRIM_API qp_status qp_grid_create(const double* cells, size_t m, qp_grid** out);
QPRIM_API qp_status qp_grid_from_csv(const char* row, qp_grid** out);
QPRIM_API qp_status qp_grid_from_json(const char* text, qp_grid** out);
QPRIM_API void qp_grid_destroy(qp_grid* g);
QPRIM_API size_t qp_grid_size(const qp_grid* g);
/* Copies min(cap, size) cells. */
QPRIM_API qp_status qp_grid_cells(const qp_grid* g, double* out, size_t cap);
QPRIM_API qp_status qp_grid_to_csv(const qp_grid* g, char** out);
QPRIM_API qp_status qp_grid_to_json(const qp_grid* g, char** out);

QPRIM_API qp_status qp_lp_norm(const qp_grid* x, double p, double* out);
QPRIM_API qp_status qp_combine(const qp_grid* x, const qp_grid* y, double a, double b, qp_grid** out);

typedef struct qp_triangle_report {
  double lhs;
  double rhs;
  int holds;
} qp_triangle_report;

QPRIM_API qp_status qp_p_triangle_check(const qp_grid* x, const qp_grid* y, double p, qp_triangle_report* out);

typedef struct qp_axioms_report {
  size_t pairs;
  size_t triangle_violations;
  size_t homogeneity_violations;
  size_t disjoint_violations;
  double worst_triangle_ratio; /* max ||x+y||^p / (||x||^p + ||y||^p) */
} qp_axioms_report;

/* Randomized p-triangle, homogeneity and disjoint-additivity sweep. */
QPRIM_API qp_status qp_axioms_sweep(double p, size_t m, size_t pairs, uint64_t seed, qp_axioms_report* out);

/* ---- zero-derivative lifts -------------------------------------------- */

typedef struct qp_lift qp_lift;

QPRIM_API qp_status qp_lift_create(const qp_grid* x, double p, qp_lift** out);
QPRIM_API void qp_lift_destroy(qp_lift* f);
QPRIM_API qp_status qp_lift_cut(const qp_lift* f, double t, double* out);
/* ||F(t) - F(s)|| from the materialized truncations. */
QPRIM_API qp_status qp_lift_increment_norm(const qp_lift* f, double s, double t, double* out);
QPRIM_API qp_status qp_lift_c1_norm(const qp_lift* f, double* out);

typedef struct qp_rate_fit {
  double slope;
  double intercept;
  int degenerate;
} qp_rate_fit;

/* quotients receives one sup divided-difference norm per delta (may be NULL). */
QPRIM_API qp_status qp_lift_rate_check(const qp_lift* f, const double* deltas, size_t count, int materialized,
                                       double* quotients, qp_rate_fit* out);

/* ---- curves and primitives --------------------------------------------- */

typedef struct qp_curve qp_curve;

/* Built-in generators: "zero", "constant", "indicator-path", "lift". Spatial
 * cells m, time cells mt. */
QPRIM_API qp_status qp_curve_generator(const char* name, size_t m, size_t mt, double p, qp_curve** out);
QPRIM_API qp_status qp_curve_from_csv(const char* text, qp_curve** out);
QPRIM_API void qp_curve_destroy(qp_curve* c);
QPRIM_API size_t qp_curve_nodes(const qp_curve* c);
QPRIM_API qp_status qp_curve_sup_norm(const qp_curve* c, double p, double* out);
QPRIM_API qp_status qp_curve_to_csv(const qp_curve* c, char** out);

typedef struct qp_primitive_options {
  double tol;
  size_t time_cells;
  size_t iteration_cap;
  size_t n_cap;
  int compute_c1;
  int verify_fine;
} qp_primitive_options;

QPRIM_API void qp_primitive_options_default(qp_primitive_options* opts);

typedef struct qp_primitive qp_primitive;

typedef struct qp_primitive_summary {
  size_t iterations;
  double residual;
  double residual_fine;
  double discretization_slack;
  double remainder;
  double c1_estimate;
  double c1_bound;
} qp_primitive_summary;

typedef struct qp_iteration {
  size_t iter;
  double eps;
  size_t n;
  double eta;
  double c1_bound;
  double residual;
} qp_iteration;

QPRIM_API qp_status qp_primitive_construct(const qp_curve* f, double p, const qp_primitive_options* opts,
                                           qp_primitive** out);
QPRIM_API void qp_primitive_destroy(qp_primitive* r);
QPRIM_API qp_status qp_primitive_summary_get(const qp_primitive* r, qp_primitive_summary* out);
QPRIM_API qp_status qp_primitive_iteration(const qp_primitive* r, size_t index, qp_iteration* out);
QPRIM_API qp_status qp_primitive_trace_csv(const qp_primitive* r, char** out);
QPRIM_API qp_status qp_primitive_to_json(const qp_primitive* r, int include_curve, char** out);

/* ---- growth tables ----------------------------------------------------- */

typedef struct qp_counterexample_row {
  size_t n;
  double an_z;
  double an_y;
  double an_x;
  double ratio_y;
  double ratio_x;
  int degenerate;
} qp_counterexample_row;

typedef struct qp_table qp_table;

QPRIM_API qp_status qp_counterexample(const size_t* ns, size_t count, double q, qp_table** out);
/* space: "lp", "ribe", "lorentz", "scalar". */
QPRIM_API qp_status qp_averaging(const char* space, const size_t* ns, size_t count, double p, double q,
                                 qp_table** out);
QPRIM_API void qp_table_destroy(qp_table* t);
QPRIM_API size_t qp_table_rows(const qp_table* t);
/* Averaging tables: value column. Counterexample tables: aN_X column. */
QPRIM_API qp_status qp_table_value(const qp_table* t, size_t row, double* out);
QPRIM_API qp_status qp_table_counterexample_row(const qp_table* t, size_t row, qp_counterexample_row* out);
QPRIM_API qp_status qp_table_to_csv(const qp_table* t, char** out);
QPRIM_API qp_status qp_table_to_json(const qp_table* t, char** out);

/* space "lp", family "disjoint-indicators" etc. */
QPRIM_API qp_status qp_an_estimate(const char* space, size_t n, const char* family, double p, double q,
                                   double* lower, double* upper);

/* ---- bump dichotomy ---------------------------------------------------- */

QPRIM_API double qp_bump_derivative_max(void);

typedef struct qp_bump_report {
  double numeric_sup;
  double analytic_sup;
  double bound;
  int holds;
} qp_bump_report;

/* Superposition of N disjoint unit indicators in L_p. */
QPRIM_API qp_status qp_bump_check(size_t n, double p, size_t time_cells, qp_bump_report* out);

typedef struct qp_theorem5_report {
  size_t n;
  double increment_bound;
  double max_increment;
  double slack;
  double endpoint_norm;
  double an_core;
  size_t iterations;
  int holds;
} qp_theorem5_report;

QPRIM_API qp_status qp_theorem5_check(size_t n, double p, double relative_tol, size_t time_cells,
                                      qp_theorem5_report* out);

#ifdef __cplusplus
}
#endif

#endif /* QPRIM_QPRIM_H */

/*
 * C interface to the crossover-design evaluation library.
 *
 * All functions return xo_status; on failure xo_last_error() carries a
 * message for the calling thread. Objects are opaque handles released
 * with the matching _free function; strings returned through char**
 * outputs are released with xo_string_free.
 */
#ifndef CROSSOVER_H
#define CROSSOVER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum xo_status {
    XO_OK = 0,
    XO_ERR_INVALID = 1,     /* invalid argument or precondition */
    XO_ERR_PARSE = 2,       /* malformed design/scenario/grid text */
    XO_ERR_NOT_PD = 3,      /* a covariance matrix failed the PD check */
    XO_ERR_UNSUPPORTED = 4, /* construction outside the supported range */
    XO_ERR_CAPACITY = 5,    /* enumeration larger than the cap */
    XO_ERR_IO = 6,          /* file read/write failure */
    XO_ERR_INTERNAL = 7
} xo_status;

/* Message for the last failure on this thread; empty string if none. */
const char* xo_last_error(void);

const char* xo_version(void);

void xo_string_free(char* s);

/* ---- designs ------------------------------------------------------- */

typedef struct xo_design xo_design;

/* Text format: header "t n p", then p rows of n 1-based labels
 * (rows = periods, columns = subjects); '#' starts a comment. */
xo_status xo_design_parse(const char* text, xo_design** out);
xo_status xo_design_load(const char* path, xo_design** out);
/* labels: p*n entries, row-major by period, 1-based. */
xo_status xo_design_from_labels(int t, int n, int p, const int* labels,
                                xo_design** out);
xo_status xo_design_format(const xo_design* d, char** text_out);
void xo_design_free(xo_design* d);
void xo_design_dims(const xo_design* d, int* t, int* n, int* p);

xo_status xo_design_uniform(int t, int reps, xo_design** out);
xo_status xo_design_balanced_uniform(int t, int reps, xo_design** out);
xo_status xo_design_oa(int t, int lambda, xo_design** out);
xo_status xo_design_gene_study(xo_design** out);

typedef struct xo_design_flags {
    int binary;
    int uniform_on_periods;
    int uniform_on_subjects;
    int uniform;
    int balanced_uniform;
    int oa_lambda; /* 0 when not a Type-I strength-2 orthogonal array */
} xo_design_flags;

xo_status xo_design_classify(const xo_design* d, xo_design_flags* out);

/* ---- scenarios ------------------------------------------------------ */

typedef struct xo_scenario xo_scenario;

/* JSON: {"structure":"proportional","gamma":[[..]],"kernelV":{"family","r"}}
 * or {"structure":"markov","kernelV1":{..},"kernelVR":{..},
 *     "sigma11":..,"sigma22":..,"rho":..}. Kernels may instead carry
 * {"explicit":[[..]]}. Unknown keys are rejected. */
xo_status xo_scenario_parse(const char* json_text, xo_scenario** out);
xo_status xo_scenario_load(const char* path, xo_scenario** out);
/* case_no in 1..7 selects the (V1, VR) kernel-family combination. */
xo_status xo_scenario_markov_case(int case_no, double r, double rho, double sigma11,
                                  double sigma22, xo_scenario** out);
/* gamma: g*g row-major; family: "Mat05" | "Mat15" | "MatInf". */
xo_status xo_scenario_proportional(const char* family, double r, const double* gamma,
                                   int g, xo_scenario** out);
xo_status xo_scenario_format(const xo_scenario* s, char** json_out);
void xo_scenario_free(xo_scenario* s);

/* ---- evaluation ------------------------------------------------------ */

/* JSON report: trace, upper_bound + rd (markov, binary p=t designs),
 * classification flags, complete-symmetry verdict, attains_bound.
 * eq_tol <= 0 selects the default 1e-8. */
xo_status xo_eval(const xo_design* d, const xo_scenario* s, double eq_tol,
                  char** json_out);

/* Traces for several designs under one scenario plus relative figures
 * against the best design in the list. */
xo_status xo_compare(const xo_design* const* designs, const char* const* names,
                     int count, const xo_scenario* s, double eq_tol,
                     char** json_out);

/* Sweep over markov cases (1..7): rows "structure,case,design,t,n,p,r,rho,
 * sigma11,sigma22,trace,upper_bound,rd", aggregates "design,case,r,min_rd,
 * max_rd". Grids may be NULL to use the defaults. */
xo_status xo_sweep_markov(const xo_design* const* designs, const char* const* names,
                          int ndesigns, const int* cases, int ncases,
                          const double* r_grid, int nr, const double* rho_grid,
                          int nrho, double sigma11, double sigma22, double eq_tol,
                          char** csv_out, char** agg_csv_out);

/* Proportional sweep; families are kernel-family names and the rho grid
 * doubles as the off-diagonal of Gamma = [[1, rho], [rho, 1]]. */
xo_status xo_sweep_proportional(const xo_design* const* designs,
                                const char* const* names, int ndesigns,
                                const char* const* families, int nfamilies,
                                const double* r_grid, int nr, const double* rho_grid,
                                int nrho, double eq_tol, char** csv_out,
                                char** agg_csv_out);

/* Exhaustive scan of the binary class with p = t (all (t!)^n column
 * tuples); fails with XO_ERR_CAPACITY when (t!)^n > cap (cap = 0 selects
 * the default 1e7). */
xo_status xo_search_exhaustive(int t, int n, const xo_scenario* s, uint64_t cap,
                               double eq_tol, char** json_out);

xo_status xo_search_sampled(int t, int n, uint64_t count, uint64_t seed,
                            int include_fixtures, const xo_scenario* s,
                            double eq_tol, char** json_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CROSSOVER_H */

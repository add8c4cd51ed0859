#pragma once

#include <optional>
#include <string>
#include <vector>

#include "infomat.hpp"

namespace xover {

// Traces entering the upper-bound derivation: c11 = n(tr O1 + tr O4),
// c12 = n(tr O1 psi + tr O4 psi), c22 = n(tr Hp psi'O1 psi + tr Hp psi'O4 psi).
struct TraceComponents {
    double c11 = 0.0;
    double c12 = 0.0;
    double c22 = 0.0;
    double c22_11 = 0.0; // tr(Hp psi' O1 psi)
    double c22_22 = 0.0; // tr(Hp psi' O4 psi)
};

TraceComponents trace_components(const MarkovScenario& s, int n, int p,
                                 const Tolerance& tol = {});

// Upper bound u(t, n, p, sigma11, sigma22, rho, V1, VR) on
// tr(C_{d(s2)}) over binary designs with p = t.
double upper_bound_u(const MarkovScenario& s, int t, int n, int p,
                     const Tolerance& tol = {});

// RD = 1 - tr(C_{d(s2)}) / u. Requires a binary design with p = t.
double relative_difference(const Design& d, const MarkovScenario& s,
                           const Tolerance& tol = {});

// True iff tr(V1* psi) tr(Hp psi' VR* psi) = tr(VR* psi) tr(Hp psi' V1* psi)
// to eq_tol (relative), i.e. the OA attains the bound.
bool attains_bound(const MarkovScenario& s, int p, const Tolerance& tol = {});

// e = tr(C_{d(s1)}) / tr(C_{d*(s1)}); Gamma cancels, so this equals the
// univariate trace ratio.
double efficiency_proportional(const Design& d, const Design& dstar,
                               const ProportionalScenario& s,
                               const Tolerance& tol = {});

std::vector<double> default_r_grid();   // 0.05, 0.10, ..., 0.95
std::vector<double> default_rho_grid(); // +-{0.01, 0.05, ..., 0.95, 0.99}
std::vector<double> gene_r_grid();      // default grid plus 0.99

struct NamedDesign {
    std::string name;
    Design design;
};

struct SweepRow {
    std::string structure;
    std::string case_label;
    std::string design;
    int t = 0, n = 0, p = 0;
    double r = 0.0, rho = 0.0, sigma11 = 1.0, sigma22 = 1.0;
    std::optional<double> trace, upper_bound, rd;
    std::string error; // non-empty marks a failed cell ("ERR:<code>")
};

struct SweepAggRow {
    std::string design;
    std::string case_label;
    double r = 0.0;
    double min_rd = 0.0;
    double max_rd = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;        // ordered by (design, case, r, rho)
    std::vector<SweepAggRow> aggregates;
};

// One row per (design, case, r, rho) cell with trace, u and RD; failed
// cells carry an error marker instead of aborting the sweep.
SweepResult sweep_markov(const std::vector<NamedDesign>& designs,
                         const std::vector<int>& cases,
                         const std::vector<double>& r_grid,
                         const std::vector<double>& rho_grid, double sigma11,
                         double sigma22, const Tolerance& tol = {});

// Proportional analogue: cases are kernel families, rho doubles as the
// off-diagonal of Gamma = [[1, rho], [rho, 1]], the bound column is the
// reference OA trace and rd = 1 - trace / bound.
SweepResult sweep_proportional(const std::vector<NamedDesign>& designs,
                               const std::vector<KernelFamily>& families,
                               const std::vector<double>& r_grid,
                               const std::vector<double>& rho_grid,
                               const Tolerance& tol = {});

std::string sweep_csv(const SweepResult& result);
std::string sweep_agg_csv(const SweepResult& result);

} // namespace xover

#pragma once

#include "covmodels.hpp"
#include "designs.hpp"

namespace xover {

enum class InfoMethod { Brute, Closed };

// Basis used for the carryover columns in the Markov Schur complement:
// Raw keeps F_d, Centered uses F_d H_t. The two produce the same
// information matrix; Centered is the default.
enum class CarryBasis { Raw, Centered };

enum class CovStructure { Proportional, Markov };

struct InfoMatrix {
    Matrix matrix; // gt x gt, symmetric PSD, each t x t block annihilates 1_t
    CovStructure structure = CovStructure::Proportional;
    InfoMethod method = InfoMethod::Closed;
};

// [I_g (x) 1_np | I_g (x) [P U]] with P = 1_n (x) I_p, U = I_n (x) 1_p.
Matrix nuisance_basis(int g, int n, int p);

// A* = Sigma^{-1/2} pr_perp(Sigma^{-1/2} Z1) Sigma^{-1/2}.
Matrix astar_brute(const Matrix& sigma, const Matrix& z1, const Tolerance& tol = {});

// A* = Gamma^{-1} (x) (H_n (x) V*).
Matrix astar_proportional_closed(const ProportionalScenario& s, int n, int p,
                                 const Tolerance& tol = {});

// A* = [H_n (x) O1, -H_n (x) O2; -H_n (x) O2, H_n (x) O4].
Matrix astar_markov_closed(const MarkovScenario& s, int n, int p,
                           const Tolerance& tol = {});

// C11 - C12 C22^- C21 with C22^- realized as the Moore-Penrose inverse.
Matrix schur_complement(const Matrix& c11, const Matrix& c12, const Matrix& c22,
                        const Tolerance& tol = {});

// Univariate (g = 1) direct-effect information matrix for dispersion
// I_n (x) V.
Matrix info_univariate(const Design& d, const Matrix& v, const Tolerance& tol = {});

InfoMatrix info_proportional(const Design& d, const ProportionalScenario& s,
                             InfoMethod method, const Tolerance& tol = {});

InfoMatrix info_markov(const Design& d, const MarkovScenario& s, InfoMethod method,
                       CarryBasis basis = CarryBasis::Centered,
                       const Tolerance& tol = {});

// Direct-effect information matrix with the period effects dropped from
// the model; dominates info_markov in the Loewner order, with equality
// for designs uniform on periods.
InfoMatrix info_markov_noperiod(const Design& d, const MarkovScenario& s,
                                InfoMethod method = InfoMethod::Closed,
                                const Tolerance& tol = {});

// Closed form for Type-I strength-2 orthogonal arrays (p = t,
// n = lambda t (t-1)).
InfoMatrix info_markov_oa_closed(const MarkovScenario& s, int t, int n,
                                 const Tolerance& tol = {});

// Trace of the direct-effect information matrix under either structure.
double info_trace(const Design& d, const Scenario& s, InfoMethod method,
                  const Tolerance& tol = {});

} // namespace xover

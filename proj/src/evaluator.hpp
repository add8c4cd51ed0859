#pragma once

#include <array>

#include "covmodels.hpp"
#include "designs.hpp"

namespace xover {

// Per-scenario trace evaluator. Exploits H_n (x) X structure so a design
// evaluation costs O(n p^2) index arithmetic plus one small Schur
// complement instead of dense gnp x gnp algebra; agrees with the infomat
// closed forms to round-off (covered by tests).
class TraceEvaluator {
public:
    TraceEvaluator(const Scenario& s, int t, int n, int p, const Tolerance& tol = {});

    // Trace of the direct-effect information matrix of d; d must match
    // the evaluator dims.
    double trace(const Design& d) const;

    int t() const { return t_; }
    int n() const { return n_; }
    int p() const { return p_; }

private:
    int t_, n_, p_;
    bool markov_ = false;
    double gamma_inv_trace_ = 1.0; // proportional only
    Tolerance tol_;
    // Markov: kernels {O1, O2, O4} x {X, X psi, psi' X psi};
    // proportional: the three variants of V* in slot 0.
    std::array<Matrix, 3> plain_;
    std::array<Matrix, 3> shifted_;
    std::array<Matrix, 3> squeezed_;
    Matrix ht_;  // H_t
    Matrix h2t_; // I_2 (x) H_t

    // B = T' (H_n (x) X) T accumulated per subject.
    Matrix block(const Design& d, const Matrix& x) const;
    double schur_trace(const Matrix& c11, const Matrix& c12, const Matrix& c22) const;
};

} // namespace xover

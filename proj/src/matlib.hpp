#pragma once

#include <Eigen/Dense>

#include "errors.hpp"

namespace xover {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerances used throughout: rank_tol is the singular-value
// cutoff for rank decisions, eq_tol the slack for equality-style checks.
struct Tolerance {
    double rank_tol = 1e-10;
    double eq_tol = 1e-8;

    void validate() const {
        if (!(rank_tol > 0.0 && rank_tol < 1.0) || !(eq_tol > 0.0 && eq_tol < 1.0))
            fail(ErrorCode::InvalidInput, "tolerances must lie strictly in (0, 1)");
    }
};

// Moore-Penrose pseudo-inverse via SVD; singular values below
// rank_tol * sigma_max are treated as zero.
Matrix pinv(const Matrix& m, const Tolerance& tol = {});

// pr_perp(X) = I - X (X'X)^- X', the projector onto the orthogonal
// complement of col(X).
Matrix proj_perp(const Matrix& x, const Tolerance& tol = {});

Matrix kron(const Matrix& a, const Matrix& b);

// H_n = I_n - J_n / n.
Matrix centering(int n);

// Symmetric R with R M R = I for symmetric positive definite M.
Matrix sym_inv_sqrt(const Matrix& m, const Tolerance& tol = {});

// Loewner order: true iff B - A is PSD up to eq_tol * spectral norm.
bool loewner_leq(const Matrix& a, const Matrix& b, const Tolerance& tol = {});

// True iff the matrix has the a*I + b*J pattern up to eq_tol relative
// to its largest absolute entry.
bool is_completely_symmetric(const Matrix& m, const Tolerance& tol = {});

// Largest |eigenvalue| of a symmetric matrix (0 for empty).
double spectral_norm_sym(const Matrix& m);

bool all_finite(const Matrix& m);

} // namespace xover

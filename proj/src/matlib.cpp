#include "matlib.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace xover {

bool all_finite(const Matrix& m) {
    return m.allFinite();
}

Matrix pinv(const Matrix& m, const Tolerance& tol) {
    tol.validate();
    if (!all_finite(m))
        fail(ErrorCode::InvalidInput, "pinv: input has non-finite entries");
    if (m.size() == 0)
        return Matrix(m.cols(), m.rows());
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = tol.rank_tol * (sv.size() > 0 ? sv(0) : 0.0);
    Vector inv_sv = Vector::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) inv_sv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Matrix proj_perp(const Matrix& x, const Tolerance& tol) {
    tol.validate();
    if (x.rows() < 1)
        fail(ErrorCode::InvalidInput, "proj_perp: X needs at least one row");
    if (!all_finite(x))
        fail(ErrorCode::InvalidInput, "proj_perp: input has non-finite entries");
    const Matrix gram = x.transpose() * x;
    Matrix p = Matrix::Identity(x.rows(), x.rows()) - x * pinv(gram, tol) * x.transpose();
    // the projector is symmetric by construction; round-off breaks it slightly
    return 0.5 * (p + p.transpose());
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix centering(int n) {
    if (n < 1)
        fail(ErrorCode::InvalidInput, "centering: n must be >= 1");
    return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

Matrix sym_inv_sqrt(const Matrix& m, const Tolerance& tol) {
    tol.validate();
    if (m.rows() != m.cols() || m.rows() == 0)
        fail(ErrorCode::InvalidInput, "sym_inv_sqrt: matrix must be square and non-empty");
    if (!all_finite(m))
        fail(ErrorCode::InvalidInput, "sym_inv_sqrt: input has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
    const Vector& w = es.eigenvalues();
    const double wmax = w.cwiseAbs().maxCoeff();
    const double floor = tol.rank_tol * wmax;
    if (w.minCoeff() <= floor) {
        std::ostringstream os;
        os << "sym_inv_sqrt: matrix is not positive definite (eigenvalue "
           << w.minCoeff() << " vs cutoff " << floor << ")";
        fail(ErrorCode::NotPositiveDefinite, os.str());
    }
    Vector isq = w.array().rsqrt();
    return es.eigenvectors() * isq.asDiagonal() * es.eigenvectors().transpose();
}

double spectral_norm_sym(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool loewner_leq(const Matrix& a, const Matrix& b, const Tolerance& tol) {
    tol.validate();
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols())
        fail(ErrorCode::InvalidInput, "loewner_leq: matrices must be square with equal dims");
    Matrix d = b - a;
    d = 0.5 * (d + d.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(d, Eigen::EigenvaluesOnly);
    const double norm = std::max(spectral_norm_sym(a), std::max(spectral_norm_sym(b),
                                 es.eigenvalues().cwiseAbs().maxCoeff()));
    return es.eigenvalues().minCoeff() >= -tol.eq_tol * std::max(norm, 1e-300);
}

bool is_completely_symmetric(const Matrix& m, const Tolerance& tol) {
    tol.validate();
    if (m.rows() != m.cols())
        fail(ErrorCode::InvalidInput, "is_completely_symmetric: matrix must be square");
    const Eigen::Index n = m.rows();
    if (n <= 1) return true;
    const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
    const double diag0 = m(0, 0);
    const double off0 = m(0, 1);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double want = (i == j) ? diag0 : off0;
            if (std::abs(m(i, j) - want) > tol.eq_tol * scale) return false;
        }
    return true;
}

} // namespace xover

#include "evaluator.hpp"

#include <Eigen/Eigenvalues>

namespace xover {

TraceEvaluator::TraceEvaluator(const Scenario& s, int t, int n, int p,
                               const Tolerance& tol)
    : t_(t), n_(n), p_(p), tol_(tol) {
    if (t < 1 || n < 1 || p < 1)
        fail(ErrorCode::InvalidInput, "TraceEvaluator: t, n, p must be >= 1");
    ht_ = centering(t);
    h2t_ = kron(Matrix::Identity(2, 2), ht_);
    const Matrix psi = shift_matrix(p);
    auto variants = [&](const Matrix& x, int slot) {
        plain_[slot] = x;
        shifted_[slot] = x * psi;
        squeezed_[slot] = psi.transpose() * x * psi;
    };
    if (const auto* prop = std::get_if<ProportionalScenario>(&s)) {
        prop->validate();
        markov_ = false;
        Eigen::SelfAdjointEigenSolver<Matrix> es(prop->gamma);
        gamma_inv_trace_ = es.eigenvalues().cwiseInverse().sum();
        variants(vstar(prop->v(p), tol), 0);
    } else {
        const auto& m = std::get<MarkovScenario>(s);
        markov_ = true;
        const OmegaMatrices om = omega_matrices(m, p, tol);
        variants(om.omega1, 0);
        variants(om.omega2, 1);
        variants(om.omega4, 2);
    }
}

Matrix TraceEvaluator::block(const Design& d, const Matrix& x) const {
    // T'(H_n (x) X)T = sum_j T_j' X T_j - (1/n) S' X S with S = sum_j T_j.
    Matrix b = Matrix::Zero(t_, t_);
    Matrix s = Matrix::Zero(p_, t_);
    for (int j = 0; j < n_; ++j)
        for (int i = 0; i < p_; ++i) {
            const int u = d.at(i, j);
            s(i, u) += 1.0;
            for (int i2 = 0; i2 < p_; ++i2) b(u, d.at(i2, j)) += x(i, i2);
        }
    b.noalias() -= s.transpose() * x * s / static_cast<double>(n_);
    return b;
}

double TraceEvaluator::schur_trace(const Matrix& c11, const Matrix& c12,
                                   const Matrix& c22) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(c22);
    const Vector& w = es.eigenvalues();
    const double cutoff = tol_.rank_tol * w.cwiseAbs().maxCoeff();
    Vector winv = Vector::Zero(w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w(i) > cutoff) winv(i) = 1.0 / w(i);
    const Matrix y = es.eigenvectors().transpose() * c12.transpose();
    double corr = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        corr += winv(i) * y.row(i).squaredNorm();
    return c11.trace() - corr;
}

double TraceEvaluator::trace(const Design& d) const {
    if (d.t != t_ || d.n != n_ || d.p != p_)
        fail(ErrorCode::InvalidInput, "TraceEvaluator: design dims mismatch");
    if (!markov_) {
        const Matrix c11 = block(d, plain_[0]);
        const Matrix c12 = block(d, shifted_[0]);
        const Matrix c22 = block(d, squeezed_[0]);
        return gamma_inv_trace_ * schur_trace(c11, c12, c22);
    }
    Matrix c11(2 * t_, 2 * t_), c12(2 * t_, 2 * t_), c22(2 * t_, 2 * t_);
    auto assemble = [&](Matrix& out, const std::array<Matrix, 3>& kern) {
        const Matrix b1 = block(d, kern[0]);
        const Matrix b2 = block(d, kern[1]);
        const Matrix b4 = block(d, kern[2]);
        out.topLeftCorner(t_, t_) = b1;
        out.topRightCorner(t_, t_) = -b2;
        out.bottomLeftCorner(t_, t_) = -b2;
        out.bottomRightCorner(t_, t_) = b4;
    };
    assemble(c11, plain_);
    assemble(c12, shifted_);
    assemble(c22, squeezed_);
    return schur_trace(c11, c12 * h2t_, h2t_ * c22 * h2t_);
}

} // namespace xover

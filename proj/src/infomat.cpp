#include "infomat.hpp"

namespace xover {

Matrix nuisance_basis(int g, int n, int p) {
    if (g < 1 || n < 1 || p < 1)
        fail(ErrorCode::InvalidInput, "nuisance_basis: g, n, p must be >= 1");
    const Eigen::Index np = static_cast<Eigen::Index>(n) * p;
    const Matrix pmat = kron(Matrix::Ones(n, 1), Matrix::Identity(p, p));
    const Matrix umat = kron(Matrix::Identity(n, n), Matrix::Ones(p, 1));
    Matrix x1(np, p + n);
    x1 << pmat, umat;
    const Matrix ig = Matrix::Identity(g, g);
    Matrix z1(static_cast<Eigen::Index>(g) * np, g + g * (p + n));
    z1 << kron(ig, Matrix::Ones(np, 1)), kron(ig, x1);
    return z1;
}

Matrix astar_brute(const Matrix& sigma, const Matrix& z1, const Tolerance& tol) {
    if (sigma.rows() != z1.rows())
        fail(ErrorCode::InvalidInput, "astar_brute: Sigma and Z1 row counts differ");
    const Matrix si = sym_inv_sqrt(sigma, tol);
    Matrix a = si * proj_perp(si * z1, tol) * si;
    return 0.5 * (a + a.transpose());
}

Matrix astar_proportional_closed(const ProportionalScenario& s, int n, int p,
                                 const Tolerance& tol) {
    s.validate();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.gamma);
    const Matrix gamma_inv = es.eigenvectors() *
                             es.eigenvalues().cwiseInverse().asDiagonal() *
                             es.eigenvectors().transpose();
    return kron(gamma_inv, kron(centering(n), vstar(s.v(p), tol)));
}

Matrix astar_markov_closed(const MarkovScenario& s, int n, int p, const Tolerance& tol) {
    const OmegaMatrices om = omega_matrices(s, p, tol);
    const Matrix hn = centering(n);
    const Eigen::Index np = static_cast<Eigen::Index>(n) * p;
    Matrix a(2 * np, 2 * np);
    a.topLeftCorner(np, np) = kron(hn, om.omega1);
    a.topRightCorner(np, np) = -kron(hn, om.omega2);
    a.bottomLeftCorner(np, np) = -kron(hn, om.omega2);
    a.bottomRightCorner(np, np) = kron(hn, om.omega4);
    return a;
}

Matrix schur_complement(const Matrix& c11, const Matrix& c12, const Matrix& c22,
                        const Tolerance& tol) {
    Matrix c = c11 - c12 * pinv(c22, tol) * c12.transpose();
    return 0.5 * (c + c.transpose());
}

Matrix info_univariate(const Design& d, const Matrix& v, const Tolerance& tol) {
    validate(d);
    if (v.rows() != d.p || v.cols() != d.p)
        fail(ErrorCode::InvalidInput, "info_univariate: V must be p x p");
    const Matrix t = treatment_matrix(d);
    const Matrix f = carryover_matrix(d);
    const Matrix a = kron(centering(d.n), vstar(v, tol));
    return schur_complement(t.transpose() * a * t, t.transpose() * a * f,
                            f.transpose() * a * f, tol);
}

namespace {

// Schur pieces for the g-response model with carryover columns either
// raw (F) or centered (F H_t).
Matrix info_from_astar(const Design& d, const Matrix& astar, int g, CarryBasis basis,
                       const Tolerance& tol) {
    const Matrix ig = Matrix::Identity(g, g);
    const Matrix zt = kron(ig, treatment_matrix(d));
    Matrix f = carryover_matrix(d);
    if (basis == CarryBasis::Centered) f = f * centering(d.t);
    const Matrix zf = kron(ig, f);
    return schur_complement(zt.transpose() * astar * zt, zt.transpose() * astar * zf,
                            zf.transpose() * astar * zf, tol);
}

} // namespace

InfoMatrix info_proportional(const Design& d, const ProportionalScenario& s,
                             InfoMethod method, const Tolerance& tol) {
    validate(d);
    s.validate();
    InfoMatrix out;
    out.structure = CovStructure::Proportional;
    out.method = method;
    if (method == InfoMethod::Brute) {
        const Matrix sigma = build_proportional_sigma(s, d.n, d.p, tol);
        const Matrix astar = astar_brute(sigma, nuisance_basis(s.g, d.n, d.p), tol);
        out.matrix = info_from_astar(d, astar, s.g, CarryBasis::Raw, tol);
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(s.gamma);
        const Matrix gamma_inv = es.eigenvectors() *
                                 es.eigenvalues().cwiseInverse().asDiagonal() *
                                 es.eigenvectors().transpose();
        out.matrix = kron(gamma_inv, info_univariate(d, s.v(d.p), tol));
    }
    return out;
}

InfoMatrix info_markov(const Design& d, const MarkovScenario& s, InfoMethod method,
                       CarryBasis basis, const Tolerance& tol) {
    validate(d);
    s.validate();
    InfoMatrix out;
    out.structure = CovStructure::Markov;
    out.method = method;
    const Matrix astar = (method == InfoMethod::Brute)
                             ? astar_brute(build_markov_sigma(s, d.n, d.p, tol),
                                           nuisance_basis(2, d.n, d.p), tol)
                             : astar_markov_closed(s, d.n, d.p, tol);
    out.matrix = info_from_astar(d, astar, 2, basis, tol);
    return out;
}

InfoMatrix info_markov_noperiod(const Design& d, const MarkovScenario& s,
                                InfoMethod method, const Tolerance& tol) {
    validate(d);
    s.validate();
    InfoMatrix out;
    out.structure = CovStructure::Markov;
    out.method = method;
    Matrix a;
    if (method == InfoMethod::Brute) {
        const Matrix sigma = build_markov_sigma(s, d.n, d.p, tol);
        const Matrix u = kron(Matrix::Identity(d.n, d.n), Matrix::Ones(d.p, 1));
        const Matrix z = kron(Matrix::Identity(2, 2), u);
        a = astar_brute(sigma, z, tol);
    } else {
        const OmegaMatrices om = omega_matrices(s, d.p, tol);
        const Matrix in = Matrix::Identity(d.n, d.n);
        const Eigen::Index np = static_cast<Eigen::Index>(d.n) * d.p;
        a.resize(2 * np, 2 * np);
        a.topLeftCorner(np, np) = kron(in, om.omega1);
        a.topRightCorner(np, np) = -kron(in, om.omega2);
        a.bottomLeftCorner(np, np) = -kron(in, om.omega2);
        a.bottomRightCorner(np, np) = kron(in, om.omega4);
    }
    out.matrix = info_from_astar(d, a, 2, CarryBasis::Centered, tol);
    return out;
}

InfoMatrix info_markov_oa_closed(const MarkovScenario& s, int t, int n,
                                 const Tolerance& tol) {
    s.validate();
    if (t < 3)
        fail(ErrorCode::InvalidInput, "info_markov_oa_closed: t must be >= 3");
    const int base = t * (t - 1);
    if (n < base || n % base != 0)
        fail(ErrorCode::InvalidInput,
             "info_markov_oa_closed: n must equal lambda * t * (t-1)");
    const int p = t;
    const Matrix v1s = vstar(s.v1(p), tol);
    const Matrix vrs = vstar(s.vr(p), tol);
    const Matrix psi = shift_matrix(p);
    const Matrix hp = centering(p);
    const Matrix ht = centering(t);
    const double tr1 = v1s.trace();
    const double trr = vrs.trace();
    const double b1 = (v1s * psi).trace();
    const double br = (vrs * psi).trace();
    const double c1 = (hp * psi.transpose() * v1s * psi).trace();
    const double cr = (hp * psi.transpose() * vrs * psi).trace();
    const double rb = s.rho_bar();
    const double s12 = s.sigma12();
    const double lam1 = tr1 + (rb * rb / s12) * trr - b1 * b1 / c1 -
                        (rb * rb / s12) * (br * br / cr);
    const double lam4 = (trr - br * br / cr) / s12;
    const double lam2 = -rb * lam4;
    const double scale = static_cast<double>(n) / (t - 1);
    InfoMatrix out;
    out.structure = CovStructure::Markov;
    out.method = InfoMethod::Closed;
    out.matrix.resize(2 * t, 2 * t);
    out.matrix.topLeftCorner(t, t) = scale * lam1 * ht;
    out.matrix.topRightCorner(t, t) = scale * lam2 * ht;
    out.matrix.bottomLeftCorner(t, t) = scale * lam2 * ht;
    out.matrix.bottomRightCorner(t, t) = scale * lam4 * ht;
    return out;
}

double info_trace(const Design& d, const Scenario& s, InfoMethod method,
                  const Tolerance& tol) {
    if (const auto* prop = std::get_if<ProportionalScenario>(&s))
        return info_proportional(d, *prop, method, tol).matrix.trace();
    return info_markov(d, std::get<MarkovScenario>(s), method, CarryBasis::Centered, tol)
        .matrix.trace();
}

} // namespace xover

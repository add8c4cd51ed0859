#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <random>

#include "infomat.hpp"

using namespace xover;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

double rel_diff(const Matrix& a, const Matrix& b) {
    return max_abs(a - b) / std::max(1e-300, std::max(max_abs(a), max_abs(b)));
}

const Design kD1P3 = make_uniform(3, 2);
const Design kDstarP3 = make_oa(3, 1);

ProportionalScenario prop_scenario(double g12 = 0.5, double g22 = 1.0,
                                   KernelFamily fam = KernelFamily::Mat05,
                                   double r = 0.5) {
    ProportionalScenario s;
    s.g = 2;
    s.gamma = Matrix(2, 2);
    s.gamma << 1.0, g12, g12, g22;
    s.kernel = {fam, r, 1.0, {}};
    return s;
}

// independent full-projector GLS oracle: project the information of the
// direct effects out of the complete nuisance basis [1 | P | U | F] using
// Eigen's own decompositions
Matrix gls_univariate_oracle(const Design& d, const Matrix& v) {
    const int n = d.n, p = d.p;
    const Matrix t = treatment_matrix(d);
    const Matrix f = carryover_matrix(d);
    const Matrix sigma = kron(Matrix::Identity(n, n), v);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
    const Matrix si = es.eigenvectors() *
                      es.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                      es.eigenvectors().transpose();
    Matrix nuis(n * p, 1 + p + n + d.t);
    nuis << Matrix::Ones(n * p, 1), kron(Matrix::Ones(n, 1), Matrix::Identity(p, p)),
        kron(Matrix::Identity(n, n), Matrix::Ones(p, 1)), f;
    const Matrix z = si * nuis;
    const Matrix proj = z * Eigen::CompleteOrthogonalDecomposition<Matrix>(z).pseudoInverse();
    const Matrix q = Matrix::Identity(n * p, n * p) - proj;
    return t.transpose() * si * q * si * t;
}

} // namespace

TEST_CASE("nuisance basis layout") {
    const Matrix z1 = nuisance_basis(2, 3, 4);
    CHECK(z1.rows() == 24);
    CHECK(z1.cols() == 2 + 2 * (4 + 3));
    // intercept columns replicate ones over each response block
    CHECK(z1.col(0).head(12).sum() == doctest::Approx(12.0));
    CHECK(z1.col(0).tail(12).sum() == doctest::Approx(0.0));
}

TEST_CASE("brute-force A* annihilates the nuisance space") {
    const MarkovScenario s = markov_case(7, 0.6, 0.4, 1.3, 0.8);
    const Matrix sigma = build_markov_sigma(s, 3, 3);
    const Matrix z1 = nuisance_basis(2, 3, 3);
    const Matrix a = astar_brute(sigma, z1, {});
    CHECK(max_abs(a * z1) < 1e-9);

    // full nuisance span leaves nothing
    const Matrix everything = Matrix::Identity(6, 6);
    CHECK(max_abs(astar_brute(Matrix::Identity(6, 6), everything, {})) < 1e-12);
}

TEST_CASE("proportional A*: closed form equals brute force") {
    const ProportionalScenario s = prop_scenario(0.5, 2.0, KernelFamily::Mat05, 0.5);
    const Matrix brute = astar_brute(build_proportional_sigma(s, 3, 3),
                                     nuisance_basis(2, 3, 3), {});
    const Matrix closed = astar_proportional_closed(s, 3, 3);
    CHECK(rel_diff(brute, closed) < 1e-8);

    // zero row sums within each response block
    CHECK(max_abs(closed * Matrix::Ones(18, 1)) < 1e-10);

    // gamma = I produces a block-diagonal A*
    ProportionalScenario diag = s;
    diag.gamma = Matrix::Identity(2, 2);
    const Matrix a = astar_proportional_closed(diag, 3, 3);
    CHECK(max_abs(a.topRightCorner(9, 9)) < 1e-12);
    CHECK(max_abs(a.topLeftCorner(9, 9) - kron(centering(3), vstar(s.v(3)))) < 1e-10);
}

TEST_CASE("markov A*: closed form equals brute force") {
    const MarkovScenario s = markov_case(7, 0.5, 0.5, 1.0, 1.0);
    const Matrix brute =
        astar_brute(build_markov_sigma(s, 3, 3), nuisance_basis(2, 3, 3), {});
    const Matrix closed = astar_markov_closed(s, 3, 3);
    CHECK(rel_diff(brute, closed) < 1e-8);

    // off-diagonal block is -rho_bar times the lower-right block
    CHECK(max_abs(closed.topRightCorner(9, 9) +
                  s.rho_bar() * closed.bottomRightCorner(9, 9)) < 1e-10);
}

TEST_CASE("markov A* collapses to the proportional form when V_R = V_C") {
    MarkovScenario s = markov_case(7, 0.5, 0.4, 1.0, 1.0);
    s.kernel_vr = Kernel{KernelFamily::Mat05, 0.5, 1.0, {}}; // V_R = V_C
    const Matrix markov = astar_markov_closed(s, 3, 3);

    ProportionalScenario p = prop_scenario(0.4, 1.0, KernelFamily::Mat05, 0.5);
    const Matrix prop = astar_proportional_closed(p, 3, 3);
    CHECK(rel_diff(markov, prop) < 1e-8);
}

TEST_CASE("univariate information matrix") {
    const Matrix v = build_kernel_matrix({KernelFamily::Mat05, 0.5, 1.0, {}}, 3);
    const Matrix c = info_univariate(kDstarP3, v);

    // completely symmetric for the orthogonal array
    CHECK(is_completely_symmetric(c));
    CHECK(c(0, 0) == doctest::Approx(5.25128205128205).epsilon(1e-10));
    CHECK(max_abs(c * Matrix::Ones(3, 1)) < 1e-10);

    // the i.i.d. case against the independent full-projector GLS oracle
    for (const Design* d : {&kD1P3, &kDstarP3}) {
        const Matrix lhs = info_univariate(*d, Matrix::Identity(3, 3));
        const Matrix rhs = gls_univariate_oracle(*d, Matrix::Identity(3, 3));
        CHECK(rel_diff(lhs, rhs) < 1e-8);
    }
    // and for a correlated kernel
    CHECK(rel_diff(info_univariate(kD1P3, v), gls_univariate_oracle(kD1P3, v)) < 1e-8);
}

TEST_CASE("proportional information matrix") {
    const ProportionalScenario s = prop_scenario();
    const InfoMatrix closed = info_proportional(kD1P3, s, InfoMethod::Closed);
    const InfoMatrix brute = info_proportional(kD1P3, s, InfoMethod::Brute);
    CHECK(rel_diff(closed.matrix, brute.matrix) < 1e-8);

    // trace factorization tr(C) = tr(Gamma^{-1}) tr(C_uni)
    const double tr_uni = info_univariate(kD1P3, s.v(3)).trace();
    Eigen::SelfAdjointEigenSolver<Matrix> es(s.gamma, Eigen::EigenvaluesOnly);
    const double tr_ginv = es.eigenvalues().cwiseInverse().sum();
    CHECK(tr_ginv == doctest::Approx(8.0 / 3.0));
    CHECK(closed.matrix.trace() == doctest::Approx(tr_ginv * tr_uni).epsilon(1e-12));

    // nondiagonal Gamma spoils complete symmetry even for the OA
    const InfoMatrix oa = info_proportional(kDstarP3, s, InfoMethod::Closed);
    CHECK_FALSE(is_completely_symmetric(oa.matrix));

    // every t x t block annihilates 1_t
    for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
            CHECK(max_abs(oa.matrix.block(3 * bi, 3 * bj, 3, 3) * Matrix::Ones(3, 1)) <
                  1e-10);
}

TEST_CASE("markov information matrix: representations and methods agree") {
    const MarkovScenario s = markov_case(3, 0.6, 0.35, 1.0, 1.0);
    const InfoMatrix raw = info_markov(kD1P3, s, InfoMethod::Closed, CarryBasis::Raw);
    const InfoMatrix centered =
        info_markov(kD1P3, s, InfoMethod::Closed, CarryBasis::Centered);
    CHECK(rel_diff(raw.matrix, centered.matrix) < 1e-8);

    const InfoMatrix brute = info_markov(kD1P3, s, InfoMethod::Brute);
    CHECK(rel_diff(brute.matrix, centered.matrix) < 1e-8);

    // PSD and blockwise annihilation of constants
    Eigen::SelfAdjointEigenSolver<Matrix> es(centered.matrix, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
    for (int bi = 0; bi < 2; ++bi)
        for (int bj = 0; bj < 2; ++bj)
            CHECK(max_abs(centered.matrix.block(3 * bi, 3 * bj, 3, 3) *
                          Matrix::Ones(3, 1)) < 1e-9);
}

TEST_CASE("markov OA closed form") {
    const MarkovScenario s = markov_case(7, 0.5, 0.5, 1.0, 1.0);
    const InfoMatrix general = info_markov(kDstarP3, s, InfoMethod::Closed);
    const InfoMatrix closed = info_markov_oa_closed(s, 3, 6);
    CHECK(rel_diff(general.matrix, closed.matrix) < 1e-8);

    // trace identity of the OA expression
    const Matrix v1s = vstar(s.v1(3));
    const Matrix vrs = vstar(s.vr(3));
    const Matrix psi = shift_matrix(3);
    const Matrix hp = centering(3);
    const double kfac = (1.0 + s.rho_bar() * s.rho_bar()) / s.sigma12();
    const double expect =
        6.0 * (v1s.trace() + kfac * vrs.trace() -
               std::pow((v1s * psi).trace(), 2) / (hp * psi.transpose() * v1s * psi).trace() -
               kfac * std::pow((vrs * psi).trace(), 2) /
                   (hp * psi.transpose() * vrs * psi).trace());
    CHECK(closed.matrix.trace() == doctest::Approx(expect).epsilon(1e-12));

    // Lambda2 = -rho_bar Lambda4
    CHECK(max_abs(closed.matrix.topRightCorner(3, 3) +
                  s.rho_bar() * closed.matrix.bottomRightCorner(3, 3)) < 1e-12);

    // not completely symmetric for rho != 0
    CHECK_FALSE(is_completely_symmetric(closed.matrix));

    CHECK_THROWS_AS((void)info_markov_oa_closed(s, 3, 7), Error);
}

TEST_CASE("no-period-effects information matrix dominates") {
    const MarkovScenario s = markov_case(3, 0.6, 0.45, 1.2, 0.9);

    const InfoMatrix closed = info_markov_noperiod(kD1P3, s, InfoMethod::Closed);
    const InfoMatrix brute = info_markov_noperiod(kD1P3, s, InfoMethod::Brute);
    CHECK(rel_diff(closed.matrix, brute.matrix) < 1e-8);

    // equality for a design uniform on periods
    const InfoMatrix c = info_markov(kD1P3, s, InfoMethod::Closed);
    CHECK(rel_diff(c.matrix, closed.matrix) < 1e-8);

    // strict dominance once period uniformity is broken (swap one column's
    // first two periods; the design stays binary)
    Design skew = kD1P3;
    std::swap(skew.at(0, 0), skew.at(1, 0));
    REQUIRE(classify(skew).binary);
    REQUIRE_FALSE(classify(skew).uniform_on_periods);
    const InfoMatrix cs = info_markov(skew, s, InfoMethod::Closed);
    const InfoMatrix ct = info_markov_noperiod(skew, s, InfoMethod::Closed);
    CHECK(loewner_leq(cs.matrix, ct.matrix));
    CHECK(max_abs(ct.matrix - cs.matrix) > 1e-6);
    CHECK(ct.matrix.trace() > cs.matrix.trace() + 1e-8);
}

TEST_CASE("info_trace dispatches over structures") {
    const Scenario prop{prop_scenario()};
    const Scenario markov{markov_case(7, 0.5, 0.5, 1.0, 1.0)};
    CHECK(info_trace(kDstarP3, prop, InfoMethod::Closed) > 0.0);
    CHECK(info_trace(kDstarP3, markov, InfoMethod::Closed) ==
          doctest::Approx(34.641856694030615).epsilon(1e-10));
}

TEST_CASE("brute and closed paths agree on arbitrary random designs") {
    std::mt19937 rng(424242);
    for (int trial = 0; trial < 8; ++trial) {
        Design d;
        d.t = 3;
        d.p = 3;
        d.n = 3 + static_cast<int>(rng() % 2);
        d.cells.resize(static_cast<std::size_t>(d.p) * d.n);
        for (auto& c : d.cells) c = static_cast<int>(rng() % 3); // non-binary allowed

        const MarkovScenario ms = markov_case(1 + static_cast<int>(rng() % 7),
                                              0.1 + 0.08 * static_cast<int>(rng() % 10),
                                              (rng() % 2 ? 0.45 : -0.45), 1.0, 1.4);
        const Matrix closed = info_markov(d, ms, InfoMethod::Closed).matrix;
        const Matrix brute = info_markov(d, ms, InfoMethod::Brute).matrix;
        const Matrix raw = info_markov(d, ms, InfoMethod::Closed, CarryBasis::Raw).matrix;
        // degenerate designs can have C = 0 exactly; compare with a unit
        // scale floor so round-off around zero still counts as equal
        auto close = [](const Matrix& a, const Matrix& b) {
            const double scale =
                std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), 1.0});
            return (a - b).cwiseAbs().maxCoeff() / scale < 1e-8;
        };
        CHECK(close(closed, brute));
        CHECK(close(closed, raw));
        Eigen::SelfAdjointEigenSolver<Matrix> es(closed, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >
              -1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff()));

        const ProportionalScenario p = prop_scenario(0.3, 1.7, KernelFamily::Mat15, 0.45);
        CHECK(close(info_proportional(d, p, InfoMethod::Closed).matrix,
                    info_proportional(d, p, InfoMethod::Brute).matrix));
    }
}

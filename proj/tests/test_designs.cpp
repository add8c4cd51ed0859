#include <doctest.h>

#include <algorithm>
#include <random>

#include "designs.hpp"

using namespace xover;

namespace {

Design from_rows(int t, std::vector<std::vector<int>> rows) {
    Design d;
    d.p = static_cast<int>(rows.size());
    d.n = static_cast<int>(rows[0].size());
    d.t = t;
    d.cells.resize(static_cast<std::size_t>(d.p) * d.n);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.n; ++j) d.at(i, j) = rows[i][j] - 1;
    return d;
}

const Design kD1P3 = from_rows(3, {{1, 2, 3, 1, 2, 3}, {2, 3, 1, 2, 3, 1}, {3, 1, 2, 3, 1, 2}});
const Design kDstarP3 =
    from_rows(3, {{1, 2, 3, 1, 2, 3}, {2, 3, 1, 3, 1, 2}, {3, 1, 2, 2, 3, 1}});
const Design kD2P4 = from_rows(4, {{1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4},
                                   {4, 1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3},
                                   {2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4, 1},
                                   {3, 4, 1, 2, 3, 4, 1, 2, 3, 4, 1, 2}});
const Design kD1P4 = from_rows(4, {{1, 4, 3, 2, 1, 4, 3, 2, 1, 4, 3, 2},
                                   {2, 1, 4, 3, 2, 1, 4, 3, 2, 1, 4, 3},
                                   {3, 2, 1, 4, 3, 2, 1, 4, 3, 2, 1, 4},
                                   {4, 3, 2, 1, 4, 3, 2, 1, 4, 3, 2, 1}});
const Design kDstarP4 = from_rows(4, {{1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4},
                                      {2, 3, 4, 1, 3, 4, 1, 2, 4, 1, 2, 3},
                                      {3, 4, 2, 4, 1, 3, 2, 4, 1, 3, 1, 2},
                                      {4, 2, 3, 3, 4, 1, 4, 1, 2, 2, 3, 1}});

std::vector<std::vector<int>> sorted_columns(const Design& d) {
    std::vector<std::vector<int>> cols;
    for (int j = 0; j < d.n; ++j) {
        std::vector<int> col(d.p);
        for (int i = 0; i < d.p; ++i) col[i] = d.at(i, j);
        cols.push_back(std::move(col));
    }
    std::sort(cols.begin(), cols.end());
    return cols;
}

} // namespace

TEST_CASE("shift matrix") {
    const Matrix psi = shift_matrix(3);
    Matrix expect(3, 3);
    expect << 0, 0, 0, 1, 0, 0, 0, 1, 0;
    CHECK((psi - expect).cwiseAbs().maxCoeff() == 0.0);

    const Vector carried = psi * Vector::Ones(3);
    CHECK(carried(0) == 0.0);
    CHECK(carried(1) == 1.0);
    CHECK(carried(2) == 1.0);

    Matrix power = Matrix::Identity(4, 4);
    for (int k = 0; k < 4; ++k) power = power * shift_matrix(4);
    CHECK(power.cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)shift_matrix(0), Error);
}

TEST_CASE("treatment and carryover matrices") {
    const Design single = from_rows(3, {{1}, {2}, {3}});
    CHECK((treatment_matrix(single) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

    const Design rep = from_rows(2, {{2}, {2}, {2}});
    const Matrix t = treatment_matrix(rep);
    for (int i = 0; i < 3; ++i) {
        CHECK(t(i, 0) == 0.0);
        CHECK(t(i, 1) == 1.0);
    }

    // replication counts on d1: every treatment appears 6 times
    const Vector counts = treatment_matrix(kD1P3).transpose() * Vector::Ones(18);
    for (int k = 0; k < 3; ++k) CHECK(counts(k) == 6.0);

    const Matrix f = carryover_matrix(single);
    CHECK(f.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(f(1, 0) == 1.0);
    CHECK(f(2, 1) == 1.0);

    // first-period rows empty, others carry exactly one label
    const Matrix fd1 = carryover_matrix(kD1P3);
    for (int j = 0; j < 6; ++j) {
        CHECK(fd1.row(3 * j).cwiseAbs().maxCoeff() == 0.0);
        CHECK(fd1.row(3 * j + 1).sum() == 1.0);
    }

    // carryover counts on the p=3 orthogonal array: (4, 4, 4)
    const Vector fcounts = carryover_matrix(kDstarP3).transpose() * Vector::Ones(18);
    for (int k = 0; k < 3; ++k) CHECK(fcounts(k) == 4.0);

    // F = kron(I_n, psi) T exactly
    const Matrix lhs = carryover_matrix(kDstarP4);
    const Matrix rhs = kron(Matrix::Identity(12, 12), shift_matrix(4)) *
                       treatment_matrix(kDstarP4);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("classification of the studied designs") {
    const DesignClassFlags f1 = classify(kD1P3);
    CHECK(f1.uniform);
    CHECK(f1.binary);
    CHECK_FALSE(f1.oa_lambda.has_value());

    const DesignClassFlags f2 = classify(kD2P4);
    CHECK(f2.balanced_uniform);
    CHECK(f2.uniform);

    const DesignClassFlags fs = classify(kDstarP3);
    CHECK(fs.binary);
    CHECK(fs.uniform_on_periods);
    // at p = t = 3 the six-column orthogonal array doubles as a balanced
    // uniform design (every ordered pair twice in consecutive periods)
    CHECK(fs.balanced_uniform);

    CHECK_FALSE(classify(from_rows(3, {{1}, {1}, {2}})).binary);
}

TEST_CASE("for p = t binary coincides with uniform-on-subjects") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Design d;
        d.t = 3;
        d.p = 3;
        d.n = 4;
        d.cells.resize(12);
        for (auto& c : d.cells) c = static_cast<int>(rng() % 3);
        const DesignClassFlags f = classify(d);
        CHECK(f.binary == f.uniform_on_subjects);
    }
}

TEST_CASE("orthogonal array verification") {
    CHECK(verify_oa_type1_strength2(kDstarP3) == 1);
    CHECK(verify_oa_type1_strength2(kDstarP4) == 1);
    CHECK_FALSE(verify_oa_type1_strength2(kD1P3).has_value());

    // repeated treatment within a column disqualifies
    Design bad = kDstarP3;
    bad.at(0, 0) = bad.at(1, 0);
    CHECK_FALSE(verify_oa_type1_strength2(bad).has_value());
}

TEST_CASE("uniform design construction") {
    const Design d1 = make_uniform(3, 2);
    CHECK(d1.cells == kD1P3.cells);
    CHECK(classify(d1).uniform);
    CHECK(classify(make_uniform(4, 3)).uniform_on_periods);

    // the t = 4 uniform fixture matches the studied one up to column order
    CHECK(sorted_columns(make_uniform(4, 3)) == sorted_columns(kD1P4));

    CHECK_THROWS_AS((void)make_uniform(1, 1), Error);
}

TEST_CASE("balanced uniform construction (Williams squares)") {
    const Design d2 = make_balanced_uniform(4, 3);
    CHECK(d2.cells == kD2P4.cells);
    CHECK(classify(d2).balanced_uniform);

    // one replicate: every ordered pair of distinct treatments appears once
    const Design one = make_balanced_uniform(4, 1);
    std::vector<int> pairs(16, 0);
    for (int j = 0; j < one.n; ++j)
        for (int i = 0; i + 1 < one.p; ++i) ++pairs[one.at(i, j) * 4 + one.at(i + 1, j)];
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(pairs[a * 4 + b] == (a == b ? 0 : 1));

    try {
        (void)make_balanced_uniform(3, 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Unsupported);
    }
}

TEST_CASE("orthogonal array construction") {
    const Design oa3 = make_oa(3, 1);
    CHECK(oa3.cells == kDstarP3.cells);
    CHECK(verify_oa_type1_strength2(oa3) == 1);

    const Design oa3x3 = make_oa(3, 3);
    CHECK(oa3x3.n == 18);
    CHECK(verify_oa_type1_strength2(oa3x3) == 3);

    const Design oa4 = make_oa(4, 1);
    CHECK(oa4.cells == kDstarP4.cells);
    CHECK(verify_oa_type1_strength2(oa4) == 1);

    try {
        (void)make_oa(5, 1);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Unsupported);
    }
}

TEST_CASE("gene study design") {
    const Design d0 = gene_study_design();
    CHECK(d0.n == 18);
    CHECK(d0.t == 3);
    const DesignClassFlags f = classify(d0);
    CHECK(f.uniform);
    CHECK(f.binary);
    CHECK_FALSE(f.oa_lambda.has_value());
    // three sequence groups of six identical columns
    for (int grp = 0; grp < 3; ++grp)
        for (int rep = 1; rep < 6; ++rep)
            for (int i = 0; i < 3; ++i)
                CHECK(d0.at(i, grp * 6 + rep) == d0.at(i, grp * 6));
}

TEST_CASE("design text format") {
    const std::string text = format_design(kDstarP3);
    const Design back = parse_design(text);
    CHECK(back.cells == kDstarP3.cells);
    CHECK(back.t == 3);

    const Design commented = parse_design("# fixture\n3 2 3 # dims\n1 2\n2 3\n3 1\n");
    CHECK(commented.n == 2);
    CHECK(commented.at(0, 1) == 1);

    CHECK_THROWS_AS((void)parse_design("3 2 3\n1 2\n2 x\n3 1\n"), Error);
    CHECK_THROWS_AS((void)parse_design("3 2 3\n1 2\n2 3\n"), Error);
    CHECK_THROWS_AS((void)parse_design("3 2 3\n1 2\n2 4\n3 1\n"), Error);
    CHECK_THROWS_AS((void)parse_design(""), Error);
}

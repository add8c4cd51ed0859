#include "designs.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace xover {

void validate(const Design& d) {
    if (d.t < 1 || d.n < 1 || d.p < 1)
        fail(ErrorCode::InvalidInput, "design: t, n, p must all be >= 1");
    if (static_cast<std::size_t>(d.p) * static_cast<std::size_t>(d.n) != d.cells.size())
        fail(ErrorCode::InvalidInput, "design: cell count does not match p*n");
    for (int v : d.cells)
        if (v < 0 || v >= d.t)
            fail(ErrorCode::InvalidInput, "design: treatment label out of range 1.." +
                                              std::to_string(d.t));
}

Matrix shift_matrix(int p) {
    if (p < 1)
        fail(ErrorCode::InvalidInput, "shift_matrix: p must be >= 1");
    Matrix s = Matrix::Zero(p, p);
    for (int i = 0; i + 1 < p; ++i) s(i + 1, i) = 1.0;
    return s;
}

Matrix treatment_matrix(const Design& d) {
    validate(d);
    Matrix t = Matrix::Zero(static_cast<Eigen::Index>(d.n) * d.p, d.t);
    for (int j = 0; j < d.n; ++j)
        for (int i = 0; i < d.p; ++i)
            t(static_cast<Eigen::Index>(j) * d.p + i, d.at(i, j)) = 1.0;
    return t;
}

Matrix carryover_matrix(const Design& d) {
    validate(d);
    Matrix f = Matrix::Zero(static_cast<Eigen::Index>(d.n) * d.p, d.t);
    for (int j = 0; j < d.n; ++j)
        for (int i = 1; i < d.p; ++i)
            f(static_cast<Eigen::Index>(j) * d.p + i, d.at(i - 1, j)) = 1.0;
    return f;
}

DesignClassFlags classify(const Design& d) {
    validate(d);
    DesignClassFlags flags;

    flags.binary = true;
    for (int j = 0; j < d.n && flags.binary; ++j) {
        std::vector<char> seen(d.t, 0);
        for (int i = 0; i < d.p; ++i) {
            if (seen[d.at(i, j)]) { flags.binary = false; break; }
            seen[d.at(i, j)] = 1;
        }
    }

    flags.uniform_on_periods = (d.n % d.t == 0);
    if (flags.uniform_on_periods) {
        const int want = d.n / d.t;
        for (int i = 0; i < d.p && flags.uniform_on_periods; ++i) {
            std::vector<int> count(d.t, 0);
            for (int j = 0; j < d.n; ++j) ++count[d.at(i, j)];
            for (int c : count)
                if (c != want) { flags.uniform_on_periods = false; break; }
        }
    }

    flags.uniform_on_subjects = (d.p % d.t == 0);
    if (flags.uniform_on_subjects) {
        const int want = d.p / d.t;
        for (int j = 0; j < d.n && flags.uniform_on_subjects; ++j) {
            std::vector<int> count(d.t, 0);
            for (int i = 0; i < d.p; ++i) ++count[d.at(i, j)];
            for (int c : count)
                if (c != want) { flags.uniform_on_subjects = false; break; }
        }
    }

    flags.uniform = flags.uniform_on_periods && flags.uniform_on_subjects;

    flags.balanced_uniform = false;
    if (flags.uniform && d.p >= 2 && d.t >= 2) {
        // every ordered pair of distinct treatments equally often in
        // consecutive periods
        std::vector<long long> pair_count(static_cast<std::size_t>(d.t) * d.t, 0);
        for (int j = 0; j < d.n; ++j)
            for (int i = 0; i + 1 < d.p; ++i)
                ++pair_count[static_cast<std::size_t>(d.at(i, j)) * d.t + d.at(i + 1, j)];
        flags.balanced_uniform = true;
        const long long want = pair_count[1]; // count of the pair (1, 2)
        for (int a = 0; a < d.t && flags.balanced_uniform; ++a)
            for (int b = 0; b < d.t; ++b)
                if (a != b && pair_count[static_cast<std::size_t>(a) * d.t + b] != want) {
                    flags.balanced_uniform = false;
                    break;
                }
    }

    flags.oa_lambda = verify_oa_type1_strength2(d);
    return flags;
}

std::optional<int> verify_oa_type1_strength2(const Design& d) {
    validate(d);
    // Type I: all entries distinct within every column.
    for (int j = 0; j < d.n; ++j) {
        std::vector<char> seen(d.t, 0);
        for (int i = 0; i < d.p; ++i) {
            if (seen[d.at(i, j)]) return std::nullopt;
            seen[d.at(i, j)] = 1;
        }
    }
    const long long npairs = static_cast<long long>(d.t) * (d.t - 1);
    if (d.p < 2 || d.n % npairs != 0) return std::nullopt;
    const long long lambda = d.n / npairs;
    std::vector<long long> count(static_cast<std::size_t>(d.t) * d.t);
    for (int i1 = 0; i1 < d.p; ++i1)
        for (int i2 = 0; i2 < d.p; ++i2) {
            if (i1 == i2) continue;
            std::fill(count.begin(), count.end(), 0);
            for (int j = 0; j < d.n; ++j)
                ++count[static_cast<std::size_t>(d.at(i1, j)) * d.t + d.at(i2, j)];
            for (int a = 0; a < d.t; ++a)
                for (int b = 0; b < d.t; ++b)
                    if (a != b && count[static_cast<std::size_t>(a) * d.t + b] != lambda)
                        return std::nullopt;
        }
    return static_cast<int>(lambda);
}

Design make_uniform(int t, int reps) {
    if (t < 2 || reps < 1)
        fail(ErrorCode::InvalidInput, "make_uniform: need t >= 2 and reps >= 1");
    Design d;
    d.t = t;
    d.p = t;
    d.n = t * reps;
    d.cells.resize(static_cast<std::size_t>(d.p) * d.n);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.n; ++j)
            d.at(i, j) = (i + j) % t;
    return d;
}

Design make_balanced_uniform(int t, int reps) {
    if (t % 2 != 0 || t < 4)
        fail(ErrorCode::Unsupported,
             "make_balanced_uniform: only even t >= 4 is supported (Williams squares)");
    if (reps < 1)
        fail(ErrorCode::InvalidInput, "make_balanced_uniform: reps must be >= 1");
    // Williams first column: 0, t-1, 1, t-2, 2, ...; remaining columns are
    // cyclic shifts. One square per replicate.
    std::vector<int> first(t);
    for (int k = 0; k < t; ++k)
        first[k] = (k % 2 == 0) ? k / 2 : t - (k + 1) / 2;
    Design d;
    d.t = t;
    d.p = t;
    d.n = t * reps;
    d.cells.resize(static_cast<std::size_t>(d.p) * d.n);
    for (int rep = 0; rep < reps; ++rep)
        for (int c = 0; c < t; ++c)
            for (int i = 0; i < t; ++i)
                d.at(i, rep * t + c) = (first[i] + c) % t;
    return d;
}

namespace {

// Orthogonal-array fixtures (1-based in source, converted below).
constexpr int kOa3[3][6] = {
    {1, 2, 3, 1, 2, 3},
    {2, 3, 1, 3, 1, 2},
    {3, 1, 2, 2, 3, 1},
};

constexpr int kOa4[4][12] = {
    {1, 1, 1, 2, 2, 2, 3, 3, 3, 4, 4, 4},
    {2, 3, 4, 1, 3, 4, 1, 2, 4, 1, 2, 3},
    {3, 4, 2, 4, 1, 3, 2, 4, 1, 3, 1, 2},
    {4, 2, 3, 3, 4, 1, 4, 1, 2, 2, 3, 1},
};

} // namespace

Design make_oa(int t, int lambda) {
    if (lambda < 1)
        fail(ErrorCode::InvalidInput, "make_oa: lambda must be >= 1");
    if (t != 3 && t != 4)
        fail(ErrorCode::Unsupported,
             "make_oa: fixtures exist for t in {3, 4} only; use "
             "verify_oa_type1_strength2 to validate user-supplied arrays");
    const int base_n = t * (t - 1);
    Design d;
    d.t = t;
    d.p = t;
    d.n = base_n * lambda;
    d.cells.resize(static_cast<std::size_t>(d.p) * d.n);
    for (int i = 0; i < d.p; ++i)
        for (int rep = 0; rep < lambda; ++rep)
            for (int j = 0; j < base_n; ++j)
                d.at(i, rep * base_n + j) = (t == 3 ? kOa3[i][j] : kOa4[i][j]) - 1;
    return d;
}

Design gene_study_design() {
    const int seq[3][3] = {{1, 2, 3}, {3, 1, 2}, {2, 3, 1}};
    Design d;
    d.t = 3;
    d.p = 3;
    d.n = 18;
    d.cells.resize(54);
    for (int grp = 0; grp < 3; ++grp)
        for (int rep = 0; rep < 6; ++rep)
            for (int i = 0; i < 3; ++i)
                d.at(i, grp * 6 + rep) = seq[grp][i] - 1;
    return d;
}

Design parse_design(std::string_view text) {
    std::vector<long long> numbers;
    std::istringstream is{std::string(text)};
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            std::size_t pos = 0;
            long long v = 0;
            try {
                v = std::stoll(tok, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != tok.size())
                fail(ErrorCode::Parse, "design: non-numeric token '" + tok + "'");
            numbers.push_back(v);
        }
    }
    if (numbers.size() < 3)
        fail(ErrorCode::Parse, "design: missing 't n p' header");
    const long long t = numbers[0], n = numbers[1], p = numbers[2];
    if (t < 1 || n < 1 || p < 1 || t > 1000000 || n > 1000000 || p > 1000000)
        fail(ErrorCode::Parse, "design: header values out of range");
    if (static_cast<long long>(numbers.size()) - 3 != p * n)
        fail(ErrorCode::Parse, "design: expected " + std::to_string(p * n) +
                                   " labels, found " +
                                   std::to_string(numbers.size() - 3));
    Design d;
    d.t = static_cast<int>(t);
    d.n = static_cast<int>(n);
    d.p = static_cast<int>(p);
    d.cells.resize(static_cast<std::size_t>(d.p) * d.n);
    for (int i = 0; i < d.p; ++i)
        for (int j = 0; j < d.n; ++j) {
            const long long v = numbers[3 + static_cast<std::size_t>(i) * d.n + j];
            if (v < 1 || v > t)
                fail(ErrorCode::Parse, "design: label " + std::to_string(v) +
                                           " outside 1.." + std::to_string(t));
            d.at(i, j) = static_cast<int>(v - 1);
        }
    return d;
}

std::string format_design(const Design& d) {
    validate(d);
    std::ostringstream os;
    os << d.t << ' ' << d.n << ' ' << d.p << '\n';
    for (int i = 0; i < d.p; ++i) {
        for (int j = 0; j < d.n; ++j) {
            if (j) os << ' ';
            os << d.at(i, j) + 1;
        }
        os << '\n';
    }
    return os.str();
}

} // namespace xover

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "matlib.hpp"

namespace xover {

// Crossover design: assignment of t treatments to n subjects over p
// periods. Stored in display orientation (rows = periods, columns =
// subjects) with 0-based labels internally; files and formatting use
// 1-based labels.
struct Design {
    int t = 0;
    int n = 0;
    int p = 0;
    std::vector<int> cells; // p*n entries, cells[i*n + j] = label of (period i, subject j)

    int at(int period, int subject) const { return cells[period * n + subject]; }
    int& at(int period, int subject) { return cells[period * n + subject]; }
};

struct DesignClassFlags {
    bool binary = false;
    bool uniform_on_periods = false;
    bool uniform_on_subjects = false;
    bool uniform = false;
    bool balanced_uniform = false;
    std::optional<int> oa_lambda; // set iff the design is an OA of Type I, strength 2
};

// Throws InvalidInput unless dims are consistent and labels lie in 0..t-1.
void validate(const Design& d);

// p x p matrix with ones on the first subdiagonal; maps period i to i+1.
Matrix shift_matrix(int p);

// np x t 0/1 incidence of treatments; observation rows are stacked
// subject-major (subject j occupies rows j*p .. j*p+p-1).
Matrix treatment_matrix(const Design& d);

// kron(I_n, shift_matrix(p)) * treatment_matrix(d); the first-period row
// of each subject block is zero.
Matrix carryover_matrix(const Design& d);

DesignClassFlags classify(const Design& d);

// Returns lambda if the design is a Type-I strength-2 orthogonal array
// (all-distinct columns entries; every ordered pair of distinct
// treatments appears exactly lambda times across columns for every
// ordered pair of distinct rows), otherwise nullopt.
std::optional<int> verify_oa_type1_strength2(const Design& d);

// p = t, n = t*reps; column j carries the (j mod t)-th cyclic shift of 1..t.
Design make_uniform(int t, int reps);

// Williams-square construction; even t only.
Design make_balanced_uniform(int t, int reps);

// Fixture-backed OA for t in {3, 4}; lambda-fold column replication.
Design make_oa(int t, int lambda);

// The 18-subject, 3-sequence gene-study design (sequences 123, 312, 231,
// six subjects each).
Design gene_study_design();

// Text format: first non-comment line "t n p", then p rows of n labels.
// '#' starts a comment.
Design parse_design(std::string_view text);
std::string format_design(const Design& d);

} // namespace xover

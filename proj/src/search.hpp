#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "efficiency.hpp"

namespace xover {

constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct SearchHit {
    Design design;
    double trace = 0.0;
};

struct SearchReport {
    std::uint64_t evaluated = 0;
    std::vector<SearchHit> best; // lexicographically first maximizers, capped
    double best_trace = 0.0;
    std::uint64_t ties = 0;           // designs within eq_tol of best_trace
    std::uint64_t oa_rank = 0;        // 1 + strictly-better count; 0 when no OA reference
    std::optional<double> oa_trace;   // trace of the same-size OA, when one exists
    std::optional<double> upper_bound; // Markov scenarios only
    double max_trace = 0.0;
    bool sampled = false;
    std::uint64_t seed = 0;
    std::uint64_t sample_count = 0;
};

// (t!)^n, the size of the binary class with p = t; errors out past cap.
std::uint64_t binary_design_count(int t, int n, std::uint64_t cap);

// Streams every design whose columns are permutations of 1..t, in
// lexicographic column-tuple order. Errors with Capacity when the class
// size exceeds cap.
void enumerate_binary(int t, int n, std::uint64_t cap,
                      const std::function<void(const Design&)>& fn);

// Deterministic pseudo-random binary designs (columns drawn uniformly
// over permutations); identical output for identical seeds.
void sample_binary(int t, int n, std::uint64_t count, std::uint64_t seed,
                   bool include_fixtures, const std::function<void(const Design&)>& fn);

SearchReport rank_by_trace_exhaustive(int t, int n, const Scenario& s,
                                      std::uint64_t cap = kDefaultEnumerationCap,
                                      const Tolerance& tol = {});

SearchReport rank_by_trace_sampled(int t, int n, std::uint64_t count,
                                   std::uint64_t seed, bool include_fixtures,
                                   const Scenario& s, const Tolerance& tol = {});

std::string search_report_json(const SearchReport& report);

} // namespace xover

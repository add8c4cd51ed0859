#include "search.hpp"

#include <algorithm>
#include <mutex>
#include <random>

#include "evaluator.hpp"
#include "formats.hpp"
#include "parallel.hpp"

#include <nlohmann/json.hpp>

namespace xover {

using json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kBestCap = 10; // designs carried in the report

std::uint64_t factorial(int t) {
    std::uint64_t f = 1;
    for (int k = 2; k <= t; ++k) f *= static_cast<std::uint64_t>(k);
    return f;
}

std::vector<std::vector<int>> lexicographic_permutations(int t) {
    std::vector<int> base(t);
    for (int i = 0; i < t; ++i) base[i] = i;
    std::vector<std::vector<int>> perms;
    do {
        perms.push_back(base);
    } while (std::next_permutation(base.begin(), base.end()));
    return perms;
}

Design design_from_digits(int t, int n, const std::vector<std::vector<int>>& perms,
                          const std::vector<std::uint32_t>& digits) {
    Design d;
    d.t = t;
    d.p = t;
    d.n = n;
    d.cells.resize(static_cast<std::size_t>(t) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < t; ++i) d.at(i, j) = perms[digits[j]][i];
    return d;
}

Design design_from_index(int t, int n, const std::vector<std::vector<int>>& perms,
                         std::uint64_t index) {
    const std::uint64_t tf = perms.size();
    std::vector<std::uint32_t> digits(n);
    for (int j = n - 1; j >= 0; --j) {
        digits[j] = static_cast<std::uint32_t>(index % tf);
        index /= tf;
    }
    return design_from_digits(t, n, perms, digits);
}

// Unbiased bounded uniform on [0, bound) from raw 64-bit draws.
std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % bound;
}

// Candidate maximizers kept during a scan: indices whose trace sits
// within `slack` of the running maximum.
struct Candidates {
    double max_trace = -std::numeric_limits<double>::infinity();
    double slack_factor;
    std::vector<std::pair<std::uint64_t, double>> near_best; // (order key, trace)
    std::uint64_t above_reference = 0;

    explicit Candidates(double eq_tol) : slack_factor(4.0 * eq_tol) {}

    double slack() const { return slack_factor * std::max(std::abs(max_trace), 1.0); }

    void add(std::uint64_t key, double trace, const std::optional<double>& reference,
             double eq_tol) {
        if (reference &&
            trace > *reference + eq_tol * std::max(std::abs(*reference), 1.0))
            ++above_reference;
        if (trace > max_trace) {
            max_trace = trace;
            const double cut = max_trace - slack();
            near_best.erase(std::remove_if(near_best.begin(), near_best.end(),
                                           [&](const auto& c) { return c.second < cut; }),
                            near_best.end());
        }
        if (trace >= max_trace - slack()) near_best.emplace_back(key, trace);
    }
};

SearchReport finalize(int t, int n, const std::vector<std::vector<int>>& perms,
                      std::vector<Candidates>& chunks, std::uint64_t evaluated,
                      const std::optional<double>& oa_trace,
                      const std::optional<std::vector<Design>>& sampled_designs,
                      double eq_tol) {
    SearchReport report;
    report.evaluated = evaluated;
    report.oa_trace = oa_trace;
    double best = -std::numeric_limits<double>::infinity();
    for (const Candidates& c : chunks) best = std::max(best, c.max_trace);
    report.best_trace = best;
    report.max_trace = best;
    const double tie_cut = best - eq_tol * std::max(std::abs(best), 1.0);
    std::vector<std::pair<std::uint64_t, double>> ties;
    std::uint64_t above_ref = 0;
    for (const Candidates& c : chunks) {
        above_ref += c.above_reference;
        for (const auto& cand : c.near_best)
            if (cand.second >= tie_cut) ties.push_back(cand);
    }
    std::sort(ties.begin(), ties.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    report.ties = ties.size();
    if (oa_trace) report.oa_rank = 1 + above_ref;
    for (std::size_t i = 0; i < ties.size() && i < kBestCap; ++i) {
        SearchHit hit;
        hit.trace = ties[i].second;
        hit.design = sampled_designs
                         ? (*sampled_designs)[static_cast<std::size_t>(ties[i].first)]
                         : design_from_index(t, n, perms, ties[i].first);
        report.best.push_back(std::move(hit));
    }
    return report;
}

std::optional<double> reference_oa_trace(int t, int n, const TraceEvaluator& ev) {
    if (t != 3 && t != 4) return std::nullopt;
    const int base = t * (t - 1);
    if (n % base != 0 || n == 0) return std::nullopt;
    return ev.trace(make_oa(t, n / base));
}

} // namespace

std::uint64_t binary_design_count(int t, int n, std::uint64_t cap) {
    if (t < 2 || n < 1)
        fail(ErrorCode::InvalidInput, "binary_design_count: need t >= 2, n >= 1");
    if (t > 20)
        fail(ErrorCode::Capacity, "binary_design_count: t! overflows past t = 20");
    const std::uint64_t tf = factorial(t);
    std::uint64_t total = 1;
    for (int j = 0; j < n; ++j) {
        if (total > cap / tf + 1)
            fail(ErrorCode::Capacity,
                 "binary class size (t!)^n exceeds the enumeration cap of " +
                     std::to_string(cap) + "; use sampling instead");
        total *= tf;
    }
    if (total > cap)
        fail(ErrorCode::Capacity,
             "binary class size " + std::to_string(total) +
                 " exceeds the enumeration cap of " + std::to_string(cap) +
                 "; use sampling instead");
    return total;
}

void enumerate_binary(int t, int n, std::uint64_t cap,
                      const std::function<void(const Design&)>& fn) {
    const std::uint64_t total = binary_design_count(t, n, cap);
    const auto perms = lexicographic_permutations(t);
    std::vector<std::uint32_t> digits(n, 0);
    for (std::uint64_t k = 0; k < total; ++k) {
        fn(design_from_digits(t, n, perms, digits));
        for (int j = n - 1; j >= 0; --j) {
            if (++digits[j] < perms.size()) break;
            digits[j] = 0;
        }
    }
}

void sample_binary(int t, int n, std::uint64_t count, std::uint64_t seed,
                   bool include_fixtures, const std::function<void(const Design&)>& fn) {
    if (t < 2 || n < 1)
        fail(ErrorCode::InvalidInput, "sample_binary: need t >= 2, n >= 1");
    const auto perms = lexicographic_permutations(t);
    std::uint64_t emitted = 0;
    if (include_fixtures) {
        std::vector<Design> fixtures;
        if (n % t == 0) fixtures.push_back(make_uniform(t, n / t));
        if (t % 2 == 0 && t >= 4 && n % t == 0)
            fixtures.push_back(make_balanced_uniform(t, n / t));
        if ((t == 3 || t == 4) && n % (t * (t - 1)) == 0)
            fixtures.push_back(make_oa(t, n / (t * (t - 1))));
        for (const Design& d : fixtures) {
            if (emitted >= count) return;
            fn(d);
            ++emitted;
        }
    }
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> digits(n);
    for (; emitted < count; ++emitted) {
        for (int j = 0; j < n; ++j)
            digits[j] = static_cast<std::uint32_t>(bounded_uniform(rng, perms.size()));
        fn(design_from_digits(t, n, perms, digits));
    }
}

SearchReport rank_by_trace_exhaustive(int t, int n, const Scenario& s,
                                      std::uint64_t cap, const Tolerance& tol) {
    const std::uint64_t total = binary_design_count(t, n, cap);
    const auto perms = lexicographic_permutations(t);
    const TraceEvaluator ev(s, t, n, t, tol);

    const std::optional<double> oa_trace = reference_oa_trace(t, n, ev);

    std::vector<Candidates> chunks;
    std::mutex chunks_mutex;
    parallel_chunks(total, [&](std::uint64_t begin, std::uint64_t end) {
        Candidates local(tol.eq_tol);
        const std::uint64_t tf = perms.size();
        std::vector<std::uint32_t> digits(n);
        std::uint64_t idx = begin;
        for (int j = n - 1; j >= 0; --j) {
            digits[j] = static_cast<std::uint32_t>(idx % tf);
            idx /= tf;
        }
        Design d = design_from_digits(t, n, perms, digits);
        for (std::uint64_t k = begin; k < end; ++k) {
            local.add(k, ev.trace(d), oa_trace, tol.eq_tol);
            // lexicographic increment
            for (int j = n - 1; j >= 0; --j) {
                if (++digits[j] < tf) break;
                digits[j] = 0;
            }
            if (k + 1 < end)
                for (int j = 0; j < n; ++j)
                    for (int i = 0; i < t; ++i) d.at(i, j) = perms[digits[j]][i];
        }
        std::lock_guard<std::mutex> lock(chunks_mutex);
        chunks.push_back(std::move(local));
    });

    SearchReport report =
        finalize(t, n, perms, chunks, total, oa_trace, std::nullopt, tol.eq_tol);
    if (const auto* m = std::get_if<MarkovScenario>(&s))
        report.upper_bound = upper_bound_u(*m, t, n, t, tol);
    return report;
}

SearchReport rank_by_trace_sampled(int t, int n, std::uint64_t count,
                                   std::uint64_t seed, bool include_fixtures,
                                   const Scenario& s, const Tolerance& tol) {
    const TraceEvaluator ev(s, t, n, t, tol);
    const auto perms = lexicographic_permutations(t);
    const std::optional<double> oa_trace = reference_oa_trace(t, n, ev);

    std::vector<Candidates> chunks(1, Candidates(tol.eq_tol));
    std::vector<Design> kept;
    std::uint64_t index = 0;
    sample_binary(t, n, count, seed, include_fixtures, [&](const Design& d) {
        chunks[0].add(index, ev.trace(d), oa_trace, tol.eq_tol);
        // designs that entered the candidate list are stored; their keys
        // are remapped to positions in `kept`
        if (!chunks[0].near_best.empty() && chunks[0].near_best.back().first == index) {
            chunks[0].near_best.back().first = kept.size();
            kept.push_back(d);
        }
        ++index;
    });
    SearchReport report = finalize(t, n, perms, chunks, index, oa_trace,
                                   std::optional<std::vector<Design>>(std::move(kept)),
                                   tol.eq_tol);
    report.sampled = true;
    report.seed = seed;
    report.sample_count = count;
    if (const auto* m = std::get_if<MarkovScenario>(&s))
        report.upper_bound = upper_bound_u(*m, t, n, t, tol);
    return report;
}

std::string search_report_json(const SearchReport& report) {
    json j;
    j["evaluated"] = report.evaluated;
    j["best_trace"] = report.best_trace;
    j["max_trace"] = report.max_trace;
    j["ties"] = report.ties;
    if (report.oa_trace) {
        j["oa_trace"] = *report.oa_trace;
        j["oa_rank"] = report.oa_rank;
    } else {
        j["oa_trace"] = nullptr;
        j["oa_rank"] = nullptr;
    }
    if (report.upper_bound)
        j["upper_bound"] = *report.upper_bound;
    else
        j["upper_bound"] = nullptr;
    j["sampled"] = report.sampled;
    if (report.sampled) {
        j["seed"] = report.seed;
        j["sample_count"] = report.sample_count;
    }
    json best = json::array();
    for (const SearchHit& hit : report.best) {
        json h;
        h["trace"] = hit.trace;
        h["design"] = format_design(hit.design);
        best.push_back(std::move(h));
    }
    j["best"] = std::move(best);
    return j.dump(2) + "\n";
}

} // namespace xover

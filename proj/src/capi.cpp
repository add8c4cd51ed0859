#include "crossover/crossover.h"

#include <cstring>
#include <new>
#include <string>

#include <nlohmann/json.hpp>

#include "efficiency.hpp"
#include "evaluator.hpp"
#include "formats.hpp"
#include "search.hpp"

using json = nlohmann::ordered_json;

struct xo_design {
    xover::Design impl;
};

struct xo_scenario {
    xover::Scenario impl;
};

namespace {

thread_local std::string g_last_error;

xo_status status_from(xover::ErrorCode code) {
    using xover::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidInput: return XO_ERR_INVALID;
        case ErrorCode::Parse: return XO_ERR_PARSE;
        case ErrorCode::NotPositiveDefinite: return XO_ERR_NOT_PD;
        case ErrorCode::Unsupported: return XO_ERR_UNSUPPORTED;
        case ErrorCode::Capacity: return XO_ERR_CAPACITY;
        case ErrorCode::Io: return XO_ERR_IO;
        case ErrorCode::Internal: return XO_ERR_INTERNAL;
    }
    return XO_ERR_INTERNAL;
}

template <typename Fn>
xo_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return XO_OK;
    } catch (const xover::Error& e) {
        g_last_error = e.what();
        return status_from(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return XO_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return XO_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return XO_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require(bool cond, const char* what) {
    if (!cond) xover::fail(xover::ErrorCode::InvalidInput, what);
}

json flags_json(const xover::DesignClassFlags& f) {
    json j;
    j["binary"] = f.binary;
    j["uniform_on_periods"] = f.uniform_on_periods;
    j["uniform_on_subjects"] = f.uniform_on_subjects;
    j["uniform"] = f.uniform;
    j["balanced_uniform"] = f.balanced_uniform;
    if (f.oa_lambda)
        j["oa_lambda"] = *f.oa_lambda;
    else
        j["oa_lambda"] = nullptr;
    return j;
}

} // namespace

extern "C" {

const char* xo_last_error(void) { return g_last_error.c_str(); }

const char* xo_version(void) { return "1.0.0"; }

void xo_string_free(char* s) { delete[] s; }

xo_status xo_design_parse(const char* text, xo_design** out) {
    return guarded([&] {
        require(text && out, "null argument");
        *out = new xo_design{xover::parse_design(text)};
    });
}

xo_status xo_design_load(const char* path, xo_design** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new xo_design{xover::parse_design(xover::read_file(path))};
    });
}

xo_status xo_design_from_labels(int t, int n, int p, const int* labels,
                                xo_design** out) {
    return guarded([&] {
        require(labels && out, "null argument");
        require(t >= 1 && n >= 1 && p >= 1, "t, n, p must be >= 1");
        xover::Design d;
        d.t = t;
        d.n = n;
        d.p = p;
        d.cells.resize(static_cast<std::size_t>(p) * n);
        for (std::size_t k = 0; k < d.cells.size(); ++k) d.cells[k] = labels[k] - 1;
        xover::validate(d);
        *out = new xo_design{std::move(d)};
    });
}

xo_status xo_design_format(const xo_design* d, char** text_out) {
    return guarded([&] {
        require(d && text_out, "null argument");
        *text_out = dup_string(xover::format_design(d->impl));
    });
}

void xo_design_free(xo_design* d) { delete d; }

void xo_design_dims(const xo_design* d, int* t, int* n, int* p) {
    if (!d) return;
    if (t) *t = d->impl.t;
    if (n) *n = d->impl.n;
    if (p) *p = d->impl.p;
}

xo_status xo_design_uniform(int t, int reps, xo_design** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = new xo_design{xover::make_uniform(t, reps)};
    });
}

xo_status xo_design_balanced_uniform(int t, int reps, xo_design** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = new xo_design{xover::make_balanced_uniform(t, reps)};
    });
}

xo_status xo_design_oa(int t, int lambda, xo_design** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = new xo_design{xover::make_oa(t, lambda)};
    });
}

xo_status xo_design_gene_study(xo_design** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = new xo_design{xover::gene_study_design()};
    });
}

xo_status xo_design_classify(const xo_design* d, xo_design_flags* out) {
    return guarded([&] {
        require(d && out, "null argument");
        const xover::DesignClassFlags f = xover::classify(d->impl);
        out->binary = f.binary;
        out->uniform_on_periods = f.uniform_on_periods;
        out->uniform_on_subjects = f.uniform_on_subjects;
        out->uniform = f.uniform;
        out->balanced_uniform = f.balanced_uniform;
        out->oa_lambda = f.oa_lambda.value_or(0);
    });
}

xo_status xo_scenario_parse(const char* json_text, xo_scenario** out) {
    return guarded([&] {
        require(json_text && out, "null argument");
        *out = new xo_scenario{xover::parse_scenario_json(json_text)};
    });
}

xo_status xo_scenario_load(const char* path, xo_scenario** out) {
    return guarded([&] {
        require(path && out, "null argument");
        *out = new xo_scenario{xover::parse_scenario_json(xover::read_file(path))};
    });
}

xo_status xo_scenario_markov_case(int case_no, double r, double rho, double sigma11,
                                  double sigma22, xo_scenario** out) {
    return guarded([&] {
        require(out, "null argument");
        *out = new xo_scenario{
            xover::markov_case(case_no, r, rho, sigma11, sigma22)};
    });
}

xo_status xo_scenario_proportional(const char* family, double r, const double* gamma,
                                   int g, xo_scenario** out) {
    return guarded([&] {
        require(family && gamma && out, "null argument");
        require(g >= 1, "g must be >= 1");
        xover::ProportionalScenario s;
        s.g = g;
        s.gamma = xover::Matrix(g, g);
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) s.gamma(i, j) = gamma[i * g + j];
        s.kernel = xover::Kernel{xover::kernel_family_from_name(family), r, 1.0, {}};
        s.validate();
        *out = new xo_scenario{std::move(s)};
    });
}

xo_status xo_scenario_format(const xo_scenario* s, char** json_out) {
    return guarded([&] {
        require(s && json_out, "null argument");
        *json_out = dup_string(xover::scenario_to_json(s->impl));
    });
}

void xo_scenario_free(xo_scenario* s) { delete s; }

xo_status xo_eval(const xo_design* d, const xo_scenario* s, double eq_tol,
                  char** json_out) {
    return guarded([&] {
        require(d && s && json_out, "null argument");
        xover::Tolerance tol;
        if (eq_tol > 0.0) tol.eq_tol = eq_tol;
        tol.validate();
        const xover::Design& design = d->impl;
        const xover::DesignClassFlags flags = xover::classify(design);
        json j;
        j["t"] = design.t;
        j["n"] = design.n;
        j["p"] = design.p;
        j["flags"] = flags_json(flags);
        if (const auto* prop = std::get_if<xover::ProportionalScenario>(&s->impl)) {
            const xover::InfoMatrix info =
                xover::info_proportional(design, *prop, xover::InfoMethod::Closed, tol);
            j["structure"] = "proportional";
            j["trace"] = info.matrix.trace();
            j["upper_bound"] = nullptr;
            j["rd"] = nullptr;
            j["attains_bound"] = nullptr;
            j["completely_symmetric"] =
                xover::is_completely_symmetric(info.matrix, tol);
        } else {
            const auto& m = std::get<xover::MarkovScenario>(s->impl);
            const xover::InfoMatrix info = xover::info_markov(
                design, m, xover::InfoMethod::Closed, xover::CarryBasis::Centered, tol);
            j["structure"] = "markov";
            j["trace"] = info.matrix.trace();
            if (design.p == design.t && design.t >= 3 && flags.binary) {
                const double u = xover::upper_bound_u(m, design.t, design.n, design.p, tol);
                j["upper_bound"] = u;
                j["rd"] = 1.0 - info.matrix.trace() / u;
            } else {
                j["upper_bound"] = nullptr;
                j["rd"] = nullptr;
            }
            j["attains_bound"] = xover::attains_bound(m, design.p, tol);
            j["completely_symmetric"] =
                xover::is_completely_symmetric(info.matrix, tol);
        }
        *json_out = dup_string(j.dump(2) + "\n");
    });
}

xo_status xo_compare(const xo_design* const* designs, const char* const* names,
                     int count, const xo_scenario* s, double eq_tol,
                     char** json_out) {
    return guarded([&] {
        require(designs && names && s && json_out, "null argument");
        require(count >= 1, "compare: need at least one design");
        xover::Tolerance tol;
        if (eq_tol > 0.0) tol.eq_tol = eq_tol;
        tol.validate();
        json items = json::array();
        double best = -1.0;
        int best_idx = 0;
        std::vector<double> traces(count);
        for (int i = 0; i < count; ++i) {
            require(designs[i] && names[i], "null design/name");
            const xover::Design& design = designs[i]->impl;
            const xover::TraceEvaluator ev(s->impl, design.t, design.n, design.p, tol);
            traces[i] = ev.trace(design);
            if (traces[i] > best) {
                best = traces[i];
                best_idx = i;
            }
        }
        for (int i = 0; i < count; ++i) {
            const xover::Design& design = designs[i]->impl;
            json item;
            item["name"] = names[i];
            item["t"] = design.t;
            item["n"] = design.n;
            item["p"] = design.p;
            item["trace"] = traces[i];
            item["efficiency_vs_best"] = traces[i] / best;
            if (const auto* m = std::get_if<xover::MarkovScenario>(&s->impl)) {
                const xover::DesignClassFlags flags = xover::classify(design);
                if (design.p == design.t && design.t >= 3 && flags.binary)
                    item["rd"] = xover::relative_difference(design, *m, tol);
                else
                    item["rd"] = nullptr;
            }
            items.push_back(std::move(item));
        }
        json j;
        j["structure"] = std::holds_alternative<xover::MarkovScenario>(s->impl)
                             ? "markov"
                             : "proportional";
        j["best"] = names[best_idx];
        j["designs"] = std::move(items);
        *json_out = dup_string(j.dump(2) + "\n");
    });
}

namespace {

std::vector<xover::NamedDesign> collect_designs(const xo_design* const* designs,
                                                const char* const* names,
                                                int ndesigns) {
    require(designs && names && ndesigns >= 1, "sweep: need at least one design");
    std::vector<xover::NamedDesign> out;
    for (int i = 0; i < ndesigns; ++i) {
        require(designs[i] && names[i], "null design/name");
        out.push_back({names[i], designs[i]->impl});
    }
    return out;
}

std::vector<double> collect_grid(const double* grid, int count,
                                 std::vector<double> fallback) {
    if (!grid || count <= 0) return fallback;
    return std::vector<double>(grid, grid + count);
}

xover::Tolerance tolerance_with(double eq_tol) {
    xover::Tolerance tol;
    if (eq_tol > 0.0) tol.eq_tol = eq_tol;
    tol.validate();
    return tol;
}

} // namespace

xo_status xo_sweep_markov(const xo_design* const* designs, const char* const* names,
                          int ndesigns, const int* cases, int ncases,
                          const double* r_grid, int nr, const double* rho_grid,
                          int nrho, double sigma11, double sigma22, double eq_tol,
                          char** csv_out, char** agg_csv_out) {
    return guarded([&] {
        require(csv_out && agg_csv_out, "null argument");
        require(cases && ncases >= 1, "sweep: need at least one case");
        const auto nds = collect_designs(designs, names, ndesigns);
        const xover::SweepResult result = xover::sweep_markov(
            nds, std::vector<int>(cases, cases + ncases),
            collect_grid(r_grid, nr, xover::default_r_grid()),
            collect_grid(rho_grid, nrho, xover::default_rho_grid()), sigma11, sigma22,
            tolerance_with(eq_tol));
        *csv_out = dup_string(xover::sweep_csv(result));
        *agg_csv_out = dup_string(xover::sweep_agg_csv(result));
    });
}

xo_status xo_sweep_proportional(const xo_design* const* designs,
                                const char* const* names, int ndesigns,
                                const char* const* families, int nfamilies,
                                const double* r_grid, int nr, const double* rho_grid,
                                int nrho, double eq_tol, char** csv_out,
                                char** agg_csv_out) {
    return guarded([&] {
        require(csv_out && agg_csv_out, "null argument");
        require(families && nfamilies >= 1, "sweep: need at least one kernel family");
        const auto nds = collect_designs(designs, names, ndesigns);
        std::vector<xover::KernelFamily> fams;
        for (int i = 0; i < nfamilies; ++i) {
            require(families[i], "null family name");
            fams.push_back(xover::kernel_family_from_name(families[i]));
        }
        const xover::SweepResult result = xover::sweep_proportional(
            nds, fams, collect_grid(r_grid, nr, xover::default_r_grid()),
            collect_grid(rho_grid, nrho, {0.5}), tolerance_with(eq_tol));
        *csv_out = dup_string(xover::sweep_csv(result));
        *agg_csv_out = dup_string(xover::sweep_agg_csv(result));
    });
}

xo_status xo_search_exhaustive(int t, int n, const xo_scenario* s, uint64_t cap,
                               double eq_tol, char** json_out) {
    return guarded([&] {
        require(s && json_out, "null argument");
        const xover::SearchReport report = xover::rank_by_trace_exhaustive(
            t, n, s->impl, cap == 0 ? xover::kDefaultEnumerationCap : cap,
            tolerance_with(eq_tol));
        *json_out = dup_string(xover::search_report_json(report));
    });
}

xo_status xo_search_sampled(int t, int n, uint64_t count, uint64_t seed,
                            int include_fixtures, const xo_scenario* s,
                            double eq_tol, char** json_out) {
    return guarded([&] {
        require(s && json_out, "null argument");
        const xover::SearchReport report = xover::rank_by_trace_sampled(
            t, n, count, seed, include_fixtures != 0, s->impl,
            tolerance_with(eq_tol));
        *json_out = dup_string(xover::search_report_json(report));
    });
}

} // extern "C"

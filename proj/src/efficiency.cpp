#include "efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "evaluator.hpp"
#include "formats.hpp"
#include "parallel.hpp"

namespace xover {

TraceComponents trace_components(const MarkovScenario& s, int n, int p,
                                 const Tolerance& tol) {
    if (n < 1) fail(ErrorCode::InvalidInput, "trace_components: n must be >= 1");
    const OmegaMatrices om = omega_matrices(s, p, tol);
    const Matrix psi = shift_matrix(p);
    const Matrix hp = centering(p);
    TraceComponents c;
    c.c22_11 = (hp * psi.transpose() * om.omega1 * psi).trace();
    c.c22_22 = (hp * psi.transpose() * om.omega4 * psi).trace();
    c.c11 = n * (om.omega1.trace() + om.omega4.trace());
    c.c12 = n * ((om.omega1 * psi).trace() + (om.omega4 * psi).trace());
    c.c22 = n * (c.c22_11 + c.c22_22);
    return c;
}

double upper_bound_u(const MarkovScenario& s, int t, int n, int p,
                     const Tolerance& tol) {
    if (p != t || t < 3)
        fail(ErrorCode::InvalidInput, "upper_bound_u: requires p = t >= 3");
    const TraceComponents c = trace_components(s, n, p, tol);
    return c.c11 - c.c12 * c.c12 / c.c22;
}

double relative_difference(const Design& d, const MarkovScenario& s,
                           const Tolerance& tol) {
    const DesignClassFlags flags = classify(d);
    if (d.p != d.t || !flags.binary)
        fail(ErrorCode::InvalidInput,
             "relative_difference: design must be binary with p = t");
    const double u = upper_bound_u(s, d.t, d.n, d.p, tol);
    const TraceEvaluator ev(Scenario{s}, d.t, d.n, d.p, tol);
    return 1.0 - ev.trace(d) / u;
}

bool attains_bound(const MarkovScenario& s, int p, const Tolerance& tol) {
    s.validate();
    const Matrix v1s = vstar(s.v1(p), tol);
    const Matrix vrs = vstar(s.vr(p), tol);
    const Matrix psi = shift_matrix(p);
    const Matrix hp = centering(p);
    const double lhs = (v1s * psi).trace() * (hp * psi.transpose() * vrs * psi).trace();
    const double rhs = (vrs * psi).trace() * (hp * psi.transpose() * v1s * psi).trace();
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    return std::abs(lhs - rhs) <= tol.eq_tol * scale;
}

double efficiency_proportional(const Design& d, const Design& dstar,
                               const ProportionalScenario& s, const Tolerance& tol) {
    if (d.t != dstar.t || d.n != dstar.n || d.p != dstar.p)
        fail(ErrorCode::InvalidInput,
             "efficiency_proportional: designs must share (t, n, p)");
    const Matrix v = s.v(d.p);
    return info_univariate(d, v, tol).trace() / info_univariate(dstar, v, tol).trace();
}

std::vector<double> default_r_grid() {
    std::vector<double> g;
    for (int k = 1; k <= 19; ++k) g.push_back(0.05 * k);
    return g;
}

std::vector<double> default_rho_grid() {
    std::vector<double> mags{0.01};
    for (int k = 1; k <= 19; ++k) mags.push_back(0.05 * k);
    mags.push_back(0.99);
    std::vector<double> out;
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) out.push_back(-*it);
    out.insert(out.end(), mags.begin(), mags.end());
    return out;
}

std::vector<double> gene_r_grid() {
    // The gene-study comparison needs correlations close to 1; the
    // reported extrema sit at r = 0.99.
    std::vector<double> g = default_r_grid();
    g.push_back(0.99);
    return g;
}

namespace {

struct CellSpec {
    const NamedDesign* design;
    std::string structure;
    std::string case_label;
    // builds the scenario for this cell
    std::function<Scenario(double r, double rho)> make_scenario;
    // optional reference trace for the rd column (proportional sweeps)
    std::function<std::optional<double>(double r, double rho, double trace)> bound;
};

SweepResult run_sweep(const std::vector<CellSpec>& specs,
                      const std::vector<double>& r_grid,
                      const std::vector<double>& rho_grid, double sigma11,
                      double sigma22, bool markov, const Tolerance& tol) {
    for (double r : r_grid)
        if (!(r > 0.0 && r < 1.0))
            fail(ErrorCode::InvalidInput, "sweep: r grid must lie in (0, 1)");
    SweepResult result;
    const std::size_t nr = r_grid.size(), nrho = rho_grid.size();
    result.rows.resize(specs.size() * nr * nrho);
    parallel_chunks(result.rows.size(), [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t idx = begin; idx < end; ++idx) {
            const std::size_t spec_i = idx / (nr * nrho);
            const std::size_t ri = (idx / nrho) % nr;
            const std::size_t rhoi = idx % nrho;
            const CellSpec& spec = specs[spec_i];
            const Design& d = spec.design->design;
            SweepRow row;
            row.structure = spec.structure;
            row.case_label = spec.case_label;
            row.design = spec.design->name;
            row.t = d.t;
            row.n = d.n;
            row.p = d.p;
            row.r = r_grid[ri];
            row.rho = rho_grid[rhoi];
            row.sigma11 = sigma11;
            row.sigma22 = sigma22;
            try {
                const Scenario sc = spec.make_scenario(row.r, row.rho);
                if (markov) {
                    const auto& ms = std::get<MarkovScenario>(sc);
                    const DesignClassFlags flags = classify(d);
                    if (d.p != d.t || !flags.binary) {
                        row.error = "ERR:class";
                    } else {
                        const TraceEvaluator ev(sc, d.t, d.n, d.p, tol);
                        row.trace = ev.trace(d);
                        row.upper_bound = upper_bound_u(ms, d.t, d.n, d.p, tol);
                        row.rd = 1.0 - *row.trace / *row.upper_bound;
                    }
                } else {
                    const TraceEvaluator ev(sc, d.t, d.n, d.p, tol);
                    row.trace = ev.trace(d);
                    row.upper_bound = spec.bound(row.r, row.rho, *row.trace);
                    if (row.upper_bound)
                        row.rd = 1.0 - *row.trace / *row.upper_bound;
                }
            } catch (const Error& e) {
                row.trace.reset();
                row.upper_bound.reset();
                row.rd.reset();
                row.error = std::string("ERR:") + error_code_tag(e.code());
            }
            result.rows[idx] = std::move(row);
        }
    });

    // per-(design, case, r) extrema over rho
    for (std::size_t spec_i = 0; spec_i < specs.size(); ++spec_i)
        for (std::size_t ri = 0; ri < nr; ++ri) {
            double lo = 0.0, hi = 0.0;
            bool any = false;
            for (std::size_t rhoi = 0; rhoi < nrho; ++rhoi) {
                const SweepRow& row = result.rows[(spec_i * nr + ri) * nrho + rhoi];
                if (!row.rd) continue;
                if (!any) {
                    lo = hi = *row.rd;
                    any = true;
                } else {
                    lo = std::min(lo, *row.rd);
                    hi = std::max(hi, *row.rd);
                }
            }
            if (any)
                result.aggregates.push_back({specs[spec_i].design->name,
                                             specs[spec_i].case_label, r_grid[ri], lo,
                                             hi});
        }
    return result;
}

} // namespace

SweepResult sweep_markov(const std::vector<NamedDesign>& designs,
                         const std::vector<int>& cases,
                         const std::vector<double>& r_grid,
                         const std::vector<double>& rho_grid, double sigma11,
                         double sigma22, const Tolerance& tol) {
    if (designs.empty()) fail(ErrorCode::InvalidInput, "sweep: no designs given");
    if (cases.empty()) fail(ErrorCode::InvalidInput, "sweep: no cases given");
    for (double rho : rho_grid)
        if (!(std::abs(rho) > 0.0 && std::abs(rho) < 1.0))
            fail(ErrorCode::InvalidInput, "sweep: rho grid must satisfy 0 < |rho| < 1");
    std::vector<CellSpec> specs;
    for (const NamedDesign& nd : designs)
        for (int c : cases) {
            CellSpec spec;
            spec.design = &nd;
            spec.structure = "markov";
            spec.case_label = markov_case_label(c);
            spec.make_scenario = [c, sigma11, sigma22](double r, double rho) {
                return Scenario{markov_case(c, r, rho, sigma11, sigma22)};
            };
            specs.push_back(std::move(spec));
        }
    return run_sweep(specs, r_grid, rho_grid, sigma11, sigma22, true, tol);
}

SweepResult sweep_proportional(const std::vector<NamedDesign>& designs,
                               const std::vector<KernelFamily>& families,
                               const std::vector<double>& r_grid,
                               const std::vector<double>& rho_grid,
                               const Tolerance& tol) {
    if (designs.empty()) fail(ErrorCode::InvalidInput, "sweep: no designs given");
    if (families.empty()) fail(ErrorCode::InvalidInput, "sweep: no kernel families given");
    for (double rho : rho_grid)
        if (!(std::abs(rho) < 1.0))
            fail(ErrorCode::InvalidInput, "sweep: gamma off-diagonal must satisfy |rho| < 1");
    std::vector<CellSpec> specs;
    for (const NamedDesign& nd : designs)
        for (KernelFamily fam : families) {
            CellSpec spec;
            spec.design = &nd;
            spec.structure = "proportional";
            spec.case_label = kernel_family_name(fam);
            const int t = nd.design.t, n = nd.design.n, p = nd.design.p;
            spec.make_scenario = [fam](double r, double rho) {
                ProportionalScenario s;
                s.g = 2;
                s.gamma = Matrix(2, 2);
                s.gamma << 1.0, rho, rho, 1.0;
                s.kernel = Kernel{fam, r, 1.0, {}};
                return Scenario{s};
            };
            // reference: trace of the same-size OA when one exists
            spec.bound = [fam, t, n, p, tol](double r, double rho,
                                             double) -> std::optional<double> {
                if (p != t || (t != 3 && t != 4)) return std::nullopt;
                const int base = t * (t - 1);
                if (n % base != 0) return std::nullopt;
                ProportionalScenario s;
                s.g = 2;
                s.gamma = Matrix(2, 2);
                s.gamma << 1.0, rho, rho, 1.0;
                s.kernel = Kernel{fam, r, 1.0, {}};
                const Design oa = make_oa(t, n / base);
                const TraceEvaluator ev(Scenario{s}, t, n, p, tol);
                return ev.trace(oa);
            };
            specs.push_back(std::move(spec));
        }
    return run_sweep(specs, r_grid, rho_grid, 1.0, 1.0, false, tol);
}

std::string sweep_csv(const SweepResult& result) {
    std::string out =
        "structure,case,design,t,n,p,r,rho,sigma11,sigma22,trace,upper_bound,rd\n";
    for (const SweepRow& row : result.rows) {
        out += row.structure;
        out += ',';
        out += row.case_label;
        out += ',';
        out += row.design;
        out += ',';
        out += std::to_string(row.t) + ',' + std::to_string(row.n) + ',' +
               std::to_string(row.p) + ',';
        out += fmt12(row.r);
        out += ',';
        out += fmt12(row.rho);
        out += ',';
        out += fmt12(row.sigma11);
        out += ',';
        out += fmt12(row.sigma22);
        out += ',';
        if (!row.error.empty())
            out += row.error;
        else if (row.trace)
            out += fmt12(*row.trace);
        out += ',';
        if (row.upper_bound) out += fmt12(*row.upper_bound);
        out += ',';
        if (row.rd) out += fmt12(*row.rd);
        out += '\n';
    }
    return out;
}

std::string sweep_agg_csv(const SweepResult& result) {
    std::string out = "design,case,r,min_rd,max_rd\n";
    for (const SweepAggRow& row : result.aggregates) {
        out += row.design;
        out += ',';
        out += row.case_label;
        out += ',';
        out += fmt12(row.r);
        out += ',';
        out += fmt12(row.min_rd);
        out += ',';
        out += fmt12(row.max_rd);
        out += '\n';
    }
    return out;
}

} // namespace xover

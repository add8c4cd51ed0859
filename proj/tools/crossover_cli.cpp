// Command-line front end for the crossover-design library. Talks to the
// shared library exclusively through the C API in crossover/crossover.h.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "crossover/crossover.h"

namespace {

// 0 success, 2 input error, 3 numerical error, 4 capacity error.
int exit_code(xo_status st) {
    switch (st) {
        case XO_OK: return 0;
        case XO_ERR_INVALID:
        case XO_ERR_PARSE:
        case XO_ERR_UNSUPPORTED:
        case XO_ERR_IO: return 2;
        case XO_ERR_NOT_PD: return 3;
        case XO_ERR_CAPACITY: return 4;
        case XO_ERR_INTERNAL: break;
    }
    return 1;
}

[[noreturn]] void die(xo_status st, const std::string& context) {
    std::cerr << "crossover: " << context << ": " << xo_last_error() << "\n";
    std::exit(exit_code(st));
}

struct StringOut {
    char* ptr = nullptr;
    ~StringOut() { xo_string_free(ptr); }
    std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct DesignHandle {
    xo_design* ptr = nullptr;
    DesignHandle() = default;
    explicit DesignHandle(xo_design* p) : ptr(p) {}
    DesignHandle(DesignHandle&& o) noexcept : ptr(o.ptr) { o.ptr = nullptr; }
    DesignHandle& operator=(DesignHandle&& o) noexcept {
        std::swap(ptr, o.ptr);
        return *this;
    }
    DesignHandle(const DesignHandle&) = delete;
    ~DesignHandle() { xo_design_free(ptr); }
};

struct ScenarioHandle {
    xo_scenario* ptr = nullptr;
    ~ScenarioHandle() { xo_scenario_free(ptr); }
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << content)) {
        std::cerr << "crossover: cannot write '" << path << "'\n";
        std::exit(2);
    }
}

std::string basename_no_ext(const std::string& path) {
    const auto slash = path.find_last_of("/\\");
    std::string base = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const auto dot = base.find_last_of('.');
    if (dot != std::string::npos && dot > 0) base.erase(dot);
    return base;
}

std::vector<double> parse_grid_or_die(const std::string& spec, const char* what) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    auto num = [&](const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            std::cerr << "crossover: bad " << what << " grid '" << spec << "'\n";
            std::exit(2);
        }
    };
    if (parts.size() == 1) return {num(parts[0])};
    if (parts.size() != 3) {
        std::cerr << "crossover: " << what << " grid must be 'a:b:step'\n";
        std::exit(2);
    }
    const double a = num(parts[0]), b = num(parts[1]), step = num(parts[2]);
    if (!(step > 0.0) || b < a) {
        std::cerr << "crossover: " << what << " grid needs step > 0 and b >= a\n";
        std::exit(2);
    }
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        const double v = a + k * step;
        if (v > b + 1e-12) break;
        grid.push_back(v);
        if (grid.size() > 100000) {
            std::cerr << "crossover: " << what << " grid too dense\n";
            std::exit(4);
        }
    }
    return grid;
}

std::vector<double> symmetric_rho_grid() {
    std::vector<double> mags{0.01};
    for (int k = 1; k <= 19; ++k) mags.push_back(0.05 * k);
    mags.push_back(0.99);
    std::vector<double> grid;
    for (auto it = mags.rbegin(); it != mags.rend(); ++it) grid.push_back(-*it);
    grid.insert(grid.end(), mags.begin(), mags.end());
    return grid;
}

std::vector<double> standard_r_grid(bool include_gene_tail) {
    std::vector<double> grid;
    for (int k = 1; k <= 19; ++k) grid.push_back(0.05 * k);
    if (include_gene_tail) grid.push_back(0.99);
    return grid;
}

DesignHandle load_design(const std::string& path) {
    xo_design* d = nullptr;
    const xo_status st = xo_design_load(path.c_str(), &d);
    if (st != XO_OK) die(st, "design '" + path + "'");
    return DesignHandle(d);
}

struct FixtureSet {
    std::vector<std::pair<std::string, DesignHandle>> designs;
    std::vector<int> cases;
    bool gene_tail = false;
};

template <typename MakeFn>
DesignHandle make_or_die(MakeFn&& make, const char* what) {
    xo_design* d = nullptr;
    const xo_status st = make(&d);
    if (st != XO_OK) die(st, what);
    return DesignHandle(d);
}

FixtureSet fixture_sweep_set(const std::string& name) {
    FixtureSet set;
    if (name == "p3") {
        set.designs.emplace_back(
            "d1", make_or_die([](xo_design** d) { return xo_design_uniform(3, 2, d); }, "d1"));
        set.designs.emplace_back(
            "dstar", make_or_die([](xo_design** d) { return xo_design_oa(3, 1, d); }, "dstar"));
        set.cases = {1, 2, 3, 4, 5, 6, 7};
    } else if (name == "p4") {
        set.designs.emplace_back(
            "d1", make_or_die([](xo_design** d) { return xo_design_uniform(4, 3, d); }, "d1"));
        set.designs.emplace_back(
            "d2",
            make_or_die([](xo_design** d) { return xo_design_balanced_uniform(4, 3, d); },
                        "d2"));
        set.designs.emplace_back(
            "dstar", make_or_die([](xo_design** d) { return xo_design_oa(4, 1, d); }, "dstar"));
        set.cases = {1, 2, 3, 4, 5, 6, 7};
    } else if (name == "gene") {
        set.designs.emplace_back(
            "d0", make_or_die([](xo_design** d) { return xo_design_gene_study(d); }, "d0"));
        set.designs.emplace_back(
            "dstar", make_or_die([](xo_design** d) { return xo_design_oa(3, 3, d); }, "dstar"));
        set.cases = {5, 6, 7};
        set.gene_tail = true;
    } else {
        std::cerr << "crossover: unknown fixture set '" << name
                  << "' (expected p3, p4 or gene)\n";
        std::exit(2);
    }
    return set;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Crossover-design evaluation: information-matrix traces, "
                 "trace-optimality bounds and design searches for multivariate "
                 "crossover trials"};
    app.require_subcommand(1);

    std::vector<std::string> design_paths;
    std::string scenario_path;
    std::string out_path;
    std::string r_grid_spec, rho_grid_spec;
    std::vector<int> case_list;
    std::vector<std::string> family_list;
    std::string fixtures_name;
    double sigma11 = 1.0, sigma22 = 1.0;
    double tol = 0.0;
    std::uint64_t seed = 0, sample_count = 0, cap = 0;
    int search_t = 0, search_n = 0;
    bool include_fixtures = false;

    auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
        cmd->add_option("--design", design_paths, "design file (repeatable)");
        if (needs_scenario)
            cmd->add_option("--scenario", scenario_path, "scenario JSON file");
        cmd->add_option("--out", out_path, "output path (default: stdout)");
        cmd->add_option("--tol", tol, "equality tolerance override (relative)");
    };

    CLI::App* cmd_eval = app.add_subcommand("eval", "evaluate one design under a scenario");
    add_common(cmd_eval, true);

    CLI::App* cmd_compare =
        app.add_subcommand("compare", "rank several designs under one scenario");
    add_common(cmd_compare, true);

    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "tabulate traces / bounds / RD over (r, rho) grids");
    add_common(cmd_sweep, false);
    cmd_sweep->add_option("--case", case_list, "markov case 1..7 (repeatable)");
    cmd_sweep->add_option("--family", family_list,
                          "proportional kernel family (repeatable)");
    cmd_sweep->add_option("--fixtures", fixtures_name,
                          "preset design/case set: p3, p4 or gene");
    cmd_sweep->add_option("--r-grid", r_grid_spec, "r grid a:b:step");
    cmd_sweep->add_option("--rho-grid", rho_grid_spec, "rho grid a:b:step");
    cmd_sweep->add_option("--sigma11", sigma11, "variance of response 1");
    cmd_sweep->add_option("--sigma22", sigma22, "variance of response 2");

    CLI::App* cmd_search =
        app.add_subcommand("search", "scan the binary design class by trace");
    add_common(cmd_search, true);
    cmd_search->add_option("--t", search_t, "treatment count")->required();
    cmd_search->add_option("--n", search_n, "subject count")->required();
    cmd_search->add_option("--sample", sample_count, "sample this many designs");
    cmd_search->add_option("--seed", seed, "sampling seed");
    cmd_search->add_option("--cap", cap, "enumeration cap (default 1e7)");
    cmd_search->add_flag("--include-fixtures", include_fixtures,
                         "inject d1/d2/d* fixtures into the sample");

    CLI::App* cmd_fixtures =
        app.add_subcommand("fixtures", "write the studied designs as files");
    cmd_fixtures->add_option("--fixtures", fixtures_name, "set: p3, p4, gene or all");
    cmd_fixtures->add_option("--out", out_path, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    ScenarioHandle scenario;
    if (!scenario_path.empty()) {
        const xo_status st = xo_scenario_load(scenario_path.c_str(), &scenario.ptr);
        if (st != XO_OK) die(st, "scenario '" + scenario_path + "'");
    }

    if (*cmd_eval) {
        if (design_paths.size() != 1 || !scenario.ptr) {
            std::cerr << "crossover: eval needs exactly one --design and a --scenario\n";
            return 2;
        }
        DesignHandle d = load_design(design_paths[0]);
        StringOut json;
        const xo_status st = xo_eval(d.ptr, scenario.ptr, tol, &json.ptr);
        if (st != XO_OK) die(st, "eval");
        write_output(out_path, json.str());
        return 0;
    }

    if (*cmd_compare) {
        if (design_paths.empty() || !scenario.ptr) {
            std::cerr << "crossover: compare needs --design (repeatable) and --scenario\n";
            return 2;
        }
        std::vector<DesignHandle> handles;
        std::vector<const xo_design*> raw;
        std::vector<std::string> names;
        for (const std::string& path : design_paths) {
            handles.push_back(load_design(path));
            raw.push_back(handles.back().ptr);
            names.push_back(basename_no_ext(path));
        }
        std::vector<const char*> cnames;
        for (const std::string& s : names) cnames.push_back(s.c_str());
        StringOut json;
        const xo_status st = xo_compare(raw.data(), cnames.data(),
                                        static_cast<int>(raw.size()), scenario.ptr,
                                        tol, &json.ptr);
        if (st != XO_OK) die(st, "compare");
        write_output(out_path, json.str());
        return 0;
    }

    if (*cmd_sweep) {
        std::vector<std::pair<std::string, DesignHandle>> designs;
        std::vector<int> cases = case_list;
        bool gene_tail = false;
        if (!fixtures_name.empty()) {
            FixtureSet set = fixture_sweep_set(fixtures_name);
            designs = std::move(set.designs);
            if (cases.empty() && family_list.empty()) cases = set.cases;
            gene_tail = set.gene_tail;
        }
        for (const std::string& path : design_paths)
            designs.emplace_back(basename_no_ext(path), load_design(path));
        if (designs.empty()) {
            std::cerr << "crossover: sweep needs --design or --fixtures\n";
            return 2;
        }
        if (cases.empty() && family_list.empty()) {
            std::cerr << "crossover: sweep needs --case, --family or --fixtures\n";
            return 2;
        }
        if (!cases.empty() && !family_list.empty()) {
            std::cerr << "crossover: --case (markov) and --family (proportional) are "
                         "mutually exclusive\n";
            return 2;
        }
        std::vector<const xo_design*> raw;
        std::vector<const char*> names;
        for (const auto& [name, handle] : designs) {
            names.push_back(name.c_str());
            raw.push_back(handle.ptr);
        }
        const std::vector<double> r_grid = r_grid_spec.empty()
                                               ? standard_r_grid(gene_tail)
                                               : parse_grid_or_die(r_grid_spec, "r");
        const std::vector<double> rho_grid =
            rho_grid_spec.empty() ? symmetric_rho_grid()
                                  : parse_grid_or_die(rho_grid_spec, "rho");
        StringOut csv, agg;
        xo_status st = XO_OK;
        if (!cases.empty()) {
            st = xo_sweep_markov(raw.data(), names.data(), static_cast<int>(raw.size()),
                                 cases.data(), static_cast<int>(cases.size()),
                                 r_grid.data(), static_cast<int>(r_grid.size()),
                                 rho_grid.data(), static_cast<int>(rho_grid.size()),
                                 sigma11, sigma22, tol, &csv.ptr, &agg.ptr);
        } else {
            std::vector<const char*> fams;
            for (const std::string& f : family_list) fams.push_back(f.c_str());
            st = xo_sweep_proportional(raw.data(), names.data(),
                                       static_cast<int>(raw.size()), fams.data(),
                                       static_cast<int>(fams.size()), r_grid.data(),
                                       static_cast<int>(r_grid.size()), rho_grid.data(),
                                       static_cast<int>(rho_grid.size()), tol, &csv.ptr,
                                       &agg.ptr);
        }
        if (st != XO_OK) die(st, "sweep");
        if (out_path.empty()) {
            std::cout << csv.str();
        } else {
            std::string agg_path = out_path;
            const std::string suffix = ".csv";
            if (agg_path.size() >= suffix.size() &&
                agg_path.compare(agg_path.size() - suffix.size(), suffix.size(),
                                 suffix) == 0)
                agg_path.erase(agg_path.size() - suffix.size());
            agg_path += "_agg.csv";
            write_output(out_path, csv.str());
            write_output(agg_path, agg.str());
        }
        return 0;
    }

    if (*cmd_search) {
        if (!scenario.ptr) {
            std::cerr << "crossover: search needs --scenario\n";
            return 2;
        }
        StringOut json;
        xo_status st = XO_OK;
        if (sample_count > 0)
            st = xo_search_sampled(search_t, search_n, sample_count, seed,
                                   include_fixtures ? 1 : 0, scenario.ptr, tol,
                                   &json.ptr);
        else
            st = xo_search_exhaustive(search_t, search_n, scenario.ptr, cap, tol,
                                      &json.ptr);
        if (st != XO_OK) die(st, "search");
        write_output(out_path, json.str());
        return 0;
    }

    if (*cmd_fixtures) {
        const std::string which = fixtures_name.empty() ? "all" : fixtures_name;
        std::vector<std::pair<std::string, DesignHandle>> entries;
        if (which == "p3" || which == "all") {
            entries.emplace_back("d1_p3.txt", make_or_die(
                [](xo_design** d) { return xo_design_uniform(3, 2, d); }, "d1_p3"));
            entries.emplace_back("dstar_p3.txt", make_or_die(
                [](xo_design** d) { return xo_design_oa(3, 1, d); }, "dstar_p3"));
        }
        if (which == "p4" || which == "all") {
            entries.emplace_back("d1_p4.txt", make_or_die(
                [](xo_design** d) { return xo_design_uniform(4, 3, d); }, "d1_p4"));
            entries.emplace_back("d2_p4.txt", make_or_die(
                [](xo_design** d) { return xo_design_balanced_uniform(4, 3, d); }, "d2_p4"));
            entries.emplace_back("dstar_p4.txt", make_or_die(
                [](xo_design** d) { return xo_design_oa(4, 1, d); }, "dstar_p4"));
        }
        if (which == "gene" || which == "all") {
            entries.emplace_back("d0_gene.txt", make_or_die(
                [](xo_design** d) { return xo_design_gene_study(d); }, "d0_gene"));
            entries.emplace_back("dstar_gene.txt", make_or_die(
                [](xo_design** d) { return xo_design_oa(3, 3, d); }, "dstar_gene"));
        }
        if (entries.empty()) {
            std::cerr << "crossover: unknown fixture set '" << which << "'\n";
            return 2;
        }
        for (const auto& [file, handle] : entries) {
            StringOut text;
            const xo_status st = xo_design_format(handle.ptr, &text.ptr);
            if (st != XO_OK) die(st, file);
            write_output(out_path + "/" + file, text.str());
            std::cout << out_path + "/" + file << "\n";
        }
        return 0;
    }

    return 2;
}

#include <doctest.h>

#include <algorithm>
#include <cstring>
#include <string>

#include "crossover/crossover.h"

namespace {

struct Str {
    char* p = nullptr;
    ~Str() { xo_string_free(p); }
    std::string s() const { return p ? p : ""; }
};

const char* kNs1Scenario =
    R"({"structure":"markov","kernelV1":{"family":"Mat05","r":0.5},
        "kernelVR":{"family":"Mat05","r":0.25},
        "sigma11":1.0,"sigma22":1.0,"rho":0.5})";

} // namespace

TEST_CASE("design handles: parse, dims, classify, format") {
    xo_design* d = nullptr;
    REQUIRE(xo_design_oa(3, 1, &d) == XO_OK);
    int t = 0, n = 0, p = 0;
    xo_design_dims(d, &t, &n, &p);
    CHECK(t == 3);
    CHECK(n == 6);
    CHECK(p == 3);

    xo_design_flags flags{};
    REQUIRE(xo_design_classify(d, &flags) == XO_OK);
    CHECK(flags.binary == 1);
    CHECK(flags.oa_lambda == 1);

    Str text;
    REQUIRE(xo_design_format(d, &text.p) == XO_OK);
    xo_design* back = nullptr;
    REQUIRE(xo_design_parse(text.p, &back) == XO_OK);
    Str text2;
    REQUIRE(xo_design_format(back, &text2.p) == XO_OK);
    CHECK(text.s() == text2.s());
    xo_design_free(back);
    xo_design_free(d);

    xo_design* bad = nullptr;
    CHECK(xo_design_parse("3 2 3\n1 2\nbroken\n", &bad) == XO_ERR_PARSE);
    CHECK(std::string(xo_last_error()).find("design") != std::string::npos);
}

TEST_CASE("scenario JSON type errors map to parse failures") {
    xo_scenario* s = nullptr;
    CHECK(xo_scenario_parse(R"({"structure":"markov","kernelV1":{"family":"Mat05","r":"x"},
        "kernelVR":{"family":"Mat05","r":0.25},"sigma11":1.0,"sigma22":1.0,"rho":0.5})",
                            &s) == XO_ERR_PARSE);
    CHECK(xo_scenario_parse(R"({"structure":42})", &s) == XO_ERR_PARSE);
}

TEST_CASE("labels constructor and errors") {
    const int labels[6] = {1, 2, 2, 1, 1, 2};
    xo_design* d = nullptr;
    REQUIRE(xo_design_from_labels(2, 2, 3, labels, &d) == XO_OK);
    xo_design_free(d);

    const int bad_labels[4] = {1, 2, 3, 1};
    CHECK(xo_design_from_labels(2, 2, 2, bad_labels, &d) == XO_ERR_INVALID);
    CHECK(xo_design_balanced_uniform(3, 1, &d) == XO_ERR_UNSUPPORTED);
}

TEST_CASE("scenario parse and eval") {
    xo_scenario* s = nullptr;
    REQUIRE(xo_scenario_parse(kNs1Scenario, &s) == XO_OK);

    xo_design* d = nullptr;
    REQUIRE(xo_design_oa(3, 1, &d) == XO_OK);

    Str json;
    REQUIRE(xo_eval(d, s, 0.0, &json.p) == XO_OK);
    const std::string out = json.s();
    CHECK(out.find("\"structure\": \"markov\"") != std::string::npos);
    CHECK(out.find("\"rd\": 0.000333504914") != std::string::npos);
    CHECK(out.find("\"attains_bound\": false") != std::string::npos);
    CHECK(out.find("\"completely_symmetric\": false") != std::string::npos);

    // same numbers via the case constructor
    xo_scenario* s7 = nullptr;
    REQUIRE(xo_scenario_markov_case(7, 0.5, 0.5, 1.0, 1.0, &s7) == XO_OK);
    Str json7;
    REQUIRE(xo_eval(d, s7, 0.0, &json7.p) == XO_OK);
    CHECK(json7.s() == out);

    xo_scenario_free(s7);
    xo_scenario_free(s);
    xo_design_free(d);
}

TEST_CASE("eval rejects a non-PD explicit kernel") {
    const char* bad =
        R"({"structure":"markov","kernelV1":{"explicit":[[1.0,2.0,0.0],[2.0,1.0,0.0],[0.0,0.0,1.0]]},
            "kernelVR":{"family":"Mat05","r":0.25},"sigma11":1.0,"sigma22":1.0,"rho":0.5})";
    xo_scenario* s = nullptr;
    REQUIRE(xo_scenario_parse(bad, &s) == XO_OK);
    xo_design* d = nullptr;
    REQUIRE(xo_design_oa(3, 1, &d) == XO_OK);
    Str json;
    CHECK(xo_eval(d, s, 0.0, &json.p) == XO_ERR_NOT_PD);
    CHECK(std::strlen(xo_last_error()) > 0);
    xo_design_free(d);
    xo_scenario_free(s);
}

TEST_CASE("proportional eval carries the complete-symmetry verdict") {
    const double gamma[4] = {1.0, 0.5, 0.5, 1.0};
    xo_scenario* s = nullptr;
    REQUIRE(xo_scenario_proportional("Mat05", 0.5, gamma, 2, &s) == XO_OK);
    xo_design* d = nullptr;
    REQUIRE(xo_design_oa(3, 1, &d) == XO_OK);
    Str json;
    REQUIRE(xo_eval(d, s, 0.0, &json.p) == XO_OK);
    CHECK(json.s().find("\"structure\": \"proportional\"") != std::string::npos);
    CHECK(json.s().find("\"completely_symmetric\": false") != std::string::npos);
    CHECK(json.s().find("\"upper_bound\": null") != std::string::npos);
    xo_design_free(d);
    xo_scenario_free(s);
}

TEST_CASE("compare ranks designs") {
    xo_design* d1 = nullptr;
    xo_design* ds = nullptr;
    REQUIRE(xo_design_uniform(3, 2, &d1) == XO_OK);
    REQUIRE(xo_design_oa(3, 1, &ds) == XO_OK);
    const xo_design* designs[2] = {d1, ds};
    const char* names[2] = {"d1", "dstar"};
    xo_scenario* s = nullptr;
    REQUIRE(xo_scenario_markov_case(7, 0.5, 0.5, 1.0, 1.0, &s) == XO_OK);
    Str json;
    REQUIRE(xo_compare(designs, names, 2, s, 0.0, &json.p) == XO_OK);
    CHECK(json.s().find("\"best\": \"dstar\"") != std::string::npos);
    xo_scenario_free(s);
    xo_design_free(d1);
    xo_design_free(ds);
}

TEST_CASE("sweep produces the CSV pair") {
    xo_design* d1 = nullptr;
    xo_design* ds = nullptr;
    REQUIRE(xo_design_uniform(3, 2, &d1) == XO_OK);
    REQUIRE(xo_design_oa(3, 1, &ds) == XO_OK);
    const xo_design* designs[2] = {d1, ds};
    const char* names[2] = {"d1", "dstar"};
    const int cases[2] = {7, 5};
    const double r_grid[2] = {0.3, 0.6};
    const double rho_grid[2] = {0.25, 0.5};
    Str csv, agg;
    REQUIRE(xo_sweep_markov(designs, names, 2, cases, 2, r_grid, 2, rho_grid, 2, 1.0,
                            1.0, 0.0, &csv.p, &agg.p) == XO_OK);
    const std::string csv_text = csv.s();
    CHECK(csv_text.rfind("structure,case,design,", 0) == 0);
    CHECK(agg.s().rfind("design,case,r,min_rd,max_rd", 0) == 0);
    // 2 designs x 2 cases x 2 r x 2 rho data rows
    CHECK(std::count(csv_text.begin(), csv_text.end(), '\n') == 1 + 16);

    Str pcsv, pagg;
    const char* fams[1] = {"Mat05"};
    REQUIRE(xo_sweep_proportional(designs, names, 2, fams, 1, r_grid, 2, rho_grid, 2,
                                  0.0, &pcsv.p, &pagg.p) == XO_OK);
    CHECK(pcsv.s().find("proportional,Mat05,d1,") != std::string::npos);

    xo_design_free(d1);
    xo_design_free(ds);
}

TEST_CASE("search through the C API") {
    xo_scenario* s = nullptr;
    REQUIRE(xo_scenario_markov_case(7, 0.5, 0.5, 1.0, 1.0, &s) == XO_OK);

    Str json;
    REQUIRE(xo_search_sampled(3, 6, 25, 42, 1, s, 0.0, &json.p) == XO_OK);
    CHECK(json.s().find("\"evaluated\": 25") != std::string::npos);

    Str fail;
    CHECK(xo_search_exhaustive(4, 12, s, 0, 0.0, &fail.p) == XO_ERR_CAPACITY);
    CHECK(std::string(xo_last_error()).find("cap") != std::string::npos);

    xo_scenario_free(s);
}

TEST_CASE("version string") {
    CHECK(std::strlen(xo_version()) > 0);
}

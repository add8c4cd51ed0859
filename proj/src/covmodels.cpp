#include "covmodels.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

namespace xover {

using json = nlohmann::ordered_json;

const char* kernel_family_name(KernelFamily f) {
    switch (f) {
        case KernelFamily::Mat05: return "Mat05";
        case KernelFamily::Mat15: return "Mat15";
        case KernelFamily::MatInf: return "MatInf";
        case KernelFamily::Explicit: return "explicit";
    }
    return "?";
}

KernelFamily kernel_family_from_name(const std::string& name) {
    if (name == "Mat05") return KernelFamily::Mat05;
    if (name == "Mat15") return KernelFamily::Mat15;
    if (name == "MatInf") return KernelFamily::MatInf;
    fail(ErrorCode::Parse, "unknown kernel family '" + name +
                               "' (expected Mat05, Mat15 or MatInf)");
}

void Kernel::validate() const {
    if (!(scale > 0.0))
        fail(ErrorCode::InvalidInput, "kernel: scale must be > 0");
    if (family == KernelFamily::Explicit) {
        if (explicit_matrix.rows() == 0 || explicit_matrix.rows() != explicit_matrix.cols())
            fail(ErrorCode::InvalidInput, "kernel: explicit matrix must be square");
        if (!all_finite(explicit_matrix))
            fail(ErrorCode::InvalidInput, "kernel: explicit matrix has non-finite entries");
        return;
    }
    if (!(r > 0.0 && r < 1.0))
        fail(ErrorCode::InvalidInput, "kernel: r must lie strictly in (0, 1)");
}

Matrix build_kernel_matrix(const Kernel& k, int p) {
    k.validate();
    if (p < 1)
        fail(ErrorCode::InvalidInput, "build_kernel_matrix: p must be >= 1");
    if (k.family == KernelFamily::Explicit) {
        if (k.explicit_matrix.rows() != p)
            fail(ErrorCode::InvalidInput,
                 "build_kernel_matrix: explicit matrix dimension " +
                     std::to_string(k.explicit_matrix.rows()) + " does not match p=" +
                     std::to_string(p));
        return k.scale * k.explicit_matrix;
    }
    Matrix v(p, p);
    const double lr = std::log(k.r);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double lag = std::abs(i - j);
            double corr = 0.0;
            switch (k.family) {
                case KernelFamily::Mat05: corr = std::pow(k.r, lag); break;
                case KernelFamily::Mat15: corr = (1.0 - lag * lr) * std::pow(k.r, lag); break;
                case KernelFamily::MatInf: corr = std::pow(k.r, lag * lag); break;
                case KernelFamily::Explicit: break; // handled above
            }
            v(i, j) = k.scale * corr;
        }
    return v;
}

void ProportionalScenario::validate() const {
    if (g < 1)
        fail(ErrorCode::InvalidInput, "proportional scenario: g must be >= 1");
    if (gamma.rows() != g || gamma.cols() != g)
        fail(ErrorCode::InvalidInput, "proportional scenario: gamma must be g x g");
    if (!all_finite(gamma) || (gamma - gamma.transpose()).cwiseAbs().maxCoeff() >
                                  1e-12 * std::max(1.0, gamma.cwiseAbs().maxCoeff()))
        fail(ErrorCode::InvalidInput, "proportional scenario: gamma must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(gamma, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0)
        fail(ErrorCode::NotPositiveDefinite,
             "proportional scenario: gamma is not positive definite (eigenvalue " +
                 std::to_string(es.eigenvalues().minCoeff()) + ")");
    kernel.validate();
}

void MarkovScenario::validate() const {
    if (!(sigma11 > 0.0) || !(sigma22 > 0.0))
        fail(ErrorCode::InvalidInput, "markov scenario: sigma11, sigma22 must be > 0");
    if (!(std::abs(rho) > 0.0 && std::abs(rho) < 1.0))
        fail(ErrorCode::InvalidInput, "markov scenario: need 0 < |rho| < 1");
    kernel_v1.validate();
    kernel_vr.validate();
    if (kernel_vr.scale != 1.0)
        fail(ErrorCode::InvalidInput, "markov scenario: V_R must be a correlation matrix "
                                      "(scale 1)");
}

Matrix MarkovScenario::vc(int p) const {
    Kernel k = kernel_v1;
    k.scale = 1.0;
    return build_kernel_matrix(k, p);
}

Matrix MarkovScenario::v1(int p) const { return sigma11 * vc(p); }

Matrix MarkovScenario::vr(int p) const { return build_kernel_matrix(kernel_vr, p); }

MarkovScenario markov_case(int case_no, double r, double rho, double sigma11,
                           double sigma22) {
    struct CaseDef { KernelFamily v1, vr; bool ns1; };
    static const CaseDef defs[7] = {
        {KernelFamily::Mat05, KernelFamily::Mat15, false},
        {KernelFamily::Mat05, KernelFamily::MatInf, false},
        {KernelFamily::Mat15, KernelFamily::Mat05, false},
        {KernelFamily::Mat15, KernelFamily::MatInf, false},
        {KernelFamily::MatInf, KernelFamily::Mat05, false},
        {KernelFamily::MatInf, KernelFamily::Mat15, false},
        {KernelFamily::Mat05, KernelFamily::Mat05, true},
    };
    if (case_no < 1 || case_no > 7)
        fail(ErrorCode::InvalidInput, "markov_case: case must be in 1..7");
    const CaseDef& def = defs[case_no - 1];
    MarkovScenario s;
    s.sigma11 = sigma11;
    s.sigma22 = sigma22;
    s.rho = rho;
    s.kernel_v1 = Kernel{def.v1, r, sigma11, {}};
    // NS1: V_R has Mat05 structure with adjacent-period correlation r^2
    s.kernel_vr = Kernel{def.vr, def.ns1 ? r * r : r, 1.0, {}};
    s.validate();
    return s;
}

std::string markov_case_label(int case_no) {
    if (case_no < 1 || case_no > 7)
        fail(ErrorCode::InvalidInput, "markov_case_label: case must be in 1..7");
    // comma-free so the labels embed cleanly in the sweep CSV
    static const char* labels[7] = {
        "case1(Mat05-Mat15)", "case2(Mat05-MatInf)", "case3(Mat15-Mat05)",
        "case4(Mat15-MatInf)", "case5(MatInf-Mat05)", "case6(MatInf-Mat15)",
        "case7(Mat05-Mat05-NS1)",
    };
    return labels[case_no - 1];
}

namespace {

void require_pd(const Matrix& m, const Tolerance& tol, const char* what) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
    const double wmax = es.eigenvalues().cwiseAbs().maxCoeff();
    if (es.eigenvalues().minCoeff() <= tol.rank_tol * wmax) {
        std::ostringstream os;
        os << what << " is not positive definite (eigenvalue "
           << es.eigenvalues().minCoeff() << ")";
        fail(ErrorCode::NotPositiveDefinite, os.str());
    }
}

} // namespace

Matrix build_proportional_sigma(const ProportionalScenario& s, int n, int p,
                                const Tolerance& tol) {
    s.validate();
    if (n < 1) fail(ErrorCode::InvalidInput, "build_proportional_sigma: n must be >= 1");
    const Matrix v = s.v(p);
    require_pd(v, tol, "V");
    return kron(s.gamma, kron(Matrix::Identity(n, n), v));
}

Matrix build_markov_sigma(const MarkovScenario& s, int n, int p, const Tolerance& tol) {
    s.validate();
    if (n < 1) fail(ErrorCode::InvalidInput, "build_markov_sigma: n must be >= 1");
    const Matrix sig11 = kron(Matrix::Identity(n, n), s.v1(p));
    const Matrix sig12 = s.rho_bar() * sig11;
    const Matrix sig22 = s.rho * s.rho * (s.sigma22 / s.sigma11) * sig11 +
                         s.sigma12() * kron(Matrix::Identity(n, n), s.vr(p));
    const Eigen::Index np = sig11.rows();
    Matrix sigma(2 * np, 2 * np);
    sigma.topLeftCorner(np, np) = sig11;
    sigma.topRightCorner(np, np) = sig12;
    sigma.bottomLeftCorner(np, np) = sig12;
    sigma.bottomRightCorner(np, np) = sig22;
    require_pd(sigma, tol, "markov dispersion matrix");
    return sigma;
}

Matrix vstar(const Matrix& v, const Tolerance& tol) {
    if (v.rows() != v.cols() || v.rows() == 0)
        fail(ErrorCode::InvalidInput, "vstar: matrix must be square and non-empty");
    require_pd(v, tol, "V");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (v + v.transpose()));
    const Matrix vinv = es.eigenvectors() *
                        es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
    const Vector vinv_one = vinv.rowwise().sum();
    const double denom = vinv_one.sum();
    return vinv - (vinv_one * vinv_one.transpose()) / denom;
}

OmegaMatrices omega_matrices(const MarkovScenario& s, int p, const Tolerance& tol) {
    s.validate();
    const Matrix v1s = vstar(s.v1(p), tol);
    const Matrix vrs = vstar(s.vr(p), tol);
    const double rb = s.rho_bar();
    const double s12 = s.sigma12();
    OmegaMatrices om;
    om.omega1 = v1s + (rb * rb / s12) * vrs;
    om.omega2 = (rb / s12) * vrs;
    om.omega4 = (1.0 / s12) * vrs;
    return om;
}

namespace {

Kernel kernel_from_json(const json& j, const char* ctx) {
    if (!j.is_object())
        fail(ErrorCode::Parse, std::string(ctx) + ": kernel must be an object");
    Kernel k;
    std::set<std::string> allowed;
    if (j.contains("explicit")) {
        allowed = {"explicit"};
        const auto& rows = j.at("explicit");
        if (!rows.is_array() || rows.empty())
            fail(ErrorCode::Parse, std::string(ctx) + ": 'explicit' must be a non-empty "
                                   "array of rows");
        const std::size_t dim = rows.size();
        Matrix m(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) {
            if (!rows[i].is_array() || rows[i].size() != dim)
                fail(ErrorCode::Parse, std::string(ctx) + ": 'explicit' must be square");
            for (std::size_t jj = 0; jj < dim; ++jj)
                m(i, jj) = rows[i][jj].get<double>();
        }
        k.family = KernelFamily::Explicit;
        k.explicit_matrix = std::move(m);
    } else {
        allowed = {"family", "r"};
        if (!j.contains("family") || !j.contains("r"))
            fail(ErrorCode::Parse, std::string(ctx) + ": kernel needs 'family' and 'r' "
                                   "(or 'explicit')");
        k.family = kernel_family_from_name(j.at("family").get<std::string>());
        k.r = j.at("r").get<double>();
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            fail(ErrorCode::Parse, std::string(ctx) + ": unknown kernel key '" +
                                       it.key() + "'");
    return k;
}

json kernel_to_json(const Kernel& k) {
    json j;
    if (k.family == KernelFamily::Explicit) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < k.explicit_matrix.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index c = 0; c < k.explicit_matrix.cols(); ++c)
                row.push_back(k.explicit_matrix(i, c));
            rows.push_back(std::move(row));
        }
        j["explicit"] = std::move(rows);
    } else {
        j["family"] = kernel_family_name(k.family);
        j["r"] = k.r;
    }
    return j;
}

} // namespace

namespace {

Scenario parse_scenario_object(const json& j);

} // namespace

Scenario parse_scenario_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(ErrorCode::Parse, std::string("scenario: invalid JSON: ") + e.what());
    }
    try {
        return parse_scenario_object(j);
    } catch (const json::exception& e) {
        fail(ErrorCode::Parse, std::string("scenario: ") + e.what());
    }
}

namespace {

Scenario parse_scenario_object(const json& j) {
    if (!j.is_object() || !j.contains("structure"))
        fail(ErrorCode::Parse, "scenario: missing 'structure'");
    const std::string structure = j.at("structure").get<std::string>();

    auto reject_unknown = [&](const std::set<std::string>& allowed) {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (!allowed.count(it.key()))
                fail(ErrorCode::Parse, "scenario: unknown key '" + it.key() + "'");
    };

    if (structure == "proportional") {
        reject_unknown({"structure", "g", "gamma", "kernelV"});
        if (!j.contains("gamma") || !j.contains("kernelV"))
            fail(ErrorCode::Parse, "scenario: proportional needs 'gamma' and 'kernelV'");
        ProportionalScenario s;
        const auto& grows = j.at("gamma");
        if (!grows.is_array() || grows.empty())
            fail(ErrorCode::Parse, "scenario: 'gamma' must be a non-empty array of rows");
        const std::size_t g = grows.size();
        s.gamma = Matrix(g, g);
        for (std::size_t i = 0; i < g; ++i) {
            if (!grows[i].is_array() || grows[i].size() != g)
                fail(ErrorCode::Parse, "scenario: 'gamma' must be square");
            for (std::size_t c = 0; c < g; ++c) s.gamma(i, c) = grows[i][c].get<double>();
        }
        s.g = static_cast<int>(g);
        if (j.contains("g") && j.at("g").get<int>() != s.g)
            fail(ErrorCode::Parse, "scenario: 'g' disagrees with gamma dimension");
        s.kernel = kernel_from_json(j.at("kernelV"), "scenario");
        s.validate();
        return s;
    }
    if (structure == "markov") {
        reject_unknown({"structure", "g", "kernelV1", "kernelVR", "sigma11", "sigma22",
                        "rho"});
        for (const char* key : {"kernelV1", "kernelVR", "sigma11", "sigma22", "rho"})
            if (!j.contains(key))
                fail(ErrorCode::Parse, std::string("scenario: markov needs '") + key + "'");
        if (j.contains("g") && j.at("g").get<int>() != 2)
            fail(ErrorCode::Parse, "scenario: markov structure requires g = 2");
        MarkovScenario s;
        s.sigma11 = j.at("sigma11").get<double>();
        s.sigma22 = j.at("sigma22").get<double>();
        s.rho = j.at("rho").get<double>();
        s.kernel_v1 = kernel_from_json(j.at("kernelV1"), "scenario");
        s.kernel_v1.scale = s.sigma11;
        s.kernel_vr = kernel_from_json(j.at("kernelVR"), "scenario");
        s.validate();
        return s;
    }
    fail(ErrorCode::Parse, "scenario: structure must be 'proportional' or 'markov'");
}

} // namespace

std::string scenario_to_json(const Scenario& sc) {
    json j;
    if (const auto* p = std::get_if<ProportionalScenario>(&sc)) {
        j["structure"] = "proportional";
        j["g"] = p->g;
        json rows = json::array();
        for (Eigen::Index i = 0; i < p->gamma.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index c = 0; c < p->gamma.cols(); ++c)
                row.push_back(p->gamma(i, c));
            rows.push_back(std::move(row));
        }
        j["gamma"] = std::move(rows);
        j["kernelV"] = kernel_to_json(p->kernel);
    } else {
        const auto& m = std::get<MarkovScenario>(sc);
        j["structure"] = "markov";
        j["g"] = 2;
        Kernel v1 = m.kernel_v1;
        v1.scale = 1.0; // scale is carried by sigma11
        j["kernelV1"] = kernel_to_json(v1);
        j["kernelVR"] = kernel_to_json(m.kernel_vr);
        j["sigma11"] = m.sigma11;
        j["sigma22"] = m.sigma22;
        j["rho"] = m.rho;
    }
    return j.dump(2);
}

} // namespace xover

#pragma once

#include <string>
#include <variant>

#include "matlib.hpp"

namespace xover {

enum class KernelFamily { Mat05, Mat15, MatInf, Explicit };

const char* kernel_family_name(KernelFamily f);
KernelFamily kernel_family_from_name(const std::string& name);

// Within-period covariance generator. Mat05: r^|lag|, Mat15:
// (1 - |lag| ln r) r^|lag|, MatInf: r^(lag^2); Explicit carries a raw
// correlation matrix instead of (family, r).
struct Kernel {
    KernelFamily family = KernelFamily::Mat05;
    double r = 0.5;
    double scale = 1.0;
    Matrix explicit_matrix; // used only when family == Explicit

    void validate() const;
};

Matrix build_kernel_matrix(const Kernel& k, int p);

struct ProportionalScenario {
    int g = 2;
    Matrix gamma;  // g x g, symmetric positive definite
    Kernel kernel; // V generator

    void validate() const;
    Matrix v(int p) const { return build_kernel_matrix(kernel, p); }
};

struct MarkovScenario {
    double sigma11 = 1.0;
    double sigma22 = 1.0;
    double rho = 0.5;   // same-period cross-correlation, 0 < |rho| < 1
    Kernel kernel_v1;   // correlation part of V1 (V1 = sigma11 * V_C)
    Kernel kernel_vr;   // V_R, a correlation matrix (scale fixed at 1)

    void validate() const;
    double rho_bar() const { return rho * std::sqrt(sigma22 / sigma11); }
    double sigma12() const { return sigma22 * (1.0 - rho * rho); }
    Matrix vc(int p) const; // correlation matrix of response 1
    Matrix v1(int p) const; // sigma11 * vc
    Matrix vr(int p) const;
};

using Scenario = std::variant<ProportionalScenario, MarkovScenario>;

// The seven (V1, VR) family combinations studied for the Markov
// structure; case 7 is NS1 (both Mat05, VR at parameter r^2).
MarkovScenario markov_case(int case_no, double r, double rho, double sigma11,
                           double sigma22);
std::string markov_case_label(int case_no);

Matrix build_proportional_sigma(const ProportionalScenario& s, int n, int p,
                                const Tolerance& tol = {});
Matrix build_markov_sigma(const MarkovScenario& s, int n, int p,
                          const Tolerance& tol = {});

// V* = V^-1 - (1' V^-1 1)^-1 V^-1 J V^-1; symmetric PSD with zero row
// and column sums.
Matrix vstar(const Matrix& v, const Tolerance& tol = {});

struct OmegaMatrices {
    Matrix omega1; // V1* + (rho_bar^2 / sigma12) VR*
    Matrix omega2; // (rho_bar / sigma12) VR*
    Matrix omega4; // (1 / sigma12) VR*
};

OmegaMatrices omega_matrices(const MarkovScenario& s, int p,
                             const Tolerance& tol = {});

// Scenario JSON: {"structure": "proportional"|"markov", ...}; unknown
// keys are rejected.
Scenario parse_scenario_json(const std::string& json_text);
std::string scenario_to_json(const Scenario& s);

} // namespace xover

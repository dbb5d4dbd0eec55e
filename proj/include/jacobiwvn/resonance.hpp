#pragma once

#include <optional>
#include <vector>

#include "jacobiwvn/operator_core.hpp"

namespace jacobiwvn {

// Per-site resonance coefficients at an elliptic point, j = 0..T-1.  With
// alpha = left[j], alpha~ = right[j], mu = e^{i theta}, p1/p2 monodromy entries:
//   C_j = |mu-p1|^2 mu/(2 p2) (a~3 p2/(conj(mu)-p1) + a~4)(-a2 + a4 p2/(mu-p1))
//   D_j = |mu-p1|^2 mu/(2 p2) (a~3 p2/(mu-p1)      + a~4)(-a2 + a4 p2/(mu-p1))
//   E_j = D_j / (2 T a_{T-j})
struct ResonanceData {
    double lambda{};
    double theta{};
    cplx mu;
    std::vector<cplx> C, D, E;
};

ResonanceData resonance_data(const PeriodicOperator& op, const SpectralPoint& pt);

enum class ResonanceCase { Case1, Case2, Case3 };

// Which quantised frequency to build.  k is k_plus for Case1/Case3 (1..T) and
// k_minus for Case2 (0..T-1); auto_k scans all admissible k and keeps the one
// maximising |E_value|.
struct CaseRequest {
    ResonanceCase c{ResonanceCase::Case1};
    std::optional<int> k;

    static CaseRequest case1(int k_plus) { return {ResonanceCase::Case1, k_plus}; }
    static CaseRequest case2(int k_minus) { return {ResonanceCase::Case2, k_minus}; }
    static CaseRequest case3(int k_plus) { return {ResonanceCase::Case3, k_plus}; }
    static CaseRequest auto_case1() { return {ResonanceCase::Case1, std::nullopt}; }
    static CaseRequest auto_case2() { return {ResonanceCase::Case2, std::nullopt}; }
};

// A fully resolved resonant-frequency plan at one elliptic point.
//   Case1: omega = (2 pi k+ - 2 theta)/T,  E = sum_j E_j e^{ i((T-j)omega + phi)}
//   Case2: omega = (2 theta + 2 pi k-)/T,  E = sum_j E_j e^{-i((T-j)omega + phi)}
//   Case3: theta = pi/2, omega = (2 k+ - 1) pi / T,
//          E = sum_j E_j (e^{i((T-j)omega+phi)} - e^{-i((T-j)omega+phi)})
// decay_exponent_per_unit_c is |E|/sin(theta) (Case1/2) or |E| (Case3); the
// coupling c q_n yields tails ~ k^{-c * decay_exponent_per_unit_c}, square
// summable iff the product exceeds 1/2, so c_threshold_l2 * decay. == 1/2.
struct ResonancePlan {
    double lambda{};
    double theta{};
    ResonanceCase case_id{ResonanceCase::Case1};
    int k{};
    double omega{};
    double phi{};
    cplx E_value;
    double decay_exponent_per_unit_c{};
    double c_threshold_l2{};
};

ResonancePlan plan_resonance(const PeriodicOperator& op, const SpectralPoint& pt,
                             const CaseRequest& req, double phi = 0.0);

// Printed closed forms used as independent oracles.
//   T1:  E(lambda; 1)   = e^{i phi} / (4 a1 mu^2)            (any T = 1 operator)
//   T2A: E(lambda; 2)   = e^{i phi} A(lambda)                (T = 2, zero diagonal)
//   T2B: E(lambda; 1)   = e^{i phi} B(lambda)                (T = 2, zero diagonal)
// where, with mu the elliptic multiplier,
//   A = (a1+a2 mu)/(8 a1^2 a2 lambda (a1 mu + a2)) *
//       [ (1/mu)(lambda^2(a1+a2) - a2^3) - mu a1^2 a2 - 2 a2^2 a1 + lambda^2 a1 ]
//   B = (a1+a2 mu)/(8 a1^2 a2 lambda (a1 mu + a2)) *
//       [ (1/mu)(lambda^2(a1-a2) + a2^3) + mu a1^2 a2 + 2 a2^2 a1 - lambda^2 a1 ]
// A vanishes exactly at lambda = +-|a1-a2|, B at lambda = +-(a1+a2).
enum class ClosedFormOracle { T1, T2A, T2B };

cplx closed_form_E_oracle(const PeriodicOperator& op, const SpectralPoint& pt,
                          ClosedFormOracle which, double phi = 0.0);

// Same closed forms evaluated on an explicit multiplier branch (used by tests to
// probe the two real branches just outside the bands).
cplx closed_form_E_oracle_mu(const PeriodicOperator& op, double lambda, cplx mu,
                             ClosedFormOracle which, double phi = 0.0);

// Equivalence classes of simultaneously-resonant targets: lambda_i ~ lambda_j iff
// theta_i = theta_j or theta_i + theta_j = pi (within tol).  Classes never exceed
// 2T members.
struct ResonanceClasses {
    std::vector<double> lambdas;
    std::vector<double> thetas;
    std::vector<std::vector<int>> classes;  // indices into lambdas
};

ResonanceClasses partition_resonance_classes(const PeriodicOperator& op,
                                             const std::vector<double>& lambdas,
                                             double tol = 1e-9);

// Constructive non-vanishing sweep: given the class matrix A (nonzero diagonal)
// and positive coefficients f, nudge entries of f by at most eps_budget until
// every component of A f is nonzero.  Returns the adjusted coefficients.
std::vector<double> perturb_coefficients(const std::vector<std::vector<cplx>>& A,
                                         std::vector<double> f, double eps_budget);

// Square-summability coefficient scheme for a finite target list:
//   b_k = min over earlier non-resonant j of { |sin(T(w_k - w_j)/2)|,
//                                              |sin(T(w_k + w_j)/2)| }  (1 if none)
//   c_k = base * min(1, b_k) / k^2,
// afterwards perturbed per resonance class so every class sum Y != 0.
struct CoefficientScheme {
    std::vector<double> c;
    std::vector<double> b;
    double sum_c{};
    double sum_c_over_sin_half_typical{};  // sum c_l / |sin(T w_l / 2)|
    double sum_c_over_b{};
};

CoefficientScheme coefficient_scheme(const PeriodicOperator& op,
                                     const std::vector<ResonancePlan>& plans,
                                     double base = 1.0, double class_tol = 1e-9);

// Resonant amplitude at target t for a multi-frequency potential with terms
// (c_l, omega_l, phi_l) from `plans` and couplings `c`:
//   Y(lambda_t) = sum_{l in I_t^-} c_l sum_j E_j e^{-i((T-j)w_l + phi_l)}
//               + sum_{l in I_t^+} c_l sum_j E_j e^{+i((T-j)w_l + phi_l)}
// with I_t^{+-} = { l : 2 theta_t +- T w_l in 2 pi Z } (membership tol 1e-9).
cplx resonance_sum_Y(const PeriodicOperator& op, const ResonancePlan& target,
                     const std::vector<ResonancePlan>& plans,
                     const std::vector<double>& c, double membership_tol = 1e-9);

}  // namespace jacobiwvn

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "jacobiwvn/operator_core.hpp"
#include "jacobiwvn/resonance.hpp"

namespace jacobiwvn {

struct SolutionTrace;  // simulate.hpp

struct WvnTerm {
    double c{};      // coupling, > 0
    double omega{};  // frequency in (0, 2 pi)
    double phi{};    // phase
};

// Decaying oscillatory potential q_n = sum_l c_l sin(n omega_l + phi_l)/n for
// n past the overrides, plus finitely many explicit head values q_1..q_m and an
// optional correction r added to the (1,2)/(2,1) operator entries (the a_1
// off-diagonal in rows 1-2) used by pair embedding.
class WvnPotential {
public:
    WvnPotential() = default;
    explicit WvnPotential(std::vector<WvnTerm> terms,
                          std::map<std::int64_t, double> overrides = {},
                          double r = 0.0);

    double q(std::int64_t n) const;  // n >= 1
    const std::vector<WvnTerm>& terms() const { return terms_; }
    const std::map<std::int64_t, double>& overrides() const { return overrides_; }
    double r() const { return r_; }
    void set_override(std::int64_t n, double value);
    void set_r(double r) { r_ = r; }

    // sum_l |c_l|; |q_n| <= coupling_sum()/n wherever no override applies.
    double coupling_sum() const;

private:
    std::vector<WvnTerm> terms_;
    std::map<std::int64_t, double> overrides_;  // contiguous initial segment 1..m
    double r_ = 0.0;
};

// Head data chosen by an embedding: the first solution values at one lambda.
struct EmbeddingHead {
    double lambda{};
    std::vector<double> u;  // u_1, u_2, ... (as many as the construction fixes)
};

struct EmbeddingResult {
    WvnPotential potential;
    std::vector<EmbeddingHead> heads;
    std::string branch;  // "u2_nonzero" | "u2_zero" | "pair_generic" |
                         // "pair_degenerate_eps" | "pair_degenerate_r" | "pair_q4_retry..."
    std::map<std::string, double> free_parameters;  // q1, q2_free, eps, r, delta_q4 ...
};

// Single eigenvalue embedding: given a resonant plan and a subordinate solution
// trace for coupling c, override q_1, q_2 (and u_1) so rows 1..3 of
// (J + Q)u = lambda u hold exactly while keeping u_n, n >= 2, from the trace.
//   u_2 != 0:  q_2 = (lambda u_2 - a_2 u_3 - a_1 u_1 - b_2 u_2)/u_2 with
//              u_1 = -a_1 u_2 / (q_1 + b_1 - lambda), q_1 free (default
//              lambda - b_1 + 1; q_1 = lambda - b_1 is rejected).
//   u_2 == 0:  u_1 = -a_2 u_3 / a_1, q_1 = lambda - b_1, q_2 free (default 0).
EmbeddingResult embed_single(const PeriodicOperator& op, const ResonancePlan& plan,
                             double c, const SolutionTrace& trace,
                             std::optional<double> q1 = std::nullopt,
                             std::optional<double> q2_free = std::nullopt);

// Pair embedding: two targets lambda_1 != lambda_2 (both Case1 plans) with a
// two-frequency potential at equal coupling c.  Keeps both tails u_n^{(i)},
// n >= 3 (n >= 4 after a q_4 retry), and solves the six head equations
// (rows 1..3 for each i) for u_1, u_2, q_1', q_2', q_3'.  Branches:
//   pair_generic        u_3^{(1)} != 0 (swapping labels if needed), r = 0,
//                       non-degeneracy holds;
//   pair_degenerate_eps degenerate case with a_1 <= |l1-l2|/2: x from
//                       x^2-(l2-l1)x+a_1^2=0, q_3' += eps;
//   pair_degenerate_r   degenerate with a_1 > |l1-l2|/2: off-diagonal correction
//                       r = |l1-l2|/2 - a_1 applied, then as above;
//   q4 retry            u_3^{(1)} = u_3^{(2)} = 0: q_4' perturbed, u_3 recomputed
//                       from row 4 (at most 5 attempts, then DegeneracyError).
EmbeddingResult embed_pair(const PeriodicOperator& op,
                           const std::pair<ResonancePlan, ResonancePlan>& plans,
                           double c,
                           const std::pair<const SolutionTrace*, const SolutionTrace*>& traces);

}  // namespace jacobiwvn

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "jacobiwvn/operator_core.hpp"
#include "jacobiwvn/potential.hpp"

namespace jacobiwvn {

struct FitResult {
    double gamma{};    // decay exponent, negated log-log slope
    double stderr_{};  // standard error of the slope
    std::pair<std::int64_t, std::int64_t> window{};
};

enum class TraceVerdict { Decaying, Bounded, Growing, Undetermined };

// Forward-recurrence solution record.  Large runs store log block amplitudes
// (max |u| over one coefficient period) on a grid that keeps every block below
// 4096 and then log-thins, dyadic window norms, strided raw samples, and the
// exact head u_1..u_8.  Rescaling against overflow folds into log_scale terms.
struct SolutionTrace {
    double lambda{};
    int period{1};
    std::int64_t n_max{};

    std::vector<std::pair<std::int64_t, double>> samples;  // (n, u_n), strided + n <= 8
    std::vector<std::pair<std::int64_t, double>> window_log_norms;  // (N, log ||u||_N)

    std::vector<std::int64_t> block_n;   // block start (n = mT + 1)
    std::vector<double> block_logamp;    // log max |u| over [n, n+T); -inf if zero

    std::array<double, 2> head{};        // (u_1, u_2) the run started from
    double log_scale_total{};            // accumulated rescale (0 unless overflow)

    std::optional<FitResult> fitted;
    TraceVerdict verdict{TraceVerdict::Undetermined};
};

// Run u_{n+1} = ((lambda - b_n - q_n) u_n - a*_{n-1} u_{n-1}) / a_n from
// head = (u_1, u_2) up to n = N, where a*_1 = a_1 + r honours the potential's
// off-diagonal correction.  stride 0 picks max(1, N/1000) for raw samples.
// Overflow beyond 1e150 triggers rescaling when rescale is true, else
// NumericalError naming the position.
SolutionTrace iterate(const PeriodicOperator& op, const WvnPotential& p,
                      double lambda, std::array<double, 2> head, std::int64_t N,
                      std::int64_t stride = 0, bool rescale = true);

// Test helper: wrap an explicit value sequence u_1..u_len as a trace.
SolutionTrace make_trace_from_values(const PeriodicOperator& op, double lambda,
                                     const std::vector<double>& u);

// Least-squares slope of log(block amplitude) vs log n over [n_lo, n_hi]
// (n_hi >= 4 n_lo), with log-binning and one outlier-rejection refit; gamma is
// the negated slope.  A zero amplitude inside the window raises NumericalError.
FitResult fit_decay_exponent(const SolutionTrace& trace, std::int64_t n_lo,
                             std::int64_t n_hi);

enum class SubordinationVerdict { Subordinate, NoSubordinate, Inconclusive };

struct SubordinationResult {
    double psi{};  // minimising head angle, head = (cos psi, sin psi)
    std::array<double, 2> head_sub{}, head_generic{};
    SolutionTrace trace_sub, trace_generic;
    std::vector<std::pair<std::int64_t, double>> ratio_dyadic;  // (N, ||u_min||/||u_gen||)
    double final_ratio{};
    SubordinationVerdict verdict{SubordinationVerdict::Inconclusive};
};

// Scan head directions (cos psi, sin psi) over a psi grid (default 720 points)
// with golden-section refinement, minimising ||u||_N.  Superposition makes
// ||u(psi)||_N an exact quadratic form in the two basis traces, so the scan
// costs two recurrence passes.  Subordinate verdict: final ratio < 0.05 and
// non-increasing across dyadic N; NoSubordinate if no direction gets below 0.5.
// Requires an elliptic lambda and N >= 10^4.
SubordinationResult subordination_search(const PeriodicOperator& op,
                                         const WvnPotential& p, double lambda,
                                         std::int64_t N, int psi_grid = 720);

struct BoundednessResult {
    TraceVerdict verdict{TraceVerdict::Undetermined};
    double sup_ratio{};  // sup envelope over [10^3, N] / envelope at 10^3
    double inf_ratio{};  // inf envelope over [10^3, N] / envelope at 10^3
};

// Envelope comparison against the n = 10^3 reference (windows of max(4T, 128)
// samples to absorb elliptic oscillation).  Bounded iff sup <= 3 and inf >= 1/3.
// Requires trace length >= 10^5.
BoundednessResult boundedness_check(const SolutionTrace& trace);

// Relative residual ||((J+Q) u - lambda u)|_{rows 1..N-1}||_2 / ||u||_2 for the
// solution regenerated from head; row N is excluded (truncation artefact).
double eigen_residual(const PeriodicOperator& op, const WvnPotential& p,
                      double lambda, std::array<double, 2> head, std::int64_t N);

// Asymptotic-frame diagnostics at an elliptic point:
//   f_k = M^{-k} (u_{kT}, u_{kT+1})^t   (f_k constant when q == 0)
//   g_k = V^{-1} f_k
//   G_k = -(1/(i sin theta)) sum_{l>=0} sum_j F_j q_{(k+l+1)T-j},
//         F_j = diag(-conj(C_j), C_j)/a_{T-j},
// with the infinite tails evaluated to better than 1e-10 by accelerated
// summation.  ||G_k|| k stays below 2 c/(T sin theta) sum_j |C_j|/(a_{T-j}
// |sin(T omega/2)|) for a single-term potential (G_norm_ceiling below).
struct DiagnosticTransforms {
    std::vector<Vec2> f, g;
    std::vector<Mat2> G;
    std::vector<double> g_norm;
    std::vector<double> G_norm_times_k;
    double G_norm_ceiling{};  // 0 when the potential has no oscillatory term
};

DiagnosticTransforms diagnostic_transforms(const PeriodicOperator& op,
                                           const WvnPotential& p,
                                           const SolutionTrace& trace,
                                           std::int64_t K);

struct ZygmundCheck {
    double alpha{};
    std::int64_t n{};
    cplx tail;
    double bound{};
    bool ok{};
};

// |sum_{k>=n} e^{ik alpha}/k| <= 1/(n |sin(alpha/2)|), checked numerically.
ZygmundCheck zygmund_tail_bound_check(double alpha, std::int64_t n);

}  // namespace jacobiwvn

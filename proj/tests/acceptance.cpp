// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion carries a wall-clock budget; exceeding it fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jacobiwvn/band_structure.hpp"
#include "jacobiwvn/errors.hpp"
#include "jacobiwvn/operator_core.hpp"
#include "jacobiwvn/potential.hpp"
#include "jacobiwvn/resonance.hpp"
#include "jacobiwvn/simulate.hpp"

using namespace jacobiwvn;

namespace {

struct Outcome {
    bool ok{true};
    std::string detail;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

PeriodicOperator random_operator(std::mt19937_64& rng, int max_period) {
    std::uniform_int_distribution<int> period(1, max_period);
    std::uniform_real_distribution<double> a_dist(0.3, 2.5), b_dist(-1.5, 1.5);
    const int T = period(rng);
    std::vector<double> a(T), b(T);
    for (double& v : a) v = a_dist(rng);
    for (double& v : b) v = b_dist(rng);
    return PeriodicOperator(a, b);
}

double sample_at(const SolutionTrace& tr, std::int64_t n) {
    for (const auto& [m, u] : tr.samples)
        if (m == n) return u;
    throw NumericalError("trace holds no sample at n = " + std::to_string(n));
}

// Residual of row n of (J + Q) u = lambda u with u_1.. packed in order and the
// off-diagonal correction r folded into a_1.
double row_residual(const PeriodicOperator& op, const WvnPotential& p, double lambda,
                    const std::vector<double>& u, int n) {
    auto at = [&](int i) { return u[static_cast<std::size_t>(i - 1)]; };
    auto a_star = [&](int i) { return i == 1 ? op.a(1) + p.r() : op.a(i); };
    double lhs = (op.b(n) + p.q(n)) * at(n) + a_star(n) * at(n + 1);
    if (n > 1) lhs += a_star(n - 1) * at(n - 1);
    return std::abs(lhs - lambda * at(n));
}

double dist_mod_2pi(double x) { return std::abs(std::remainder(x, 2.0 * M_PI)); }

// (1) 200 random operators of period <= 8, 1000 points each: the monodromy
// determinant stays at 1 within 1e-12 relative to the rounding amplification
// of the factor chain.
Outcome determinants_stay_at_one() {
    std::mt19937_64 rng(101);
    for (int rep = 0; rep < 200; ++rep) {
        const PeriodicOperator op = random_operator(rng, 8);
        std::uniform_real_distribution<double> lam(op.min_b() - 1.0 - 2.0 * op.max_a(),
                                                   op.max_b() + 1.0 + 2.0 * op.max_a());
        for (int j = 0; j < 1000; ++j) {
            const double l = lam(rng);
            const cplx det = monodromy(op, l).m.det();
            double growth = 1.0;
            for (int f = 1; f <= op.period(); ++f)
                growth *= std::max(1.0, transfer_matrix(op, f, l).norm());
            const double scale = std::max(1.0, 8.0 * op.period() * growth * growth);
            if (std::abs(det - 1.0) > 1e-12 * scale)
                return fail("|det - 1| = " + num(std::abs(det - 1.0)) + " at lambda = " +
                            num(l) + ", period " + std::to_string(op.period()));
        }
    }
    return {};
}

bool grid_scan_agrees(const PeriodicOperator& op, const std::vector<Band>& bands,
                      double lo, double hi, std::string* why) {
    const int n = 200000;
    const double h = (hi - lo) / n;
    for (int i = 0; i <= n; ++i) {
        const double l = lo + i * h;
        const bool inside_tr = std::abs(monodromy(op, l).trace) <= 2.0;
        bool in_band = false;
        double edge_dist = hi - lo;
        for (const Band& b : bands) {
            in_band = in_band || (l >= b.lo && l <= b.hi);
            edge_dist = std::min({edge_dist, std::abs(l - b.lo), std::abs(l - b.hi)});
        }
        if (inside_tr != in_band && edge_dist > h) {
            *why = "grid point " + num(l) + (inside_tr ? " has |trace| <= 2 but lies off every band"
                                                       : " has |trace| > 2 but lies inside a band");
            return false;
        }
    }
    return true;
}

// (2) Band endpoints match the constant-coefficient and two-periodic
// references to 1e-10, cross-checked against a brute-force trace scan.
Outcome band_tables_match_references() {
    std::string why;
    {
        const PeriodicOperator op({1.0}, {0.0});
        const std::vector<Band> bands = find_bands(op);
        if (bands.size() != 1) return fail("constant operator: expected 1 band");
        if (std::abs(bands[0].lo + 2.0) > 1e-10 || std::abs(bands[0].hi - 2.0) > 1e-10)
            return fail("constant operator band [" + num(bands[0].lo) + ", " +
                        num(bands[0].hi) + "] != [-2, 2]");
        if (!grid_scan_agrees(op, bands, -3.5, 3.5, &why)) return fail(why);
    }
    {
        const PeriodicOperator op({1.0, 2.0}, {0.0, 0.0});
        const std::vector<Band> bands = find_bands(op);
        if (bands.size() != 2) return fail("two-periodic operator: expected 2 bands");
        const double want[4] = {-3.0, -1.0, 1.0, 3.0};
        const double got[4] = {bands[0].lo, bands[0].hi, bands[1].lo, bands[1].hi};
        for (int i = 0; i < 4; ++i)
            if (std::abs(got[i] - want[i]) > 1e-10)
                return fail("two-periodic edge " + num(got[i]) + " != " + num(want[i]));
        if (!grid_scan_agrees(op, bands, -4.0, 4.0, &why)) return fail(why);
    }
    return {};
}

// (3) The closed-form amplitudes agree with the general planner to 1e-10
// relative on 200 interior points, and their root values sit exactly at the
// band edges: the trace discriminant changes sign there, the two real
// multiplier branches just outside bracket zero, and the parabolic branch
// value vanishes.
Outcome closed_forms_match_and_vanish_at_edges() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    int done = 0;
    while (done < 70) {
        const double a1 = 0.3 + 2.2 * u01(rng);
        const double b1 = -1.5 + 3.0 * u01(rng);
        const double theta = M_PI * (0.02 + 0.96 * u01(rng));
        if (std::abs(theta - M_PI_2) < 1e-3) continue;
        const PeriodicOperator op({a1}, {b1});
        const SpectralPoint pt = classify(op, b1 + 2.0 * a1 * std::cos(theta));
        if (pt.cls != PointClass::Elliptic) continue;
        const double phi = 2.0 * M_PI * u01(rng);
        const cplx planned =
            plan_resonance(op, pt, CaseRequest::case1(1), phi).E_value;
        const cplx oracle = closed_form_E_oracle(op, pt, ClosedFormOracle::T1, phi);
        if (std::abs(planned - oracle) > 1e-10 * std::abs(oracle))
            return fail("period-1 amplitude deviates at lambda = " + num(pt.lambda));
        ++done;
    }

    while (done < 200) {
        const double a1 = 0.5 + 1.7 * u01(rng);
        const double a2 = 0.5 + 1.7 * u01(rng);
        if (std::abs(a1 - a2) < 0.15) continue;
        const double theta = M_PI * (0.02 + 0.96 * u01(rng));
        if (std::abs(theta - M_PI_2) < 1e-3) continue;
        const double lambda = (u01(rng) < 0.5 ? -1.0 : 1.0) *
            std::sqrt(a1 * a1 + a2 * a2 + 2.0 * a1 * a2 * std::cos(theta));
        const PeriodicOperator op({a1, a2}, {0.0, 0.0});
        const SpectralPoint pt = classify(op, lambda);
        if (pt.cls != PointClass::Elliptic) continue;
        const double phi = 2.0 * M_PI * u01(rng);
        const struct { int k; ClosedFormOracle which; } forms[2] = {
            {2, ClosedFormOracle::T2A}, {1, ClosedFormOracle::T2B}};
        for (const auto& f : forms) {
            const cplx planned =
                plan_resonance(op, pt, CaseRequest::case1(f.k), phi).E_value;
            const cplx oracle = closed_form_E_oracle(op, pt, f.which, phi);
            if (std::abs(planned - oracle) > 1e-10 * std::abs(oracle))
                return fail("period-2 amplitude deviates at lambda = " + num(lambda) +
                            ", k = " + std::to_string(f.k));
            ++done;
        }
    }

    for (int rep = 0; rep < 5; ++rep) {
        double a1 = 0.5 + 1.7 * u01(rng), a2 = 0.5 + 1.7 * u01(rng);
        while (std::abs(a1 - a2) < 0.2) a2 = 0.5 + 1.7 * u01(rng);
        const PeriodicOperator op({a1, a2}, {0.0, 0.0});
        const double eps = 1e-6;
        const struct { double root; bool inner; ClosedFormOracle which; } roots[4] = {
            {std::abs(a1 - a2), true, ClosedFormOracle::T2A},
            {-std::abs(a1 - a2), true, ClosedFormOracle::T2A},
            {a1 + a2, false, ClosedFormOracle::T2B},
            {-(a1 + a2), false, ClosedFormOracle::T2B}};
        for (const auto& r : roots) {
            const auto disc = [&](double l) {
                const double tr = monodromy(op, l).trace;
                return tr * tr - 4.0;
            };
            if (disc(r.root - eps) * disc(r.root + eps) >= 0.0)
                return fail("no trace sign change across root " + num(r.root));
            const double sgn = r.root > 0 ? 1.0 : -1.0;
            const double just_out = r.inner ? r.root - sgn * eps : r.root + sgn * eps;
            if (std::abs(monodromy(op, just_out).trace) <= 2.0)
                return fail("probe point " + num(just_out) + " is not outside the band");
            const cplx mu_small = floquet_mu_small(op, just_out);
            const double va =
                closed_form_E_oracle_mu(op, just_out, mu_small, r.which).real();
            const double vb =
                closed_form_E_oracle_mu(op, just_out, 1.0 / mu_small, r.which).real();
            if (va * vb >= 0.0)
                return fail("branch values " + num(va) + ", " + num(vb) +
                            " do not bracket the root " + num(r.root));
            const cplx mu_par(monodromy(op, r.root).trace / 2.0, 0.0);
            if (std::abs(closed_form_E_oracle_mu(op, r.root, mu_par, r.which)) > 1e-10)
                return fail("amplitude does not vanish at root " + num(r.root));
        }
    }
    return {};
}

// (4) Periods 1..3, three interior points per band, coupling at twice the
// square-summability threshold: the fitted decay exponent over n in
// [1e4, 1e6] lands within 5% of c |E| / sin(theta).
Outcome critical_coupling_decay() {
    const std::vector<PeriodicOperator> ops = {
        PeriodicOperator({1.0}, {0.0}),
        PeriodicOperator({1.0, 2.0}, {0.0, 0.0}),
        PeriodicOperator({1.0, 1.3, 0.8}, {0.2, -0.4, 0.1}),
    };
    for (const PeriodicOperator& op : ops) {
        for (const Band& band : find_bands(op)) {
            for (const double frac : {0.30, 0.45, 0.70}) {
                const double lambda = invert_theta(op, band, frac * M_PI);
                const ResonancePlan plan =
                    plan_resonance(op, classify(op, lambda), CaseRequest::auto_case1());
                const double c = 2.0 * plan.c_threshold_l2;
                const WvnPotential pot({{c, plan.omega, plan.phi}});
                const SubordinationResult sub =
                    subordination_search(op, pot, lambda, 1000000);
                if (sub.verdict != SubordinationVerdict::Subordinate)
                    return fail("no subordinate direction at lambda = " + num(lambda) +
                                ", period " + std::to_string(op.period()));
                const FitResult fit = fit_decay_exponent(sub.trace_sub, 10000, 1000000);
                const double want = c * plan.decay_exponent_per_unit_c;
                if (std::abs(fit.gamma - want) > 0.05 * want)
                    return fail("fitted exponent " + num(fit.gamma) + " vs " + num(want) +
                                " at lambda = " + num(lambda) + ", period " +
                                std::to_string(op.period()));
            }
        }
    }
    return {};
}

// (5) Band-centre half-phase branch of the constant operator: phi = pi/2 at
// lambda = 0 decays with exponent c/2 within 5%.
Outcome half_phase_centre_decay() {
    const PeriodicOperator op({1.0}, {0.0});
    const ResonancePlan plan =
        plan_resonance(op, classify(op, 0.0), CaseRequest::case3(1), M_PI_2);
    if (std::abs(plan.omega - M_PI) > 1e-12)
        return fail("half-phase frequency " + num(plan.omega) + " != pi");
    const double c = 2.0 * plan.c_threshold_l2;
    const WvnPotential pot({{c, plan.omega, plan.phi}});
    const SubordinationResult sub = subordination_search(op, pot, 0.0, 1000000);
    if (sub.verdict != SubordinationVerdict::Subordinate)
        return fail("no subordinate direction at the band centre");
    const FitResult fit = fit_decay_exponent(sub.trace_sub, 10000, 1000000);
    const double want = c / 2.0;
    if (std::abs(fit.gamma - want) > 0.05 * want)
        return fail("fitted exponent " + num(fit.gamma) + " vs " + num(want));
    return {};
}

// (6) Twenty random frequencies bounded away from the quantisation set leave
// every solution bounded and admit no subordinate direction.
Outcome off_resonance_stays_bounded() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const PeriodicOperator op({1.0}, {0.0});
    const double lambda = 0.5;
    const double theta = std::acos(lambda / 2.0);
    int done = 0;
    while (done < 20) {
        const double omega = 0.3 + (2.0 * M_PI - 0.6) * u01(rng);
        if (dist_mod_2pi(2.0 * theta + omega) < 0.2 ||
            dist_mod_2pi(2.0 * theta - omega) < 0.2)
            continue;
        const WvnPotential pot({{0.5, omega, 2.0 * M_PI * u01(rng)}});
        const SubordinationResult sub = subordination_search(op, pot, lambda, 100000);
        if (sub.verdict != SubordinationVerdict::NoSubordinate)
            return fail("unexpected subordinate signal at omega = " + num(omega));
        const BoundednessResult bnd = boundedness_check(sub.trace_generic);
        if (bnd.verdict != TraceVerdict::Bounded)
            return fail("generic solution not bounded at omega = " + num(omega));
        ++done;
    }
    return {};
}

// (7) Single-target embeddings on periods 1 and 2: boundary residual below
// 1e-8 at n = 1e4 and a fitted tail exponent above 1/2.
Outcome single_embeddings_hold() {
    const struct { PeriodicOperator op; double lambda; } cases[2] = {
        {PeriodicOperator({1.0}, {0.0}), 0.6},
        {PeriodicOperator({1.0, 2.0}, {0.0, 0.0}), 2.2},
    };
    const std::int64_t N = 262144;
    for (const auto& c : cases) {
        const ResonancePlan plan =
            plan_resonance(c.op, classify(c.op, c.lambda), CaseRequest::auto_case1());
        const double coupling = 2.0 * plan.c_threshold_l2;
        const WvnPotential pot({{coupling, plan.omega, plan.phi}});
        const SubordinationResult sub = subordination_search(c.op, pot, c.lambda, N);
        if (sub.verdict != SubordinationVerdict::Subordinate)
            return fail("no subordinate direction at lambda = " + num(c.lambda));
        const EmbeddingResult emb = embed_single(c.op, plan, coupling, sub.trace_sub);
        const std::array<double, 2> head{emb.heads[0].u[0], emb.heads[0].u[1]};
        const double res = eigen_residual(c.op, emb.potential, c.lambda, head, 10000);
        if (res >= 1e-8)
            return fail("residual " + num(res) + " at lambda = " + num(c.lambda));
        const SolutionTrace tail = iterate(c.op, emb.potential, c.lambda, head, N);
        const FitResult fit = fit_decay_exponent(tail, 10000, N);
        if (fit.gamma <= 0.5)
            return fail("tail exponent " + num(fit.gamma) + " <= 1/2 at lambda = " +
                        num(c.lambda));
    }
    return {};
}

// (8) Paired embeddings: a live two-frequency pair satisfies both boundary
// residuals below 1e-8 and all six head rows to 1e-12; synthetic traces force
// the generic, epsilon-split, and fourth-site-retry branches.
Outcome paired_embeddings_hold() {
    const PeriodicOperator op({1.0}, {0.0});

    {
        const double l1 = 0.6, l2 = 1.0;
        const ResonancePlan p1 =
            plan_resonance(op, classify(op, l1), CaseRequest::auto_case1(), 0.4);
        const ResonancePlan p2 =
            plan_resonance(op, classify(op, l2), CaseRequest::auto_case1(), 1.3);
        const double c = 2.0 * std::max(p1.c_threshold_l2, p2.c_threshold_l2);
        const WvnPotential pot({{c, p1.omega, p1.phi}, {c, p2.omega, p2.phi}});
        const SubordinationResult s1 = subordination_search(op, pot, l1, 200000);
        const SubordinationResult s2 = subordination_search(op, pot, l2, 200000);
        if (s1.verdict != SubordinationVerdict::Subordinate ||
            s2.verdict != SubordinationVerdict::Subordinate)
            return fail("pair targets lost their subordinate directions");
        const EmbeddingResult emb =
            embed_pair(op, {p1, p2}, c, {&s1.trace_sub, &s2.trace_sub});
        const SolutionTrace* traces[2] = {&s1.trace_sub, &s2.trace_sub};
        const double ls[2] = {l1, l2};
        for (int i = 0; i < 2; ++i) {
            const EmbeddingHead& h = emb.heads[i];
            const double res = eigen_residual(op, emb.potential, ls[i],
                                              {h.u[0], h.u[1]}, 10000);
            if (res >= 1e-8)
                return fail("pair residual " + num(res) + " at lambda = " + num(ls[i]));
            const std::vector<double> u = {h.u[0], h.u[1], h.u[2],
                                           sample_at(*traces[i], 4),
                                           sample_at(*traces[i], 5)};
            for (int row = 1; row <= 3; ++row)
                if (row_residual(op, emb.potential, ls[i], u, row) > 1e-12)
                    return fail("pair row " + std::to_string(row) + " residual above "
                                "1e-12 at lambda = " + num(ls[i]));
        }
    }

    const auto fixture_rows = [&](const EmbeddingResult& emb, double l1, double l2,
                                  const std::vector<double>& t1,
                                  const std::vector<double>& t2, int n_rows,
                                  double tol) -> std::optional<std::string> {
        const std::vector<double>* raw[2] = {&t1, &t2};
        const double ls[2] = {l1, l2};
        for (int i = 0; i < 2; ++i) {
            std::vector<double> u = {emb.heads[i].u[0], emb.heads[i].u[1],
                                     emb.heads[i].u[2], (*raw[i])[3], (*raw[i])[4]};
            for (int row = 1; row <= n_rows; ++row)
                if (row_residual(op, emb.potential, ls[i], u, row) > tol)
                    return "fixture row " + std::to_string(row) +
                           " residual above tolerance at lambda = " + num(ls[i]);
        }
        return std::nullopt;
    };

    const auto embed_fixture = [&](double l1, double l2, const std::vector<double>& t1,
                                   const std::vector<double>& t2) {
        const ResonancePlan p1 =
            plan_resonance(op, classify(op, l1), CaseRequest::auto_case1());
        const ResonancePlan p2 =
            plan_resonance(op, classify(op, l2), CaseRequest::auto_case1());
        const double c = 2.0 * std::max(p1.c_threshold_l2, p2.c_threshold_l2);
        const SolutionTrace tr1 = make_trace_from_values(op, l1, t1);
        const SolutionTrace tr2 = make_trace_from_values(op, l2, t2);
        return embed_pair(op, {p1, p2}, c, {&tr1, &tr2});
    };

    {
        const std::vector<double> t1 = {0.2, 0.5, 0.9, 0.4, 0.1};
        const std::vector<double> t2 = {0.1, -0.3, 0.7, 0.2, -0.5};
        const EmbeddingResult emb = embed_fixture(0.6, -0.8, t1, t2);
        if (emb.branch != "pair_generic")
            return fail("generic fixture landed in branch " + emb.branch);
        if (auto why = fixture_rows(emb, 0.6, -0.8, t1, t2, 3, 1e-12)) return fail(*why);
    }
    {
        const double l1 = -1.05, l2 = 1.05;
        const std::vector<double> t1 = {0.2, 0.5, 0.9, 0.4, 0.1};
        const double u4_2 = (l2 - l1 + 1.0 * 0.4 / 0.9) * 0.7 / 1.0;
        const std::vector<double> t2 = {0.1, -0.3, 0.7, u4_2, -0.5};
        const EmbeddingResult emb = embed_fixture(l1, l2, t1, t2);
        if (emb.branch != "pair_degenerate_eps")
            return fail("epsilon fixture landed in branch " + emb.branch);
        if (auto why = fixture_rows(emb, l1, l2, t1, t2, 3, 1e-12)) return fail(*why);
    }
    {
        const std::vector<double> t1 = {0.2, 0.5, 0.0, 0.4, 0.1};
        const std::vector<double> t2 = {0.1, -0.3, 0.0, 0.2, -0.5};
        const EmbeddingResult emb = embed_fixture(0.6, -0.8, t1, t2);
        if (emb.branch.rfind("pair_q4_retry+", 0) != 0)
            return fail("retry fixture landed in branch " + emb.branch);
        if (auto why = fixture_rows(emb, 0.6, -0.8, t1, t2, 3, 1e-12)) return fail(*why);
        if (auto why = fixture_rows(emb, 0.6, -0.8, t1, t2, 4, 1e-10)) return fail(*why);
    }
    return {};
}

// (9) A three-target coefficient scheme: each target's fitted exponent lands
// within 10% of |Y(lambda_t)| / sin(theta_t).  Two numerical exclusions shape
// the target choice: every predicted exponent must stay below ~1.2 (past that,
// rounding noise seeded into the growing companion, 1e-16 n^{2 gamma},
// overtakes the decaying solution inside the fit window), and quasi-momenta
// must avoid multiples of pi/4, where a second-order secular term shifts the
// true exponent below the first-order prediction by O(c^2).
Outcome scheme_targets_decay_as_predicted() {
    const PeriodicOperator op({1.0}, {0.0});
    const double thetas[3] = {0.47 * M_PI, 0.20 * M_PI, 0.05 * M_PI};
    const double phis[3] = {0.2, 1.1, 2.0};
    std::vector<ResonancePlan> plans;
    for (int t = 0; t < 3; ++t)
        plans.push_back(plan_resonance(op, classify(op, 2.0 * std::cos(thetas[t])),
                                       CaseRequest::auto_case1(), phis[t]));

    const CoefficientScheme probe = coefficient_scheme(op, plans, 1.0);
    double min_gamma = 1e300;
    for (int t = 0; t < 3; ++t)
        min_gamma = std::min(
            min_gamma, std::abs(resonance_sum_Y(op, plans[t], plans, probe.c)) /
                           std::sin(thetas[t]));
    const CoefficientScheme scheme = coefficient_scheme(op, plans, 0.25 / min_gamma);

    std::vector<WvnTerm> terms;
    for (int t = 0; t < 3; ++t) terms.push_back({scheme.c[t], plans[t].omega, plans[t].phi});
    const WvnPotential pot(terms);

    for (int t = 0; t < 3; ++t) {
        const double want = std::abs(resonance_sum_Y(op, plans[t], plans, scheme.c)) /
                            std::sin(thetas[t]);
        const SubordinationResult sub =
            subordination_search(op, pot, plans[t].lambda, 1000000);
        if (sub.verdict != SubordinationVerdict::Subordinate)
            return fail("no subordinate direction at target " + std::to_string(t));
        const FitResult fit = fit_decay_exponent(sub.trace_sub, 10000, 1000000);
        if (std::abs(fit.gamma - want) > 0.10 * want)
            return fail("target " + std::to_string(t) + " fitted " + num(fit.gamma) +
                        " vs " + num(want));
    }
    return {};
}

// (10) The inverse-harmonic tail bound 1/(n |sin(alpha/2)|) holds on 100
// random (alpha, n) pairs.
Outcome harmonic_tail_bounds_hold() {
    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        double alpha;
        do {
            alpha = 2.0 * M_PI * u01(rng);
        } while (std::abs(std::sin(alpha / 2.0)) < 0.01);
        const auto n = static_cast<std::int64_t>(std::exp(u01(rng) * std::log(1e6))) + 1;
        const ZygmundCheck chk = zygmund_tail_bound_check(alpha, n);
        if (!chk.ok || std::abs(chk.tail) > chk.bound * (1.0 + 1e-10))
            return fail("tail " + num(std::abs(chk.tail)) + " above bound " + num(chk.bound) +
                        " at alpha = " + num(alpha) + ", n = " + std::to_string(n));
    }
    return {};
}

// (11) Fifty random point sets: the partition groups exactly the points whose
// quasi-momenta match directly or through theta -> pi - theta, and no class
// exceeds 2T members.
Outcome partitions_group_symmetric_momenta() {
    std::mt19937_64 rng(1111);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const PeriodicOperator op = random_operator(rng, 3);
        const std::vector<Band> bands = find_bands(op);
        if (bands.empty()) return fail("an operator draw produced no bands");
        const int cap = 2 * op.period();
        const int ngroups = 1 + static_cast<int>(rng() % 3);
        std::vector<double> gtheta;
        while (static_cast<int>(gtheta.size()) < ngroups) {
            const double th = M_PI * (0.05 + 0.90 * u01(rng));
            bool separated = true;
            for (const double other : gtheta)
                separated = separated && std::abs(th - other) > 1e-2 &&
                            std::abs(th + other - M_PI) > 1e-2;
            if (separated) gtheta.push_back(th);
        }
        std::vector<double> lambdas;
        std::vector<int> group;
        for (int g = 0; g < ngroups; ++g) {
            const int size = 1 + static_cast<int>(rng() % std::min(cap, 3));
            for (int s = 0; s < size; ++s) {
                const Band& band = bands[rng() % bands.size()];
                const bool mirror = (rng() & 1) != 0;
                lambdas.push_back(
                    invert_theta(op, band, mirror ? M_PI - gtheta[g] : gtheta[g]));
                group.push_back(g);
            }
        }
        const ResonanceClasses out = partition_resonance_classes(op, lambdas);
        std::vector<int> class_of(lambdas.size(), -1);
        for (std::size_t cls = 0; cls < out.classes.size(); ++cls) {
            if (out.classes[cls].size() > static_cast<std::size_t>(cap))
                return fail("class of " + std::to_string(out.classes[cls].size()) +
                            " exceeds " + std::to_string(cap));
            for (const int member : out.classes[cls])
                class_of[static_cast<std::size_t>(member)] = static_cast<int>(cls);
        }
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if ((group[i] == group[j]) != (class_of[i] == class_of[j]))
                    return fail("points " + num(lambdas[i]) + " and " + num(lambdas[j]) +
                                " grouped against the theta symmetry");
    }
    return {};
}

// (12) Matched quantisation branches on periods 1 and 2 differ by exactly
// exp(-2 i phi) across 100 random (lambda, phi) draws.
Outcome matched_branches_share_amplitude() {
    std::mt19937_64 rng(1212);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    int done = 0;
    while (done < 100) {
        const int T = 1 + (done % 2);
        std::vector<double> a(T), b(T);
        for (double& v : a) v = 0.4 + 1.8 * u01(rng);
        for (double& v : b) v = -1.0 + 2.0 * u01(rng);
        const PeriodicOperator op(a, b);
        const std::vector<Band> bands = find_bands(op);
        const double theta = M_PI * (0.05 + 0.90 * u01(rng));
        if (std::abs(theta - M_PI_2) < 1e-3) continue;
        const double lambda = invert_theta(op, bands[rng() % bands.size()], theta);
        const SpectralPoint pt = classify(op, lambda);
        if (pt.cls != PointClass::Elliptic) continue;
        const double phi = 2.0 * M_PI * u01(rng);
        const int k = 1 + static_cast<int>(rng() % T);
        ResonancePlan fwd, bwd;
        try {
            fwd = plan_resonance(op, pt, CaseRequest::case1(k), phi);
            bwd = plan_resonance(op, pt, CaseRequest::case2((T - k) % T), phi);
        } catch (const DomainError&) {
            continue;
        }
        const cplx want = std::exp(cplx(0.0, -2.0 * phi)) * fwd.E_value;
        if (std::abs(bwd.E_value - want) > 1e-10 * std::max(1.0, std::abs(want)))
            return fail("matched amplitude deviates at lambda = " + num(lambda) +
                        ", period " + std::to_string(T));
        ++done;
    }
    return {};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget_s;
        Outcome (*fn)();
    };
    const Criterion criteria[] = {
        {"monodromy determinants stay at one across random operators", 5.0,
         determinants_stay_at_one},
        {"band tables match the constant and two-periodic references", 1.0,
         band_tables_match_references},
        {"closed-form amplitudes match the planner and vanish at band edges", 2.0,
         closed_forms_match_and_vanish_at_edges},
        {"critical-coupling runs decay at the planned exponent", 60.0,
         critical_coupling_decay},
        {"band-centre half-phase runs decay at half the coupling", 10.0,
         half_phase_centre_decay},
        {"non-quantised frequencies stay bounded with no subordinate direction", 60.0,
         off_resonance_stays_bounded},
        {"single-target embeddings pass residual and tail-decay checks", 30.0,
         single_embeddings_hold},
        {"paired embeddings satisfy the six boundary rows in every branch", 60.0,
         paired_embeddings_hold},
        {"three-target schemes decay at their predicted per-target rates", 120.0,
         scheme_targets_decay_as_predicted},
        {"inverse-harmonic tail bounds hold across random frequencies", 5.0,
         harmonic_tail_bounds_hold},
        {"partitions group symmetric quasi-momenta within the size cap", 1.0,
         partitions_group_symmetric_momenta},
        {"matched branches differ by exactly the double phase factor", 1.0,
         matched_branches_share_amplitude},
    };

    bool all_ok = true;
    int idx = 0;
    for (const Criterion& c : criteria) {
        ++idx;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out = fail(std::string("unexpected exception: ") + e.what());
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (out.ok && dt > c.budget_s)
            out = fail("wall time " + num(dt) + "s exceeds the " + num(c.budget_s) +
                       "s budget");
        std::printf("[%2d/12] %s  %6.2fs  %s\n", idx, out.ok ? "PASS" : "FAIL", dt,
                    c.name);
        if (!out.ok) std::printf("        %s\n", out.detail.c_str());
        all_ok = all_ok && out.ok;
    }
    std::printf("acceptance: %s\n", all_ok ? "all 12 criteria passed" : "FAILED");
    return all_ok ? 0 : 1;
}

#include "jacobiwvn/potential.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jacobiwvn/errors.hpp"
#include "jacobiwvn/simulate.hpp"

namespace jacobiwvn {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

double trace_value(const SolutionTrace& trace, std::int64_t n) {
    for (const auto& [pos, value] : trace.samples)
        if (pos == n) return value;
    throw ValidationError("embed: trace lacks the head sample u_" + std::to_string(n));
}

bool negligible(double v, double scale) {
    return std::abs(v) <= 1e-300 + 1e-14 * scale;
}

}  // namespace

WvnPotential::WvnPotential(std::vector<WvnTerm> terms,
                           std::map<std::int64_t, double> overrides, double r)
    : terms_(std::move(terms)), overrides_(std::move(overrides)), r_(r) {
    for (std::size_t l = 0; l < terms_.size(); ++l) {
        const WvnTerm& t = terms_[l];
        if (!(t.c > 0.0))
            throw ValidationError("\"terms[" + std::to_string(l) + "].c\" must be > 0 (got " +
                                  std::to_string(t.c) + ")");
        if (!(t.omega > 0.0) || !(t.omega < kTwoPi))
            throw ValidationError("\"terms[" + std::to_string(l) +
                                  "].omega\" must lie in (0, 2 pi) (got " +
                                  std::to_string(t.omega) + ")");
    }
    std::int64_t expect = 1;
    for (const auto& [n, value] : overrides_) {
        (void)value;
        if (n != expect)
            throw ValidationError("\"overrides\" must cover a contiguous initial segment "
                                  "1..m (gap at n = " + std::to_string(expect) + ")");
        ++expect;
    }
}

double WvnPotential::q(std::int64_t n) const {
    if (n < 1)
        throw ValidationError("\"n\" must be >= 1 (got " + std::to_string(n) + ")");
    const auto it = overrides_.find(n);
    if (it != overrides_.end()) return it->second;
    double sum = 0.0;
    for (const WvnTerm& t : terms_) sum += t.c * std::sin(n * t.omega + t.phi);
    return sum / static_cast<double>(n);
}

void WvnPotential::set_override(std::int64_t n, double value) {
    if (n < 1)
        throw ValidationError("\"n\" must be >= 1 (got " + std::to_string(n) + ")");
    const std::int64_t hi = overrides_.empty() ? 0 : overrides_.rbegin()->first;
    if (n > hi + 1)
        throw ValidationError("\"overrides\" must stay a contiguous initial segment "
                              "(next free slot is n = " + std::to_string(hi + 1) + ")");
    overrides_[n] = value;
}

double WvnPotential::coupling_sum() const {
    double sum = 0.0;
    for (const WvnTerm& t : terms_) sum += std::abs(t.c);
    return sum;
}

EmbeddingResult embed_single(const PeriodicOperator& op, const ResonancePlan& plan,
                             double c, const SolutionTrace& trace,
                             std::optional<double> q1, std::optional<double> q2_free) {
    if (!(c > 0.0))
        throw ValidationError("\"c\" must be > 0 (got " + std::to_string(c) + ")");
    const double lambda = plan.lambda;
    if (std::abs(trace.lambda - lambda) > 1e-12 * std::max(1.0, std::abs(lambda)))
        throw ValidationError("embed_single: trace lambda differs from the plan lambda");

    const double a1 = op.a(1), a2 = op.a(2);
    const double b1 = op.b(1), b2 = op.b(2);
    const double u2 = trace_value(trace, 2);
    const double u3 = trace_value(trace, 3);

    EmbeddingResult out;
    out.potential = WvnPotential({{c, plan.omega, plan.phi}});

    if (u2 != 0.0) {
        if (q2_free)
            throw ValidationError("embed_single: q_2 is determined when u_2 != 0");
        const double q1v = q1.value_or(lambda - b1 + 1.0);
        if (std::abs(q1v - (lambda - b1)) <= 1e-12 * std::max(1.0, std::abs(lambda - b1)))
            throw ValidationError("embed_single: q_1 = lambda - b_1 leaves row one "
                                  "unsolvable for u_1");
        const double u1 = -a1 * u2 / (q1v + b1 - lambda);
        const double q2 = (lambda * u2 - a2 * u3 - a1 * u1 - b2 * u2) / u2;
        out.potential.set_override(1, q1v);
        out.potential.set_override(2, q2);
        out.heads.push_back({lambda, {u1, u2, u3}});
        out.branch = "u2_nonzero";
        out.free_parameters["q1"] = q1v;
    } else {
        if (q1 && std::abs(*q1 - (lambda - b1)) >
                      1e-12 * std::max(1.0, std::abs(lambda - b1)))
            throw ValidationError("embed_single: q_1 is pinned to lambda - b_1 "
                                  "when u_2 = 0");
        const double u1 = -a2 * u3 / a1;
        const double q2 = q2_free.value_or(0.0);
        out.potential.set_override(1, lambda - b1);
        out.potential.set_override(2, q2);
        out.heads.push_back({lambda, {u1, 0.0, u3}});
        out.branch = "u2_zero";
        out.free_parameters["q2_free"] = q2;
    }
    return out;
}

EmbeddingResult embed_pair(const PeriodicOperator& op,
                           const std::pair<ResonancePlan, ResonancePlan>& plans,
                           double c,
                           const std::pair<const SolutionTrace*, const SolutionTrace*>& traces) {
    if (!(c > 0.0))
        throw ValidationError("\"c\" must be > 0 (got " + std::to_string(c) + ")");
    if (plans.first.case_id != ResonanceCase::Case1 ||
        plans.second.case_id != ResonanceCase::Case1)
        throw ValidationError("embed_pair: both plans must use the single-quantised "
                              "positive-frequency case");
    const double scale_l = std::max({1.0, std::abs(plans.first.lambda),
                                     std::abs(plans.second.lambda)});
    if (std::abs(plans.first.lambda - plans.second.lambda) <= 1e-12 * scale_l)
        throw ValidationError("embed_pair: the two targets must be distinct");
    for (const auto* tr : {traces.first, traces.second})
        if (tr == nullptr) throw ValidationError("embed_pair: null trace");
    if (std::abs(traces.first->lambda - plans.first.lambda) > 1e-12 * scale_l ||
        std::abs(traces.second->lambda - plans.second.lambda) > 1e-12 * scale_l)
        throw ValidationError("embed_pair: trace lambdas differ from the plan lambdas");

    const double a2 = op.a(2), a3 = op.a(3), a4 = op.a(4);
    const double b1 = op.b(1), b2 = op.b(2), b3 = op.b(3), b4 = op.b(4);

    EmbeddingResult out;
    out.potential = WvnPotential({{c, plans.first.omega, plans.first.phi},
                                  {c, plans.second.omega, plans.second.phi}});

    // Working copies, possibly relabelled so solution one has u_3 != 0.
    double l1 = plans.first.lambda, l2 = plans.second.lambda;
    double u3_1 = trace_value(*traces.first, 3), u4_1 = trace_value(*traces.first, 4);
    double u3_2 = trace_value(*traces.second, 3), u4_2 = trace_value(*traces.second, 4);
    const double head_scale =
        std::max({std::abs(u3_1), std::abs(u4_1), std::abs(u3_2), std::abs(u4_2), 1.0});

    std::string retry_prefix;
    if (negligible(u3_1, head_scale) && negligible(u3_2, head_scale)) {
        // Both solutions vanish at site 3: shift q_4 and recover u_3 from row four.
        const double u5_1 = trace_value(*traces.first, 5);
        const double u5_2 = trace_value(*traces.second, 5);
        const double q4_base = out.potential.q(4);
        bool recovered = false;
        for (int attempt = 1; attempt <= 5 && !recovered; ++attempt) {
            const double delta = attempt * (1e-3 * std::abs(q4_base) + 1e-6);
            const double q4 = q4_base + delta;
            const double n3_1 = -((q4 + b4 - l1) * u4_1 + a4 * u5_1) / a3;
            const double n3_2 = -((q4 + b4 - l2) * u4_2 + a4 * u5_2) / a3;
            if (!negligible(n3_1, head_scale) || !negligible(n3_2, head_scale)) {
                u3_1 = n3_1;
                u3_2 = n3_2;
                out.free_parameters["delta_q4"] = delta;
                out.free_parameters["q4"] = q4;
                retry_prefix = "pair_q4_retry+";
                recovered = true;
            }
        }
        if (!recovered)
            throw DegeneracyError("embed_pair: both solutions vanish at sites 3 and 4; "
                                  "no q_4 shift separates them");
    }

    bool swapped = false;
    if (negligible(u3_1, head_scale)) {
        std::swap(l1, l2);
        std::swap(u3_1, u3_2);
        std::swap(u4_1, u4_2);
        swapped = true;
    }
    if (negligible(u3_1, head_scale))
        throw DegeneracyError("embed_pair: both solutions vanish at site 3");

    const double q3_generic = ((l1 - b3) * u3_1 - a3 * u4_1) / u3_1;

    // Non-degeneracy of the generic branch is a_2 u_2^{(2)} != 0 below.
    const double numer = (l2 - l1 + a3 * u4_1 / u3_1) * u3_2 - a3 * u4_2;
    const double numer_scale = std::abs(l2 - l1) * std::abs(u3_2) +
                               std::abs(a3 * u4_1 / u3_1) * std::abs(u3_2) +
                               std::abs(a3 * u4_2);
    const bool degenerate = std::abs(numer) <= 1e-10 * std::max(1.0, numer_scale);

    double u1_1{}, u2_1{}, u1_2{}, u2_2{}, q1v{}, q2v{}, q3v{}, r = 0.0;
    if (!degenerate) {
        q1v = l1 - b1;
        q3v = q3_generic;
        u2_1 = 0.0;
        u1_1 = -a2 * u3_1 / op.a(1);
        u2_2 = (l2 * u3_2 - a3 * u4_2 - (q3v + b3) * u3_2) / a2;
        u1_2 = op.a(1) * u2_2 / (l2 - l1);
        q2v = ((l2 - b2) * u2_2 - a2 * u3_2 - op.a(1) * u1_2) / u2_2;
        out.branch = retry_prefix + "pair_generic";
    } else {
        // Degenerate: shift q_3 by eps and split rows one and two with the root x of
        // x^2 - (l2 - l1) x + a1'^2 = 0, pulling a1' down to |l1 - l2|/2 first when
        // the off-diagonal is too large for a real root.
        double a1 = op.a(1);
        const double half_gap = std::abs(l1 - l2) / 2.0;
        if (a1 > half_gap) {
            r = half_gap - a1;
            a1 = half_gap;
            out.potential.set_r(r);
            out.free_parameters["r"] = r;
            out.branch = retry_prefix + "pair_degenerate_r";
        } else {
            out.branch = retry_prefix + "pair_degenerate_eps";
        }
        const double disc = (l2 - l1) * (l2 - l1) - 4.0 * a1 * a1;
        const double x = ((l2 - l1) + std::sqrt(std::max(0.0, disc))) / 2.0;

        double eps = 1.0;
        bool ok = false;
        for (int halve = 0; halve < 60 && !ok; ++halve, eps /= 2.0) {
            u1_1 = eps * a1 * u3_1 / (a2 * x);
            u1_2 = -eps * x * u3_2 / (a1 * a2);
            ok = std::abs(u1_1) > 1e-8 && std::abs(u1_2) > 1e-8;
        }
        if (!ok)
            throw DegeneracyError("embed_pair: no eps gives both solutions a "
                                  "nonvanishing first entry");
        eps *= 2.0;  // undo the post-success halving
        u1_1 = eps * a1 * u3_1 / (a2 * x);
        u1_2 = -eps * x * u3_2 / (a1 * a2);
        u2_1 = -eps * u3_1 / a2;
        u2_2 = -eps * u3_2 / a2;
        q1v = l1 - b1 + x;
        q2v = l2 - b2 - x + a2 * a2 / eps;
        q3v = q3_generic + eps;
        out.free_parameters["eps"] = eps;
        out.free_parameters["x"] = x;
    }

    out.potential.set_override(1, q1v);
    out.potential.set_override(2, q2v);
    out.potential.set_override(3, q3v);
    if (auto it = out.free_parameters.find("q4"); it != out.free_parameters.end())
        out.potential.set_override(4, it->second);
    if (swapped) out.free_parameters["swapped"] = 1.0;

    EmbeddingHead h1{l1, {u1_1, u2_1, u3_1}};
    EmbeddingHead h2{l2, {u1_2, u2_2, u3_2}};
    if (swapped) std::swap(h1, h2);
    out.heads.push_back(h1);
    out.heads.push_back(h2);
    return out;
}

}  // namespace jacobiwvn

#include "jacobiwvn/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "jacobiwvn/band_structure.hpp"
#include "jacobiwvn/errors.hpp"

namespace jacobiwvn {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

// Reduce x into (-pi, pi].
double reduce_mod_2pi(double x) {
    double r = std::remainder(x, kTwoPi);
    if (r <= -M_PI) r += kTwoPi;
    return r;
}

// Distance from x to the nearest multiple of 2 pi.
double reduce_abs(double x) { return std::abs(reduce_mod_2pi(x)); }

cplx case_sum(const ResonanceData& data, int t, ResonanceCase c, double omega, double phi) {
    cplx acc = 0.0;
    for (int j = 0; j < t; ++j) {
        const double arg = (t - j) * omega + phi;
        switch (c) {
            case ResonanceCase::Case1:
                acc += data.E[j] * std::polar(1.0, arg);
                break;
            case ResonanceCase::Case2:
                acc += data.E[j] * std::polar(1.0, -arg);
                break;
            case ResonanceCase::Case3:
                acc += data.E[j] * (std::polar(1.0, arg) - std::polar(1.0, -arg));
                break;
        }
    }
    return acc;
}

double case_omega(int t, ResonanceCase c, int k, double theta) {
    switch (c) {
        case ResonanceCase::Case1:
            return (kTwoPi * k - 2.0 * theta) / t;
        case ResonanceCase::Case2:
            return (2.0 * theta + kTwoPi * k) / t;
        case ResonanceCase::Case3:
            return (2.0 * k - 1) * M_PI / t;
    }
    return 0.0;
}

}  // namespace

ResonanceData resonance_data(const PeriodicOperator& op, const SpectralPoint& pt) {
    require_interior(op, pt);
    const int t = op.period();
    const Monodromy m = monodromy(op, pt.lambda);
    const cplx mu = *pt.mu;
    const double p1 = m.p1(), p2 = m.p2();
    if (std::abs(p2) < 1e-14)
        throw DomainError("resonance_data: monodromy corner entry vanishes at lambda = " +
                          std::to_string(pt.lambda));
    const PartialProducts pp = partial_products(op, pt.lambda);

    ResonanceData data;
    data.lambda = pt.lambda;
    data.theta = *pt.theta;
    data.mu = mu;
    data.C.resize(t);
    data.D.resize(t);
    data.E.resize(t);
    const cplx pref = std::norm(mu - p1) * mu / (2.0 * p2);
    for (int j = 0; j < t; ++j) {
        const cplx a2 = pp.left[j].m12, a4 = pp.left[j].m22;
        const cplx t3 = pp.right[j].m21, t4 = pp.right[j].m22;
        const cplx second = -a2 + a4 * p2 / (mu - p1);
        data.C[j] = pref * (t3 * p2 / (std::conj(mu) - p1) + t4) * second;
        data.D[j] = pref * (t3 * p2 / (mu - p1) + t4) * second;
        data.E[j] = data.D[j] / (2.0 * t * op.a(t - j));
        const double scale = 1e-14 * (1.0 + std::abs(p1) + std::abs(p2));
        if (std::abs(data.C[j]) <= scale || std::abs(data.D[j]) <= scale)
            throw NumericalError("resonance_data: site coefficient vanishes at j = " +
                                 std::to_string(j) + ", lambda = " +
                                 std::to_string(pt.lambda));
    }
    return data;
}

ResonancePlan plan_resonance(const PeriodicOperator& op, const SpectralPoint& pt,
                             const CaseRequest& req, double phi) {
    const ResonanceData data = resonance_data(op, pt);
    const int t = op.period();
    const double theta = data.theta;
    const bool at_half = std::abs(theta - M_PI / 2.0) < 1e-10;

    if (req.c == ResonanceCase::Case3) {
        if (!at_half)
            throw DomainError("plan_resonance: the double-quantisation case needs "
                              "theta = pi/2 (got theta = " + std::to_string(theta) + ")");
        if (std::abs(std::remainder(phi, M_PI)) < 1e-12)
            throw ValidationError("plan_resonance: phi in pi*Z makes the potential "
                                  "vanish in the double-quantisation case");
    } else if (at_half) {
        throw DomainError("plan_resonance: theta = pi/2 is doubly quantised; "
                          "request the combined case instead");
    }

    std::vector<int> candidates;
    if (req.k) {
        const int k = *req.k;
        const int klo = req.c == ResonanceCase::Case2 ? 0 : 1;
        const int khi = req.c == ResonanceCase::Case2 ? t - 1 : t;
        if (k < klo || k > khi)
            throw ValidationError("plan_resonance: k = " + std::to_string(k) +
                                  " outside " + std::to_string(klo) + ".." +
                                  std::to_string(khi));
        candidates.push_back(k);
    } else {
        const int klo = req.c == ResonanceCase::Case2 ? 0 : 1;
        const int khi = req.c == ResonanceCase::Case2 ? t - 1 : t;
        for (int k = klo; k <= khi; ++k) candidates.push_back(k);
    }

    ResonancePlan best;
    double best_abs = -1.0;
    for (const int k : candidates) {
        const double omega = case_omega(t, req.c, k, theta);
        const cplx value = case_sum(data, t, req.c, omega, phi);
        if (std::abs(value) > best_abs) {
            best_abs = std::abs(value);
            best.k = k;
            best.omega = omega;
            best.E_value = value;
        }
    }

    double escale = 0.0;
    for (const cplx& e : data.E) escale += std::abs(e);
    if (best_abs < 1e-12 * std::max(1.0, escale))
        throw DomainError("plan_resonance: resonance function vanishes at lambda = " +
                          std::to_string(pt.lambda));

    best.lambda = pt.lambda;
    best.theta = theta;
    best.case_id = req.c;
    best.phi = phi;
    best.decay_exponent_per_unit_c =
        req.c == ResonanceCase::Case3 ? best_abs : best_abs / std::sin(theta);
    best.c_threshold_l2 = 0.5 / best.decay_exponent_per_unit_c;
    return best;
}

cplx closed_form_E_oracle_mu(const PeriodicOperator& op, double lambda, cplx mu,
                             ClosedFormOracle which, double phi) {
    const cplx eiphi = std::polar(1.0, phi);
    if (which == ClosedFormOracle::T1) {
        if (op.period() != 1)
            throw DomainError("closed_form_E_oracle: T1 form needs period 1");
        return eiphi / (4.0 * op.a(1) * mu * mu);
    }
    if (op.period() != 2)
        throw DomainError("closed_form_E_oracle: T2 forms need period 2");
    if (op.b(1) != 0.0 || op.b(2) != 0.0)
        throw DomainError("closed_form_E_oracle: T2 forms need a zero diagonal");
    const double a1 = op.a(1), a2 = op.a(2);
    const cplx pref = (a1 + a2 * mu) / (8.0 * a1 * a1 * a2 * lambda * (a1 * mu + a2));
    const double l2 = lambda * lambda;
    if (which == ClosedFormOracle::T2A) {
        const cplx bracket = (l2 * (a1 + a2) - a2 * a2 * a2) / mu - mu * a1 * a1 * a2 -
                             2.0 * a2 * a2 * a1 + l2 * a1;
        return eiphi * pref * bracket;
    }
    const cplx bracket = (l2 * (a1 - a2) + a2 * a2 * a2) / mu + mu * a1 * a1 * a2 +
                         2.0 * a2 * a2 * a1 - l2 * a1;
    return eiphi * pref * bracket;
}

cplx closed_form_E_oracle(const PeriodicOperator& op, const SpectralPoint& pt,
                          ClosedFormOracle which, double phi) {
    if (pt.cls != PointClass::Elliptic || !pt.mu)
        throw DomainError("closed_form_E_oracle: requires an elliptic point");
    return closed_form_E_oracle_mu(op, pt.lambda, *pt.mu, which, phi);
}

ResonanceClasses partition_resonance_classes(const PeriodicOperator& op,
                                             const std::vector<double>& lambdas,
                                             double tol) {
    ResonanceClasses out;
    out.lambdas = lambdas;
    out.thetas.reserve(lambdas.size());
    for (const double l : lambdas) {
        const SpectralPoint pt = classify(op, l);
        if (pt.cls != PointClass::Elliptic)
            throw DomainError("partition_resonance_classes: lambda = " + std::to_string(l) +
                              " is not elliptic");
        out.thetas.push_back(*pt.theta);
    }
    const int n = static_cast<int>(lambdas.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const double d = std::abs(out.thetas[i] - out.thetas[j]);
            const double s = std::abs(out.thetas[i] + out.thetas[j] - M_PI);
            if (d < tol || s < tol) parent[find(i)] = find(j);
        }
    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[find(i)].push_back(i);
    for (auto& g : groups)
        if (!g.empty()) out.classes.push_back(std::move(g));
    for (const auto& cls : out.classes)
        if (static_cast<int>(cls.size()) > 2 * op.period())
            throw DomainError("partition_resonance_classes: class exceeds 2T members");
    return out;
}

std::vector<double> perturb_coefficients(const std::vector<std::vector<cplx>>& A,
                                         std::vector<double> f, double eps_budget) {
    const std::size_t n = f.size();
    if (A.size() != n)
        throw ValidationError("perturb_coefficients: matrix/vector size mismatch");
    for (const auto& row : A)
        if (row.size() != n)
            throw ValidationError("perturb_coefficients: matrix is not square");
    if (!(eps_budget > 0.0))
        throw ValidationError("perturb_coefficients: eps_budget must be positive");

    double scale = 0.0;
    for (const auto& row : A)
        for (const cplx& v : row) scale = std::max(scale, std::abs(v));
    for (const double v : f) scale = std::max(scale, std::abs(v));
    const double floor_ = 1e-13 * std::max(1.0, scale);

    auto apply = [&](const std::vector<double>& g) {
        std::vector<cplx> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) y[i] += A[i][j] * g[j];
        return y;
    };

    // Walk the zero entries in order; bumping f_j moves y_j off zero through the
    // nonzero diagonal, with the step halved until previously-good entries survive.
    double budget_left = eps_budget;
    for (std::size_t pass = 0; pass <= n; ++pass) {
        const std::vector<cplx> y = apply(f);
        std::size_t j0 = n;
        for (std::size_t j = 0; j < n; ++j)
            if (std::abs(y[j]) <= floor_) {
                j0 = j;
                break;
            }
        if (j0 == n) return f;
        if (std::abs(A[j0][j0]) <= floor_)
            throw NumericalError("perturb_coefficients: zero diagonal entry blocks the sweep");

        double step = budget_left / 2.0;
        bool placed = false;
        for (int halve = 0; halve < 60 && step > 0.0; ++halve, step /= 2.0) {
            std::vector<double> g = f;
            g[j0] += step;
            const std::vector<cplx> ytry = apply(g);
            bool ok = std::abs(ytry[j0]) > floor_;
            for (std::size_t j = 0; j < j0 && ok; ++j)
                if (std::abs(ytry[j]) <= floor_) ok = false;
            if (ok) {
                f = std::move(g);
                budget_left -= step;
                placed = true;
                break;
            }
        }
        if (!placed)
            throw NumericalError("perturb_coefficients: eps budget exhausted before "
                                 "all components became nonzero");
    }
    throw NumericalError("perturb_coefficients: sweep failed to terminate");
}

CoefficientScheme coefficient_scheme(const PeriodicOperator& op,
                                     const std::vector<ResonancePlan>& plans,
                                     double base, double class_tol) {
    if (plans.empty()) throw ValidationError("coefficient_scheme: no targets");
    if (!(base > 0.0)) throw ValidationError("coefficient_scheme: base must be positive");
    const int t = op.period();
    const int n = static_cast<int>(plans.size());

    std::vector<double> lambdas;
    lambdas.reserve(n);
    for (const auto& p : plans) lambdas.push_back(p.lambda);
    const ResonanceClasses classes = partition_resonance_classes(op, lambdas, class_tol);
    std::vector<int> class_of(n, -1);
    for (std::size_t ci = 0; ci < classes.classes.size(); ++ci)
        for (const int m : classes.classes[ci]) class_of[m] = static_cast<int>(ci);

    CoefficientScheme scheme;
    scheme.b.assign(n, 1.0);
    for (int k = 0; k < n; ++k) {
        double bk = 1.0;
        bool any = false;
        for (int j = 0; j < k; ++j) {
            if (class_of[j] == class_of[k]) continue;  // resonant pairs excluded
            const double diff = std::abs(std::sin(t * (plans[k].omega - plans[j].omega) / 2.0));
            const double sum = std::abs(std::sin(t * (plans[k].omega + plans[j].omega) / 2.0));
            bk = std::min(bk, std::min(diff, sum));
            any = true;
        }
        if (any && bk < 1e-12)
            throw ValidationError("coefficient_scheme: duplicate target (b_" +
                                  std::to_string(k + 1) + " = 0)");
        scheme.b[k] = bk;
    }

    scheme.c.resize(n);
    for (int k = 0; k < n; ++k)
        scheme.c[k] = base * std::min(1.0, scheme.b[k]) / double((k + 1) * (k + 1));

    // Per class, nudge couplings until every member's resonant sum is nonzero.
    for (const auto& cls : classes.classes) {
        if (cls.size() < 2) continue;
        std::vector<std::vector<cplx>> A(cls.size(), std::vector<cplx>(cls.size()));
        for (std::size_t r = 0; r < cls.size(); ++r) {
            const ResonancePlan& target = plans[cls[r]];
            const ResonanceData data =
                resonance_data(op, classify(op, target.lambda));
            for (std::size_t cidx = 0; cidx < cls.size(); ++cidx) {
                const ResonancePlan& src = plans[cls[cidx]];
                cplx entry = 0.0;
                const double plus = reduce_abs(2.0 * target.theta + t * src.omega);
                const double minus = reduce_abs(2.0 * target.theta - t * src.omega);
                if (minus < 1e-9)
                    for (int j = 0; j < t; ++j)
                        entry += data.E[j] * std::polar(1.0, -((t - j) * src.omega + src.phi));
                if (plus < 1e-9)
                    for (int j = 0; j < t; ++j)
                        entry += data.E[j] * std::polar(1.0, (t - j) * src.omega + src.phi);
                A[r][cidx] = entry;
            }
        }
        std::vector<double> f(cls.size());
        double fmin = 1e300;
        for (std::size_t r = 0; r < cls.size(); ++r) {
            f[r] = scheme.c[cls[r]];
            fmin = std::min(fmin, f[r]);
        }
        f = perturb_coefficients(A, std::move(f), 0.5 * fmin);
        for (std::size_t r = 0; r < cls.size(); ++r) scheme.c[cls[r]] = f[r];
    }

    for (int k = 0; k < n; ++k) {
        scheme.sum_c += scheme.c[k];
        scheme.sum_c_over_sin_half_typical +=
            scheme.c[k] / std::abs(std::sin(t * plans[k].omega / 2.0));
        scheme.sum_c_over_b += scheme.c[k] / scheme.b[k];
    }
    return scheme;
}

cplx resonance_sum_Y(const PeriodicOperator& op, const ResonancePlan& target,
                     const std::vector<ResonancePlan>& plans,
                     const std::vector<double>& c, double membership_tol) {
    if (plans.size() != c.size())
        throw ValidationError("resonance_sum_Y: plans/couplings size mismatch");
    const int t = op.period();
    const ResonanceData data = resonance_data(op, classify(op, target.lambda));

    cplx y = 0.0;
    double scale = 0.0;
    double esum = 0.0;
    for (const cplx& e : data.E) esum += std::abs(e);
    for (std::size_t l = 0; l < plans.size(); ++l) {
        const double omega = plans[l].omega, phi = plans[l].phi;
        const double plus = reduce_abs(2.0 * target.theta + t * omega);
        const double minus = reduce_abs(2.0 * target.theta - t * omega);
        if (minus < membership_tol)
            for (int j = 0; j < t; ++j)
                y += c[l] * data.E[j] * std::polar(1.0, -((t - j) * omega + phi));
        if (plus < membership_tol)
            for (int j = 0; j < t; ++j)
                y += c[l] * data.E[j] * std::polar(1.0, (t - j) * omega + phi);
        scale += c[l] * esum;
    }
    if (scale > 0.0 && std::abs(y) != 0.0 && std::abs(y) < 1e-12 * scale)
        throw NumericalError("resonance_sum_Y: resonant cancellation at lambda = " +
                             std::to_string(target.lambda) +
                             "; re-run coefficient perturbation");
    return y;
}

}  // namespace jacobiwvn

#include "jacobiwvn/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "jacobiwvn/errors.hpp"

namespace jacobiwvn {

PeriodicOperator::PeriodicOperator(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.empty())
        throw ValidationError("\"a\" must contain at least one entry");
    if (a_.size() != b_.size())
        throw ValidationError("\"a\" and \"b\" must have the same length (got " +
                              std::to_string(a_.size()) + " and " +
                              std::to_string(b_.size()) + ")");
    for (std::size_t i = 0; i < a_.size(); ++i) {
        if (!std::isfinite(a_[i]) || a_[i] <= 0.0)
            throw ValidationError("\"a[" + std::to_string(i + 1) + "]\" must be > 0 (got " +
                                  std::to_string(a_[i]) + ")");
        if (!std::isfinite(b_[i]))
            throw ValidationError("\"b[" + std::to_string(i + 1) + "]\" must be finite");
    }
}

double PeriodicOperator::max_a() const {
    return *std::max_element(a_.begin(), a_.end());
}
double PeriodicOperator::min_b() const {
    return *std::min_element(b_.begin(), b_.end());
}
double PeriodicOperator::max_b() const {
    return *std::max_element(b_.begin(), b_.end());
}

Mat2 transfer_matrix(const PeriodicOperator& op, int i, cplx lambda) {
    if (i < 1 || i > op.period())
        throw ValidationError("transfer_matrix: site index " + std::to_string(i) +
                              " outside 1.." + std::to_string(op.period()));
    const double ai = op.a(i), aim1 = op.a(i - 1), bi = op.b(i);
    return {0.0, 1.0, -aim1 / ai, (lambda - bi) / ai};
}

Monodromy monodromy(const PeriodicOperator& op, double lambda) {
    Mat2 m = transfer_matrix(op, 1, lambda);
    for (int i = 2; i <= op.period(); ++i) m = transfer_matrix(op, i, lambda) * m;
    return {m, lambda, m.trace().real()};
}

SpectralPoint classify(const PeriodicOperator& op, double lambda, double tol) {
    const Monodromy m = monodromy(op, lambda);
    SpectralPoint pt;
    pt.lambda = lambda;
    pt.trace = m.trace;
    const double excess = std::abs(m.trace) - 2.0;
    if (std::abs(excess) <= tol) {
        pt.cls = PointClass::Parabolic;
    } else if (excess > 0.0) {
        pt.cls = PointClass::Hyperbolic;
    } else {
        pt.cls = PointClass::Elliptic;
        const double half = std::clamp(m.trace / 2.0, -1.0, 1.0);
        const double theta = std::acos(half);
        pt.theta = theta;
        pt.mu = std::polar(1.0, theta);
    }
    return pt;
}

cplx floquet_mu_small(const PeriodicOperator& op, double lambda) {
    const double tr = monodromy(op, lambda).trace;
    const double half = tr / 2.0;
    if (std::abs(half) <= 1.0)
        return {half, std::sqrt(std::max(0.0, 1.0 - half * half))};
    const double root = std::sqrt(half * half - 1.0);
    return {half > 0.0 ? half - root : half + root, 0.0};
}

PartialProducts partial_products(const PeriodicOperator& op, double lambda) {
    const int t = op.period();
    PartialProducts pp;
    pp.lambda = lambda;
    pp.left.assign(t, Mat2::identity());
    pp.right.assign(t, Mat2::identity());
    // left[j] = B_T ... B_{T-j+1}: extend by one factor on the right per step.
    for (int j = 1; j < t; ++j)
        pp.left[j] = pp.left[j - 1] * transfer_matrix(op, t - j + 1, lambda);
    // right[j] = B_{T-j-1} ... B_1: right[t-1] = I, shrink from right[0] = B_{T-1}..B_1.
    for (int j = t - 2; j >= 0; --j)
        pp.right[j] = transfer_matrix(op, t - j - 1, lambda) * pp.right[j + 1];
    return pp;
}

Mat2 sigma_k(const PeriodicOperator& op, double lambda,
             const std::function<double(std::int64_t)>& q, std::int64_t k) {
    const int t = op.period();
    const PartialProducts pp = partial_products(op, lambda);
    Mat2 sum{};
    for (int j = 0; j < t; ++j) {
        const double qv = q(static_cast<std::int64_t>(t) * (k + 1) - j);
        if (qv == 0.0) continue;
        const Mat2 middle{0.0, 0.0, 0.0, qv / op.a(t - j)};
        sum = sum + pp.left[j] * middle * pp.right[j];
    }
    return sum;
}

Diagonalizer diagonalizer(const PeriodicOperator& op, const SpectralPoint& pt) {
    if (pt.cls != PointClass::Elliptic)
        throw DomainError("diagonalizer: requires an elliptic point (lambda = " +
                          std::to_string(pt.lambda) + ")");
    const Monodromy m = monodromy(op, pt.lambda);
    const cplx mu = *pt.mu;
    const double p1 = m.p1(), p2 = m.p2();
    if (std::abs(p2) < 1e-14)
        throw DomainError("diagonalizer: monodromy corner entry vanishes at lambda = " +
                          std::to_string(pt.lambda));
    Diagonalizer d;
    d.mu = mu;
    d.v = {p2 / (mu - p1), p2 / (std::conj(mu) - p1), 1.0, 1.0};
    d.v_inv = d.v.inverse();
    return d;
}

double trace_derivative(const PeriodicOperator& op, double lambda) {
    const int t = op.period();
    const PartialProducts pp = partial_products(op, lambda);
    // d tr M = sum_j tr(left[j] * dB_{T-j} * right[j]), dB_i = [[0,0],[0,1/a_i]].
    double acc = 0.0;
    for (int j = 0; j < t; ++j) {
        const Mat2 term = pp.left[j] * Mat2{0.0, 0.0, 0.0, 1.0 / op.a(t - j)} * pp.right[j];
        acc += term.trace().real();
    }
    return acc;
}

}  // namespace jacobiwvn

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "jacobiwvn/mat2.hpp"

namespace jacobiwvn {

// Period-T Jacobi operator: off-diagonal a_1..a_T (> 0), diagonal b_1..b_T,
// both extended T-periodically to all of n >= 1, with the convention a_0 = a_T.
class PeriodicOperator {
public:
    PeriodicOperator(std::vector<double> a, std::vector<double> b);

    int period() const { return static_cast<int>(a_.size()); }

    // 1-based periodic coefficient lookup; i may be any integer (a(0) == a(T)).
    double a(std::int64_t i) const { return a_[mod_index(i)]; }
    double b(std::int64_t i) const { return b_[mod_index(i)]; }

    const std::vector<double>& a_values() const { return a_; }
    const std::vector<double>& b_values() const { return b_; }

    double max_a() const;
    double min_b() const;
    double max_b() const;

private:
    std::size_t mod_index(std::int64_t i) const {
        const std::int64_t t = static_cast<std::int64_t>(a_.size());
        std::int64_t r = (i - 1) % t;
        if (r < 0) r += t;
        return static_cast<std::size_t>(r);
    }
    std::vector<double> a_, b_;
};

// One-step transfer matrix B_i(lambda) = [[0, 1], [-a_{i-1}/a_i, (lambda-b_i)/a_i]],
// so that (u_i, u_{i+1})^t = B_i (u_{i-1}, u_i)^t.  det B_i = a_{i-1}/a_i.
Mat2 transfer_matrix(const PeriodicOperator& op, int i, cplx lambda);

struct Monodromy {
    Mat2 m;           // B_T * ... * B_1
    double lambda{};  // evaluation point
    double trace{};   // real part of tr m (entries are exactly real for real lambda)

    double p1() const { return m.m11.real(); }
    double p2() const { return m.m12.real(); }
    double p3() const { return m.m21.real(); }
    double p4() const { return m.m22.real(); }
};

Monodromy monodromy(const PeriodicOperator& op, double lambda);

enum class PointClass { Hyperbolic, Elliptic, Parabolic };

// Real spectral point with Floquet data.  theta and mu are set only on elliptic
// points: theta = arccos(trace/2) in (0, pi), mu = e^{i theta} (Im mu > 0).
struct SpectralPoint {
    double lambda{};
    PointClass cls{PointClass::Hyperbolic};
    double trace{};
    std::optional<double> theta;
    std::optional<cplx> mu;
};

// |trace| within tol of 2 -> Parabolic (absolute tolerance).
SpectralPoint classify(const PeriodicOperator& op, double lambda, double tol = 1e-10);

// Floquet multiplier branch that decays as |lambda| -> inf (|mu| <= 1): for
// hyperbolic points the real root inside the unit disk, for elliptic e^{i theta}.
cplx floquet_mu_small(const PeriodicOperator& op, double lambda);

// Partial monodromy products at a fixed lambda, for j = 0..T-1:
//   left[j]  = B_T * ... * B_{T-(j-1)}   (j factors, identity at j = 0)
//   right[j] = B_{T-(j+1)} * ... * B_1   (T-1-j factors, identity at j = T-1)
// so left[j] * B_{T-j} * right[j] reassembles the monodromy for every j.
struct PartialProducts {
    double lambda{};
    std::vector<Mat2> left, right;
};

PartialProducts partial_products(const PeriodicOperator& op, double lambda);

// One-period perturbation block: q supplies the potential values and
//   Sigma_k = sum_j left[j] * [[0,0],[0, q_{T(k+1)-j}/a_{T-j}]] * right[j].
Mat2 sigma_k(const PeriodicOperator& op, double lambda,
             const std::function<double(std::int64_t)>& q, std::int64_t k);

// Eigenvector frame at an elliptic point: V = [[p2/(mu-p1), p2/(conj(mu)-p1)], [1, 1]]
// diagonalises the monodromy, V^{-1} M V = diag(mu, conj(mu)).
struct Diagonalizer {
    Mat2 v;
    Mat2 v_inv;
    cplx mu;
};

Diagonalizer diagonalizer(const PeriodicOperator& op, const SpectralPoint& pt);

// d/dlambda of tr M(lambda), assembled exactly from the partial products
// (dB_i/dlambda has the single entry 1/a_i at (2,2)).
double trace_derivative(const PeriodicOperator& op, double lambda);

}  // namespace jacobiwvn

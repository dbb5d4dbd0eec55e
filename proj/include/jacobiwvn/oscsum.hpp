#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "jacobiwvn/errors.hpp"

namespace jacobiwvn {

// Sum of the oscillatory tail  S = sum_{l>=0} e^{i l beta} / (n0 + l*stride),
// n0 > 0, stride > 0, e^{i beta} != 1.
//
// Strategy: sum leading terms directly until stride/(n |1-z|) <= 0.1, then apply
// repeated Abel summation,
//   sum z^l w_l = [w_0 - z * sum z^l (w_l - w_{l+1})] / (1 - z),
// four times; each transform multiplies the terms by O(stride/(n |1-z|)), so past
// the pre-advance point the transformed series converges absolutely like l^{-5}
// without cancellation.  The d-th forward difference of w_l = 1/(n + l s) is
// d! s^d / prod_{r=0..d}(n + (l+r)s), positive and decreasing in l, which gives a
// hard integral bound on every truncation remainder.
inline std::complex<double> osc_inverse_tail(double beta, double n0, double stride,
                                             double tol = 1e-13) {
    if (!(n0 > 0.0) || !(stride > 0.0))
        throw ValidationError("osc_inverse_tail: n0 and stride must be positive");
    const std::complex<double> z = std::polar(1.0, beta);
    const std::complex<double> one_minus_z = 1.0 - z;
    const double az1 = std::abs(one_minus_z);
    if (az1 < 1e-8)
        throw DomainError("osc_inverse_tail: frequency too close to a multiple of 2*pi");

    std::complex<double> direct = 0.0, zp = 1.0;
    double n = n0;
    for (std::int64_t l = 0; stride / (n * az1) > 0.1; ++l) {
        if (l >= 2'000'000)
            throw NumericalError(
                "osc_inverse_tail: near-resonant frequency, tail not evaluable");
        direct += zp / n;
        zp *= z;
        n += stride;
    }

    constexpr int depth = 4;
    auto diff_weight = [&](int d, std::int64_t l) {
        double num = 1.0, den = 1.0;
        for (int r = 1; r <= d; ++r) num *= r * stride;
        for (int r = 0; r <= d; ++r) den *= n + (double(l) + r) * stride;
        return num / den;
    };

    // Expanding the recursion `depth` times:
    //   S_tail = sum_{d<depth} (-z)^d/(1-z)^{d+1} * D^d w(0)
    //            + (-z/(1-z))^depth * sum_l z^l D^depth w(l).
    std::complex<double> head = 0.0;
    std::complex<double> coeff = 1.0 / one_minus_z;
    for (int d = 0; d < depth; ++d) {
        head += coeff * diff_weight(d, 0);
        coeff *= -z / one_minus_z;
    }
    coeff *= one_minus_z;  // coeff = (-z)^depth / (1-z)^depth

    const double scale = 1.0 / (n * az1);
    const double floor_ = tol * scale / std::abs(coeff);
    std::complex<double> tail = 0.0, zq = 1.0;
    for (std::int64_t l = 0; l < 4'000'000; ++l) {
        const double w = diff_weight(depth, l);
        tail += zq * w;
        // Remaining terms are positive, decreasing; integral comparison bounds
        // their sum by w * (n + (l+depth)*stride) / (depth*stride).
        if (w * (n + (double(l) + depth) * stride) / (depth * stride) < floor_) break;
        zq *= z;
    }
    return direct + zp * (head + coeff * tail);
}

// Tail of the classical oscillatory harmonic series, sum_{k>=n} e^{i k alpha}/k.
inline std::complex<double> zygmund_tail(double alpha, std::int64_t n) {
    if (n < 1) throw ValidationError("zygmund_tail: n must be >= 1");
    return std::polar(1.0, alpha * double(n)) * osc_inverse_tail(alpha, double(n), 1.0);
}

}  // namespace jacobiwvn

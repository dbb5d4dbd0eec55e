#pragma once

#include <cmath>
#include <complex>

#include "jacobiwvn/errors.hpp"

namespace jacobiwvn {

using cplx = std::complex<double>;

struct Vec2 {
    cplx x{0.0}, y{0.0};
};

inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(const cplx& s, const Vec2& v) { return {s * v.x, s * v.y}; }
inline double norm_max(const Vec2& v) { return std::max(std::abs(v.x), std::abs(v.y)); }

// Dense complex 2x2, value semantics.  Entry norm is max |entry|.
struct Mat2 {
    cplx m11{0.0}, m12{0.0}, m21{0.0}, m22{0.0};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    cplx trace() const { return m11 + m22; }
    cplx det() const { return m11 * m22 - m12 * m21; }

    Mat2 operator*(const Mat2& o) const {
        return {m11 * o.m11 + m12 * o.m21, m11 * o.m12 + m12 * o.m22,
                m21 * o.m11 + m22 * o.m21, m21 * o.m12 + m22 * o.m22};
    }
    Mat2 operator+(const Mat2& o) const {
        return {m11 + o.m11, m12 + o.m12, m21 + o.m21, m22 + o.m22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {m11 - o.m11, m12 - o.m12, m21 - o.m21, m22 - o.m22};
    }
    Mat2 operator*(const cplx& s) const { return {s * m11, s * m12, s * m21, s * m22}; }

    Vec2 apply(const Vec2& v) const {
        return {m11 * v.x + m12 * v.y, m21 * v.x + m22 * v.y};
    }

    Mat2 inverse() const {
        const cplx d = det();
        if (std::abs(d) < 1e-300)
            throw NumericalError("Mat2::inverse: matrix is singular");
        const cplx r = 1.0 / d;
        return {r * m22, -r * m12, -r * m21, r * m11};
    }

    double norm() const {
        return std::max(std::max(std::abs(m11), std::abs(m12)),
                        std::max(std::abs(m21), std::abs(m22)));
    }
};

inline Mat2 operator*(const cplx& s, const Mat2& m) { return m * s; }

}  // namespace jacobiwvn

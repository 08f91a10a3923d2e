#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "core/error.hpp"

namespace hop {

struct Vec2 {
    double x = 0, y = 0;
    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
    double x = 0, y = 0, z = 0;
    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Row-major 3x3 matrix.
struct Mat3 {
    std::array<double, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return r;
    }

    double& operator()(int r, int c) { return m[r * 3 + c]; }
    double operator()(int r, int c) const { return m[r * 3 + c]; }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
                r(i, j) = s;
            }
        return r;
    }

    Vec3 operator*(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }

    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
};

/// Rotation about the z axis, right-handed in (x, y, z) order.
inline Mat3 rot_z(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    Mat3 r = Mat3::identity();
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    return r;
}

/// Solve A x = b for a 3x3 system by Gaussian elimination with partial
/// pivoting. Throws on a (near-)singular matrix.
inline Vec3 solve3(Mat3 a, Vec3 b) {
    double rhs[3] = {b.x, b.y, b.z};
    double amax = 0;
    for (double v : a.m) amax = std::max(amax, std::fabs(v));
    const double pivot_floor = 1e-12 * std::max(amax, 1.0);
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::fabs(a(r, col)) > std::fabs(a(piv, col))) piv = r;
        if (std::fabs(a(piv, col)) < pivot_floor) fail_data("singular linear system");
        if (piv != col) {
            for (int c = 0; c < 3; ++c) std::swap(a(col, c), a(piv, c));
            std::swap(rhs[col], rhs[piv]);
        }
        for (int r = col + 1; r < 3; ++r) {
            double f = a(r, col) / a(col, col);
            for (int c = col; c < 3; ++c) a(r, c) -= f * a(col, c);
            rhs[r] -= f * rhs[col];
        }
    }
    double x[3];
    for (int r = 2; r >= 0; --r) {
        double s = rhs[r];
        for (int c = r + 1; c < 3; ++c) s -= a(r, c) * x[c];
        x[r] = s / a(r, r);
    }
    return {x[0], x[1], x[2]};
}

/// Eigen-decomposition of a symmetric n x n matrix (row-major) by cyclic
/// Jacobi rotations. Returns eigenvalues ascending with matching
/// eigenvectors as columns of `vecs`.
inline void jacobi_symmetric_eig(std::vector<double> a, int n,
                                 std::vector<double>& vals,
                                 std::vector<double>& vecs) {
    vecs.assign(size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i) vecs[size_t(i) * n + i] = 1.0;
    auto A = [&](int r, int c) -> double& { return a[size_t(r) * n + c]; };
    auto V = [&](int r, int c) -> double& { return vecs[size_t(r) * n + c]; };

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = A(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // sort ascending, reorder eigenvector columns to match
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a[size_t(order[j]) * n + order[j]] < a[size_t(order[i]) * n + order[i]])
                std::swap(order[i], order[j]);
    vals.resize(n);
    std::vector<double> sorted(size_t(n) * n);
    for (int j = 0; j < n; ++j) {
        vals[j] = a[size_t(order[j]) * n + order[j]];
        for (int r = 0; r < n; ++r) sorted[size_t(r) * n + j] = vecs[size_t(r) * n + order[j]];
    }
    vecs.swap(sorted);
}

}  // namespace hop

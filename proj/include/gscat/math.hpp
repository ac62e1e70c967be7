#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace gscat {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec3{x / n, y / n, z / n} : Vec3{0.0, 0.0, 0.0};
    }
};

struct Mat3 {
    // row-major
    double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

    Vec3 operator*(Vec3 v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }

    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
};

// Rotation matrix from a (w,x,y,z) quaternion; the quaternion is normalized here,
// not at load time, so file round-trips stay lossless.
inline Mat3 rotation_from_quaternion(double w, double x, double y, double z) {
    double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n > 0.0) {
        w /= n;
        x /= n;
        y /= n;
        z /= n;
    } else {
        w = 1.0;
    }
    Mat3 r;
    r.m[0][0] = 1 - 2 * (y * y + z * z);
    r.m[0][1] = 2 * (x * y - w * z);
    r.m[0][2] = 2 * (x * z + w * y);
    r.m[1][0] = 2 * (x * y + w * z);
    r.m[1][1] = 1 - 2 * (x * x + z * z);
    r.m[1][2] = 2 * (y * z - w * x);
    r.m[2][0] = 2 * (x * z - w * y);
    r.m[2][1] = 2 * (y * z + w * x);
    r.m[2][2] = 1 - 2 * (x * x + y * y);
    return r;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct SymEig2 {
    double l1 = 0.0;  // larger eigenvalue
    double l2 = 0.0;
    Vec2 axis{1.0, 0.0};  // unit eigenvector of l1
};

// Eigen-decomposition of the symmetric 2x2 matrix [[a, b], [b, c]].
inline SymEig2 eigen_sym2(double a, double b, double c) {
    SymEig2 e;
    double tr = a + c;
    double disc = std::sqrt(std::max(0.0, (a - c) * (a - c) / 4.0 + b * b));
    e.l1 = tr / 2.0 + disc;
    e.l2 = tr / 2.0 - disc;
    if (b != 0.0) {
        Vec2 v{e.l1 - c, b};
        double n = v.norm();
        e.axis = {v.x / n, v.y / n};
    } else {
        e.axis = a >= c ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    }
    return e;
}

// Round half to even, independent of the FP environment's rounding mode.
inline double round_half_even(double x) {
    double lo = std::floor(x);
    double frac = x - lo;
    if (frac > 0.5) return lo + 1.0;
    if (frac < 0.5) return lo;
    return std::fmod(lo, 2.0) == 0.0 ? lo : lo + 1.0;
}

}  // namespace gscat

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace thermorel {

/// Invalid user input or violated precondition (maps to CLI exit code 2).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Deformation map rejected: folded cells, norm bound or volume constraint.
class AdmissibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver breakdown or non-convergence (maps to CLI exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Point/vector in up to three dimensions. 2D geometry leaves z = 0.
struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3 operator-() const { return {-x, -y, -z}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Row-major 3x3 matrix; 2D tensors occupy the upper-left block.
struct Mat3 {
    std::array<double, 9> a{};

    static Mat3 identity() {
        Mat3 m;
        m.a = {1, 0, 0, 0, 1, 0, 0, 0, 1};
        return m;
    }
    static Mat3 zero() { return Mat3{}; }

    double operator()(int i, int j) const { return a[3 * i + j]; }
    double& operator()(int i, int j) { return a[3 * i + j]; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] + o.a[i];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] - o.a[i];
        return r;
    }
    Mat3 operator*(double s) const {
        Mat3 r;
        for (int i = 0; i < 9; ++i) r.a[i] = a[i] * s;
        return r;
    }
    Mat3& operator+=(const Mat3& o) {
        for (int i = 0; i < 9; ++i) a[i] += o.a[i];
        return *this;
    }

    Vec3 mul(const Vec3& v) const {
        return {a[0] * v.x + a[1] * v.y + a[2] * v.z,
                a[3] * v.x + a[4] * v.y + a[5] * v.z,
                a[6] * v.x + a[7] * v.y + a[8] * v.z};
    }

    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }

    double trace() const { return a[0] + a[4] + a[8]; }

    double ddot(const Mat3& o) const {
        double s = 0;
        for (int i = 0; i < 9; ++i) s += a[i] * o.a[i];
        return s;
    }

    double frobenius() const { return std::sqrt(ddot(*this)); }

    /// Determinant of the upper-left dim x dim block.
    double det(int dim) const {
        if (dim == 2) return a[0] * a[4] - a[1] * a[3];
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    }

    Mat3 sym() const {
        Mat3 r = *this + transpose();
        return r * 0.5;
    }
};

inline Mat3 outer(const Vec3& u, const Vec3& v) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = u[i] * v[j];
    return m;
}

/// C-infinity transition: 0 for t <= 0, 1 for t >= 1, built from exp(-1/t).
/// First and second derivatives are analytic; used by deformation bases and
/// manufactured-solution fixtures that need smooth cutoffs.
struct SmoothStep {
    static double f(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
    static double f1(double t) { return t > 0.0 ? f(t) / (t * t) : 0.0; }
    static double f2(double t) {
        return t > 0.0 ? f(t) * (1.0 / (t * t * t * t) - 2.0 / (t * t * t)) : 0.0;
    }

    static double value(double t) {
        if (t <= 0.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double g = f(t), h = f(1.0 - t);
        return g / (g + h);
    }
    static double d1(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double g = f(t), h = f(1.0 - t);
        const double gp = f1(t), hp = -f1(1.0 - t);
        const double s = g + h;
        return (gp * s - g * (gp + hp)) / (s * s);
    }
    static double d2(double t) {
        if (t <= 0.0 || t >= 1.0) return 0.0;
        const double g = f(t), h = f(1.0 - t);
        const double gp = f1(t), hp = -f1(1.0 - t);
        const double gpp = f2(t), hpp = f2(1.0 - t);
        const double s = g + h, sp = gp + hp, spp = gpp + hpp;
        // d2 of g/s by quotient rule
        return (gpp * s - g * spp) / (s * s) - 2.0 * sp * (gp * s - g * sp) / (s * s * s);
    }
};

/// Radial plateau bump: 0 on [0,a], rises on [a,b], 1 on [b,c], falls on [c,d], 0 beyond.
struct RadialBump {
    double a, b, c, d;

    double value(double r) const {
        return SmoothStep::value((r - a) / (b - a)) * SmoothStep::value((d - r) / (d - c));
    }
    double d1(double r) const {
        const double up = SmoothStep::value((r - a) / (b - a));
        const double dn = SmoothStep::value((d - r) / (d - c));
        const double up1 = SmoothStep::d1((r - a) / (b - a)) / (b - a);
        const double dn1 = -SmoothStep::d1((d - r) / (d - c)) / (d - c);
        return up1 * dn + up * dn1;
    }
    double d2(double r) const {
        const double wa = b - a, wd = d - c;
        const double up = SmoothStep::value((r - a) / wa);
        const double dn = SmoothStep::value((d - r) / wd);
        const double up1 = SmoothStep::d1((r - a) / wa) / wa;
        const double dn1 = -SmoothStep::d1((d - r) / wd) / wd;
        const double up2 = SmoothStep::d2((r - a) / wa) / (wa * wa);
        const double dn2 = SmoothStep::d2((d - r) / wd) / (wd * wd);
        return up2 * dn + 2.0 * up1 * dn1 + up * dn2;
    }
};

/// Full-precision formatting used by every writer so reruns are byte-identical.
inline std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace thermorel

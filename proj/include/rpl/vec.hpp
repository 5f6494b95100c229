#pragma once

#include <cmath>

namespace rpl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr bool operator==(const Vec2& o) const = default;

    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    constexpr double norm2() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm2()); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr bool operator==(const Vec3& o) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr double norm2() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm2()); }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Mat2 {
    // row-major
    double m00 = 1.0, m01 = 0.0;
    double m10 = 0.0, m11 = 1.0;

    constexpr Vec2 apply(const Vec2& v) const {
        return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
    }
    constexpr double det() const { return m00 * m11 - m01 * m10; }
};

struct Mat3 {
    // row-major
    double m[9] = {1, 0, 0, 0, 1, 0, 0, 0, 1};

    constexpr Vec3 apply(const Vec3& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    constexpr double det() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) -
               m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
    static constexpr Mat3 diagonal(double a, double b, double c) {
        Mat3 d;
        d.m[0] = a; d.m[4] = b; d.m[8] = c;
        return d;
    }
};

} // namespace rpl

#pragma once

#include <cmath>

namespace qnmf {

// q = w + x*i + y*j + z*k with Hamilton's rules i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
    double w{0.0}, x{0.0}, y{0.0}, z{0.0};

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w{w_}, x{x_}, y{y_}, z{z_} {}

    static constexpr Quaternion real(double v) { return {v, 0.0, 0.0, 0.0}; }

    constexpr bool operator==(const Quaternion&) const = default;

    constexpr Quaternion operator+(const Quaternion& o) const {
        return {w + o.w, x + o.x, y + o.y, z + o.z};
    }
    constexpr Quaternion operator-(const Quaternion& o) const {
        return {w - o.w, x - o.x, y - o.y, z - o.z};
    }
    constexpr Quaternion operator-() const { return {-w, -x, -y, -z}; }

    constexpr Quaternion& operator+=(const Quaternion& o) {
        w += o.w; x += o.x; y += o.y; z += o.z;
        return *this;
    }
    constexpr Quaternion& operator-=(const Quaternion& o) {
        w -= o.w; x -= o.x; y -= o.y; z -= o.z;
        return *this;
    }

    // Hamilton product; non-commutative (ij = k = -ji).
    constexpr Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }

    constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
    constexpr Quaternion& operator*=(double s) {
        w *= s; x *= s; y *= s; z *= s;
        return *this;
    }

    constexpr Quaternion conj() const { return {w, -x, -y, -z}; }

    constexpr double norm_sq() const { return w * w + x * x + y * y + z * z; }
    double abs() const { return std::sqrt(norm_sq()); }

    bool finite() const {
        return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

constexpr Quaternion operator*(double s, const Quaternion& q) { return q * s; }

inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) { return a * b; }
inline Quaternion quat_conj(const Quaternion& a) { return a.conj(); }
inline double quat_modulus(const Quaternion& a) { return a.abs(); }

} // namespace qnmf

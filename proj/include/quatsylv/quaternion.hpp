#pragma once

#include <cmath>
#include <iosfwd>

namespace quatsylv {

// One scalar of the division algebra H: w + x*i + y*j + z*k with
// i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
    double w = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Quaternion() = default;
    constexpr Quaternion(double w_, double x_, double y_, double z_)
        : w(w_), x(x_), y(y_), z(z_) {}

    static constexpr Quaternion real(double v) { return {v, 0.0, 0.0, 0.0}; }

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
    // Hamilton product; non-commutative.
    constexpr Quaternion operator*(const Quaternion& o) const {
        return {w * o.w - x * o.x - y * o.y - z * o.z,
                w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w};
    }
    constexpr Quaternion operator*(double s) const { return {w * s, x * s, y * s, z * s}; }

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    constexpr double norm_sq() const { return w * w + x * x + y * y + z * z; }
    constexpr bool is_zero() const { return w == 0.0 && x == 0.0 && y == 0.0 && z == 0.0; }
};

constexpr Quaternion qmul(const Quaternion& a, const Quaternion& b) { return a * b; }

constexpr Quaternion qconj(const Quaternion& a) { return {a.w, -a.x, -a.y, -a.z}; }

// Inverse of a nonzero quaternion: conj(q) / |q|^2.
inline Quaternion qinv(const Quaternion& a) {
    const double n2 = a.norm_sq();
    return {a.w / n2, -a.x / n2, -a.y / n2, -a.z / n2};
}

enum class EtaAxis { i, j, k };

// -eta * conj(a) * eta: fixes the real part and the two imaginary axes
// orthogonal to eta, negates the eta axis.
constexpr Quaternion eta_conj(const Quaternion& a, EtaAxis eta) {
    switch (eta) {
        case EtaAxis::i: return {a.w, -a.x, a.y, a.z};
        case EtaAxis::j: return {a.w, a.x, -a.y, a.z};
        case EtaAxis::k: return {a.w, a.x, a.y, -a.z};
    }
    return a;
}

constexpr const char* to_string(EtaAxis eta) {
    switch (eta) {
        case EtaAxis::i: return "i";
        case EtaAxis::j: return "j";
        case EtaAxis::k: return "k";
    }
    return "?";
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q);

}  // namespace quatsylv

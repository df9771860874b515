// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace sphera {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double four_pi = 4.0 * std::numbers::pi;

// Colatitude/longitude pair. theta is clamped to [0, pi], phi reduced to [0, 2pi).
struct Angle {
    double theta = 0.0;
    double phi = 0.0;

    Angle() = default;
    Angle(double th, double ph) : theta(clamp_theta(th)), phi(reduce_phi(ph)) {}

    static double clamp_theta(double th) {
        if (std::isnan(th)) throw std::domain_error("Angle: theta is NaN");
        return th < 0.0 ? 0.0 : (th > pi ? pi : th);
    }
    static double reduce_phi(double ph) {
        if (!std::isfinite(ph)) throw std::domain_error("Angle: phi is not finite");
        double r = std::fmod(ph, two_pi);
        if (r < 0.0) r += two_pi;
        if (r >= two_pi) r = 0.0;
        return r;
    }
};

// Point on the unit sphere carrying both angular and Cartesian views.
class UnitVector {
  public:
    UnitVector() : UnitVector(Angle{0.0, 0.0}) {}

    explicit UnitVector(Angle a) : ang_(a) {
        double st = std::sin(a.theta);
        xyz_ = Vec3(st * std::cos(a.phi), st * std::sin(a.phi), std::cos(a.theta));
    }

    static UnitVector from_angles(double theta, double phi) { return UnitVector(Angle(theta, phi)); }

    static UnitVector from_cartesian(double x, double y, double z) {
        double r = std::sqrt(x * x + y * y + z * z);
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::domain_error("UnitVector: cannot normalize a zero or non-finite vector");
        x /= r;
        y /= r;
        z /= r;
        UnitVector u;
        u.ang_ = Angle(std::atan2(std::hypot(x, y), z), std::atan2(y, x));
        u.xyz_ = Vec3(x, y, z);
        return u;
    }
    static UnitVector from_cartesian(const Vec3& v) { return from_cartesian(v.x(), v.y(), v.z()); }

    double theta() const { return ang_.theta; }
    double phi() const { return ang_.phi; }
    const Angle& angle() const { return ang_; }
    const Vec3& cartesian() const { return xyz_; }
    double x() const { return xyz_.x(); }
    double y() const { return xyz_.y(); }
    double z() const { return xyz_.z(); }

    double dot(const UnitVector& o) const { return xyz_.dot(o.xyz_); }

  private:
    Angle ang_;
    Vec3 xyz_;
};

inline const UnitVector north_pole{};

// Active z-y-z Euler rotation g = Rz(alpha) Ry(beta) Rz(gamma).
struct EulerAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};

inline Mat3 rotation_z(double a) {
    Mat3 r;
    double c = std::cos(a), s = std::sin(a);
    r << c, -s, 0, s, c, 0, 0, 0, 1;
    return r;
}

inline Mat3 rotation_y(double b) {
    Mat3 r;
    double c = std::cos(b), s = std::sin(b);
    r << c, 0, s, 0, 1, 0, -s, 0, c;
    return r;
}

inline Mat3 rotation_matrix(const EulerAngles& e) {
    return rotation_z(e.alpha) * rotation_y(e.beta) * rotation_z(e.gamma);
}

inline EulerAngles euler_from_matrix(const Mat3& r) {
    EulerAngles e;
    double cb = std::clamp(r(2, 2), -1.0, 1.0);
    e.beta = std::acos(cb);
    double sb = std::sqrt(r(0, 2) * r(0, 2) + r(1, 2) * r(1, 2));
    if (sb > 1e-12) {
        e.alpha = std::atan2(r(1, 2), r(0, 2));
        e.gamma = std::atan2(r(2, 1), -r(2, 0));
    } else {
        // Gimbal lock: only alpha +/- gamma is defined; put it all in alpha.
        e.alpha = cb > 0.0 ? std::atan2(r(1, 0), r(0, 0)) : std::atan2(-r(1, 0), -r(0, 0));
        e.gamma = 0.0;
    }
    return e;
}

// Rotation taking `axis` to the north pole along the great circle through both.
inline Mat3 rotation_to_north(const UnitVector& axis) {
    // g maps N to axis when g = Rz(phi) Ry(theta); its transpose maps axis to N.
    return (rotation_z(axis.phi()) * rotation_y(axis.theta())).transpose();
}

inline UnitVector rotate(const Mat3& r, const UnitVector& u) {
    return UnitVector::from_cartesian(r * u.cartesian());
}

inline bool is_orthonormal(const Mat3& m, double tol = 1e-12) {
    return ((m.transpose() * m) - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace sphera

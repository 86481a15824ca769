#pragma once

#include <cmath>
#include <numbers>

#include "geodephase/vec3.hpp"

namespace geodephase {

// Unit quaternion representing an SU(2) element through the mapping
//   (w, v)  <->  w*1 - i (v_x s_x + v_y s_y + v_z s_z),
// where s are the Pauli matrices. With this mapping the Hamilton product
// equals the 2x2 matrix product, and axis_angle(n, phi) is exp(-i phi/2 n.s),
// whose adjoint action rotates a polarization vector actively by +phi about n
// (right-hand rule). The double cover (q vs -q) is observably irrelevant:
// only the adjoint action on 3-vectors is exposed as physics.
class Rotor {
  public:
    Rotor() = default;  // identity

    static Rotor axis_angle(const Vec3& axis, double angle) {
        const Vec3 n = axis.normalized();
        const double h = 0.5 * angle;
        return Rotor(std::cos(h), n * std::sin(h));
    }

    // Rotation by |phi| about phi/|phi|; identity for the zero vector.
    static Rotor from_rotation_vector(const Vec3& phi) {
        const double a = phi.norm();
        if (a == 0.0) return Rotor();
        const double s = std::sin(0.5 * a) / a;
        return Rotor(std::cos(0.5 * a), phi * s);
    }

    static Rotor from_components(double w, double x, double y, double z) {
        Rotor r(w, {x, y, z});
        return r.renormalized();
    }

    double w() const { return w_; }
    const Vec3& vec() const { return v_; }

    // Canonical form: angle in [0, 2*pi), axis unit (z-hat for the identity).
    double angle() const {
        const double a = 2.0 * std::atan2(v_.norm(), w_);
        return a >= 2.0 * std::numbers::pi ? 0.0 : a;
    }
    Vec3 axis() const {
        const double n = v_.norm();
        return n > 0.0 ? Vec3{v_.x / n, v_.y / n, v_.z / n} : kZAxis;
    }

    double norm() const { return std::sqrt(w_ * w_ + v_.norm2()); }

    Rotor renormalized() const {
        const double inv = 1.0 / norm();
        return Rotor(w_ * inv, v_ * inv);
    }

    // Hamilton product without renormalization; for long chains use
    // RotorChain, which renormalizes on a fixed cadence.
    friend Rotor raw_product(const Rotor& a, const Rotor& b) {
        return Rotor(a.w_ * b.w_ - a.v_.dot(b.v_),
                     a.v_ * b.w_ + b.v_ * a.w_ + a.v_.cross(b.v_));
    }

  private:
    Rotor(double w, const Vec3& v) : w_(w), v_(v) {}

    double w_ = 1.0;
    Vec3 v_{0.0, 0.0, 0.0};
};

// Action equals "apply b, then a".
inline Rotor compose(const Rotor& a, const Rotor& b) {
    return raw_product(a, b).renormalized();
}

inline Rotor inverse(const Rotor& r) {
    return Rotor::from_components(r.w(), -r.vec().x, -r.vec().y, -r.vec().z);
}

// Adjoint (active) rotation of a 3-vector: u' = u + 2w (v x u) + 2 v x (v x u).
inline Vec3 apply(const Rotor& r, const Vec3& u) {
    const Vec3 t = r.vec().cross(u);
    return u + 2.0 * r.w() * t + 2.0 * r.vec().cross(t);
}

// State of the pseudo spin-1/2: u = Tr[rho sigma], |u| <= 1 (=1 when pure).
// The density operator (1 + u.sigma)/2 is never materialized.
struct Polarization {
    Vec3 u;

    double z() const { return u.z; }
    double norm() const { return u.norm(); }
};

inline Polarization apply(const Rotor& r, const Polarization& p) {
    return Polarization{apply(r, p.u)};
}

// Left-accumulating product of rotors (newest factor acts last) with
// renormalization every kRenormEvery factors to bound norm drift.
class RotorChain {
  public:
    static constexpr int kRenormEvery = 1024;

    RotorChain() = default;
    explicit RotorChain(const Rotor& init) : total_(init) {}

    void push(const Rotor& r) {
        total_ = raw_product(r, total_);
        if (++since_renorm_ >= kRenormEvery) {
            total_ = total_.renormalized();
            since_renorm_ = 0;
        }
    }

    Rotor value() const { return total_.renormalized(); }

  private:
    Rotor total_;
    int since_renorm_ = 0;
};

}  // namespace geodephase

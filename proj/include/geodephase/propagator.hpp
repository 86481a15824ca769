#pragma once

#include <span>

#include "geodephase/gamma.hpp"
#include "geodephase/su2.hpp"

namespace geodephase {

// One reorientation of the momentum direction: rotation by theta about a unit
// axis given in the local frame, where the momentum is along Z. The axis is
// confined to the local XY plane (a reorientation axis has no component along
// the momentum itself); axis || Z events would act as the identity on u_Z for
// an axial tensor.
struct CollisionEvent {
    Vec3 axis;        // unit, local frame, axis.z == 0
    double theta;     // total rotation angle, in (-pi, pi]
    double duration;  // collision time delta_t_c > 0

    double angular_speed() const { return theta / duration; }
    bool valid(double tol = 1e-12) const;
};

// Instantaneous effective dynamics: angular velocity of the moving frame
// (components in that frame) plus the coupling tensor. Generates the per-step
// propagator exp[+i (dt/2) (omega o gamma).sigma].
struct EffectiveHamiltonianSample {
    Vec3 omega;
    GammaTensor gamma;
};

// Componentwise scaling by the principal values: (g_perp wx, g_perp wy, g_par wz).
inline Vec3 gamma_scaled(const GammaTensor& g, const Vec3& omega) {
    return {g.gamma_perp * omega.x, g.gamma_perp * omega.y, g.gamma_par * omega.z};
}

// Exact propagator for one piecewise-constant step: exp[+i (dt/2) (w o g).sigma].
// Equals the precession of u about -(w o g) by |w o g| dt; the overall sign is
// pinned by the fixed-axis closed forms below and the 2x2 matrix oracle.
inline Rotor step_rotor(const Vec3& omega, double dt, const GammaTensor& g) {
    return Rotor::from_rotation_vector(gamma_scaled(g, omega) * -dt);
}

// Same step with gamma = 1: the rotor tracking the frame rotation itself.
inline Rotor frame_step_rotor(const Vec3& omega, double dt) {
    return Rotor::from_rotation_vector(omega * -dt);
}

// Moving-frame propagator of a whole collision: rotation angle theta*gamma_perp
// about the event axis. Acting on u = z-hat gives u_Z = cos(theta*gamma_perp).
Rotor collision_rotor_m_frame(const CollisionEvent& e, const GammaTensor& g);

// Frame rotation accumulated over the collision (angle theta about the axis).
Rotor collision_frame_rotor(const CollisionEvent& e);

// Local(lab)-frame propagator of a collision: the frame rotation is undone,
// leaving rotation angle theta*delta_gamma_perp. Acting on u = z-hat gives
// u_Z = cos(theta*delta_gamma_perp). Built from the same composition as
// to_lab_frame so the two stay consistent by construction.
Rotor collision_rotor_lab_frame(const CollisionEvent& e, const GammaTensor& g);

// Undo an accumulated frame rotation: compose(inverse(frame_rotation), m_rotor).
inline Rotor to_lab_frame(const Rotor& m_rotor, const Rotor& frame_rotation) {
    return compose(inverse(frame_rotation), m_rotor);
}

// Ordered product of per-step rotors over a sampled effective Hamiltonian,
// each step exact, first order in the wander of the rotation axis.
// Throws std::invalid_argument on an empty sequence or dt <= 0.
Rotor integrate_piecewise(std::span<const EffectiveHamiltonianSample> samples,
                          double dt);

}  // namespace geodephase

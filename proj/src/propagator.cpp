#include "geodephase/propagator.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geodephase {

bool CollisionEvent::valid(double tol) const {
    if (!(duration > 0.0)) return false;
    if (std::abs(axis.norm() - 1.0) > tol) return false;
    if (std::abs(axis.z) > tol) return false;
    return theta > -std::numbers::pi - tol &&
           theta <= std::numbers::pi + tol;
}

Rotor collision_rotor_m_frame(const CollisionEvent& e, const GammaTensor& g) {
    return Rotor::from_rotation_vector(gamma_scaled(g, e.axis) * -e.theta);
}

Rotor collision_frame_rotor(const CollisionEvent& e) {
    return Rotor::from_rotation_vector(e.axis * -e.theta);
}

Rotor collision_rotor_lab_frame(const CollisionEvent& e, const GammaTensor& g) {
    return to_lab_frame(collision_rotor_m_frame(e, g), collision_frame_rotor(e));
}

Rotor integrate_piecewise(std::span<const EffectiveHamiltonianSample> samples,
                          double dt) {
    if (samples.empty()) {
        throw std::invalid_argument("integrate_piecewise: empty sample sequence");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("integrate_piecewise: dt must be positive");
    }
    RotorChain chain;
    for (const auto& s : samples) {
        chain.push(step_rotor(s.omega, dt, s.gamma));
    }
    return chain.value();
}

}  // namespace geodephase

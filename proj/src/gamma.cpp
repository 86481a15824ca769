#include "geodephase/gamma.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace geodephase {

bool GammaTensor::first_order_valid() const {
    return std::abs(delta_gamma_perp()) < 1.0 && std::abs(delta_gamma_par()) < 1.0;
}

GammaTensor from_delta_g(double dg_perp, double dg_par) {
    return GammaTensor{1.0 + dg_par, 1.0 + dg_perp};
}

GammaTensor jones_pines(double nuclear_spin_i) {
    const double doubled = 2.0 * nuclear_spin_i;
    const double nearest_odd = 2.0 * std::round((doubled - 1.0) / 2.0) + 1.0;
    if (std::abs(doubled - nearest_odd) > 1e-9) {
        throw std::invalid_argument(
            "jones_pines: nuclear spin must be half-odd-integer, got " +
            std::to_string(nuclear_spin_i));
    }
    if (nuclear_spin_i < 1.5) {
        throw std::invalid_argument(
            "jones_pines: no quadrupolar doublet isolation for I <= 1/2, got " +
            std::to_string(nuclear_spin_i));
    }
    return GammaTensor{1.0, nuclear_spin_i + 0.5};
}

}  // namespace geodephase

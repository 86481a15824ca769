#pragma once

namespace geodephase {

// Axially symmetric coupling tensor between the moving-frame angular velocity
// and the pseudo spin: principal values gamma_par = gamma_ZZ and
// gamma_perp = gamma_XX = gamma_YY in the reference frame. The transverse lag
// delta_gamma_perp = gamma_perp - 1 is the sole coupling entering the
// closed-form relaxation rates.
struct GammaTensor {
    double gamma_par = 1.0;
    double gamma_perp = 1.0;

    double delta_gamma_perp() const { return gamma_perp - 1.0; }
    double delta_gamma_par() const { return gamma_par - 1.0; }

    // Squared norm of the g-tensor deviation used when reporting the Elliott
    // prefactor: two transverse components plus the axial one.
    double delta_g_norm_sq() const {
        const double dp = delta_gamma_perp();
        const double da = delta_gamma_par();
        return 2.0 * dp * dp + da * da;
    }

    // First-order mapping gamma - 1 = delta_g is trusted for |delta_g| < 1.
    bool first_order_valid() const;
};

// gamma = 1 + delta_g componentwise (first-order spin-orbit mixing).
GammaTensor from_delta_g(double dg_perp, double dg_par);

// Quadrupolar nuclear doublet preset: gamma_par = 1, gamma_perp = I + 1/2.
// Requires half-odd-integer I >= 3/2; throws std::invalid_argument otherwise.
GammaTensor jones_pines(double nuclear_spin_i);

// Scales of the adiabatic isolation of the doublet (natural units, hbar = 1).
struct AdiabaticityParams {
    double lambda_soc = 0.0;  // spin-orbit matrix-element amplitude
    double delta_e = 0.0;     // interband gap
    double tau_p = 0.0;       // momentum relaxation time

    double adiabaticity_ratio() const { return delta_e * tau_p; }
    double perturbation_ratio() const {
        return delta_e > 0.0 ? lambda_soc / delta_e : 0.0;
    }

    bool is_adiabatic(double threshold = 10.0) const {
        return adiabaticity_ratio() >= threshold;
    }
    bool perturbative() const { return perturbation_ratio() < 1.0; }
};

}  // namespace geodephase

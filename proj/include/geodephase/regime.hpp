#pragma once

#include <string>
#include <vector>

#include "geodephase/gamma.hpp"
#include "geodephase/stochastic.hpp"

namespace geodephase {

// Characteristic scales of a noise model: rms angular velocity and its
// correlation time, plus their product (which is what the fast-motional
// condition compares against). For ideal angular diffusion all three vanish:
// that model is the fast-motional limit by construction.
struct NoiseScales {
    double omega_rms = 0.0;
    double tau_c = 0.0;
    double omega_rms_tau_c = 0.0;
};

NoiseScales noise_scales(const StochasticModel& model);

// Diagnostic flags with the dimensionless ratios behind them. Violations are
// reported, never thrown: exploring regime breakdown is a supported use.
struct RegimeReport {
    bool adiabatic = false;
    bool perturbative = false;
    bool fast_motional = false;

    double adiabaticity_ratio = 0.0;    // delta_e * tau_p (hbar = 1)
    double perturbation_ratio = 0.0;    // lambda / delta_e
    double fast_motional_ratio = 0.0;   // |dgamma_perp| * omega_rms * tau_c

    double adiabatic_threshold = 10.0;
    double fast_motional_threshold = 0.1;

    std::vector<std::string> notes;
};

RegimeReport validate_regime(const GammaTensor& g, const AdiabaticityParams& a,
                             const StochasticModel& model,
                             double adiabatic_threshold = 10.0,
                             double fast_motional_threshold = 0.1);

}  // namespace geodephase

#include "geodephase/regime.hpp"

#include <cmath>

namespace geodephase {

NoiseScales noise_scales(const StochasticModel& model) {
    struct Visitor {
        NoiseScales operator()(const Diffusion2D&) const {
            return {0.0, 0.0, 0.0};
        }
        NoiseScales operator()(const StrongCollision3D& m) const {
            // During a collision the frame turns at theta/delta_t_c, so the
            // product reduces to the rms rotation angle itself.
            const double dtc = m.delta_t_c > 0.0 ? m.delta_t_c : 1e-3 * m.tau_p;
            const double rms = m.angle_law.rms();
            return {rms / dtc, dtc, rms};
        }
        NoiseScales operator()(const OuAngularVelocity3D& m) const {
            const double rms = std::sqrt(m.omega_sq_mean);
            return {rms, m.tau_c, rms * m.tau_c};
        }
    };
    return std::visit(Visitor{}, model);
}

RegimeReport validate_regime(const GammaTensor& g, const AdiabaticityParams& a,
                             const StochasticModel& model,
                             double adiabatic_threshold,
                             double fast_motional_threshold) {
    RegimeReport report;
    report.adiabatic_threshold = adiabatic_threshold;
    report.fast_motional_threshold = fast_motional_threshold;

    report.adiabaticity_ratio = a.adiabaticity_ratio();
    report.perturbation_ratio = a.perturbation_ratio();
    report.adiabatic = a.is_adiabatic(adiabatic_threshold);
    report.perturbative = a.perturbative();

    const NoiseScales scales = noise_scales(model);
    report.fast_motional_ratio =
        std::abs(g.delta_gamma_perp()) * scales.omega_rms_tau_c;
    report.fast_motional = report.fast_motional_ratio < fast_motional_threshold;

    if (!report.adiabatic) {
        report.notes.push_back(
            "adiabatic isolation weak: delta_e * tau_p = " +
            std::to_string(report.adiabaticity_ratio) + " < " +
            std::to_string(adiabatic_threshold));
    }
    if (!report.perturbative) {
        report.notes.push_back("first-order mixing invalid: lambda/delta_e = " +
                               std::to_string(report.perturbation_ratio) +
                               " >= 1");
    }
    if (!report.fast_motional) {
        report.notes.push_back(
            "fast-motional condition violated: |dgamma_perp|*omega_rms*tau_c = " +
            std::to_string(report.fast_motional_ratio) +
            "; closed-form 3D rate not expected to hold");
    }
    if (!g.first_order_valid()) {
        report.notes.push_back(
            "|delta_g| >= 1: outside the first-order gamma - 1 = delta_g regime");
    }
    return report;
}

}  // namespace geodephase

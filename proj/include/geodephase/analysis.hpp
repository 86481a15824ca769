#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "geodephase/ensemble.hpp"
#include "geodephase/gamma.hpp"

namespace geodephase {

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonPositiveCurve : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RegressionIllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitWindow {
    double t_lo = 0.0;
    double t_hi = 0.0;
};

struct RateEstimate {
    enum class Method { log_linear, nonlinear_ls };

    double rate = 0.0;
    double rate_stderr = 0.0;
    FitWindow window;
    double residual_rms = 0.0;  // on the fit window
    Method method = Method::nonlinear_ls;
    bool non_exponential = false;  // residuals exceed 3x the stderr level
};

// Weighted log-linear fit of ln(mean_uz) vs t followed by a nonlinear
// single-exponential refinement A*exp(-rate*t). Default window runs from the
// first point with mean_uz < 0.95 to the last with mean_uz >= 0.2; the window
// end auto-shrinks to keep mean_uz > 0.05 (log validity). Throws
// InsufficientData (< 8 usable points) or NonPositiveCurve.
RateEstimate fit_rate(const DecayCurve& curve,
                      std::optional<FitWindow> window = std::nullopt);

// Closed-form planar rate dg_perp^2 * d1.
double oracle_rate_2d(const GammaTensor& g, double d1);

// Closed-form fast-motional 3D rate (4/3) dg_perp^2 * <w^2> * tau_c, with
// <w^2> the per-component mean-square angular velocity.
double oracle_rate_3d(const GammaTensor& g, double omega_sq_mean, double tau_c);

// <u_Z(t)> by adaptive quadrature of cos(dg_perp*theta) against the Gaussian
// angle density with variance 2*d1*t (absolute tolerance 1e-10). Independent
// check of the exp(-dg_perp^2*d1*t) closed form.
double gaussian_average_oracle(const GammaTensor& g, double d1, double t);

struct ElliottScan {
    std::vector<double> tau_p_values;
    std::vector<double> fitted_rates;
    std::vector<double> rate_stderrs;
    std::vector<double> prefactors;  // rate * tau_p / |delta_g|^2, per point

    double slope = 0.0;  // rate vs 1/tau_p, through the origin
    double slope_stderr = 0.0;
    double r_squared = 0.0;  // uncentered (through-origin convention)
    double delta_g_norm_sq = 0.0;
    double prefactor_a = 0.0;
    double prefactor_a_stderr = 0.0;
    bool prefactor_defined = false;  // false when |delta_g|^2 == 0

    std::vector<DecayCurve> curves;
    std::vector<RateEstimate> fits;
};

// Runs the collision ensemble per tau_p (horizon scaled with tau_p so every
// run reaches comparable decay depth), fits each rate, and regresses rate
// against 1/tau_p through the origin. Requires >= 3 values spanning at least
// a 4x range (RegressionIllConditioned otherwise) and a StrongCollision3D
// base model.
ElliottScan elliott_scan(const EnsembleSpec& base,
                         std::span<const double> tau_p_values);

}  // namespace geodephase

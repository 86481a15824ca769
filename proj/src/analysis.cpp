#include "geodephase/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>

#include "geodephase/rng.hpp"

namespace geodephase {

namespace {

struct WindowIdx {
    int lo, hi;  // inclusive
};

WindowIdx select_window(const DecayCurve& c, const std::optional<FitWindow>& w) {
    const int n = static_cast<int>(c.t.size());
    int lo = 0, hi = n - 1;
    if (w) {
        lo = n;
        for (int i = 0; i < n; ++i) {
            if (c.t[i] >= w->t_lo) {
                lo = i;
                break;
            }
        }
        hi = -1;
        for (int i = n - 1; i >= 0; --i) {
            if (c.t[i] <= w->t_hi) {
                hi = i;
                break;
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            if (c.mean_uz[i] < 0.95) {
                lo = i;
                break;
            }
        }
        for (int i = lo; i < n; ++i) {
            if (c.mean_uz[i] < 0.2) {
                hi = i - 1;
                break;
            }
        }
    }
    return {lo, hi};
}

struct LinFit {
    double intercept, slope;
    bool ok;
};

LinFit weighted_linear(std::span<const double> t, std::span<const double> y,
                       std::span<const double> w) {
    double s = 0, st = 0, stt = 0, sy = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        s += w[i];
        st += w[i] * t[i];
        stt += w[i] * t[i] * t[i];
        sy += w[i] * y[i];
        sty += w[i] * t[i] * y[i];
    }
    const double denom = s * stt - st * st;
    if (!(std::abs(denom) > 0.0) || !std::isfinite(denom)) {
        return {0.0, 0.0, false};
    }
    return {(stt * sy - st * sty) / denom, (s * sty - st * sy) / denom, true};
}

}  // namespace

RateEstimate fit_rate(const DecayCurve& curve, std::optional<FitWindow> window) {
    const int n = static_cast<int>(curve.t.size());
    if (n == 0) throw InsufficientData("fit_rate: empty curve");

    auto [lo, hi] = select_window(curve, window);
    if (lo >= n || hi < lo) throw InsufficientData("fit_rate: empty fit window");

    // Log validity: shrink the window end rather than erroring outright.
    if (curve.mean_uz[lo] <= 0.05) {
        throw NonPositiveCurve("fit_rate: mean_uz <= 0.05 at the window start");
    }
    for (int i = lo; i <= hi; ++i) {
        if (curve.mean_uz[i] <= 0.05) {
            hi = i - 1;
            break;
        }
    }

    const int count = hi - lo + 1;
    if (count < 8) {
        throw InsufficientData("fit_rate: fewer than 8 points in the fit window (" +
                               std::to_string(count) + ")");
    }

    std::vector<double> t(count), m(count), se(count);
    for (int i = 0; i < count; ++i) {
        t[i] = curve.t[lo + i];
        m[i] = curve.mean_uz[lo + i];
        se[i] = curve.stderr_uz[lo + i];
    }

    double se_min_pos = std::numeric_limits<double>::infinity();
    for (double s : se) {
        if (s > 0.0) se_min_pos = std::min(se_min_pos, s);
    }
    const bool weighted = std::isfinite(se_min_pos);
    std::vector<double> sigma(count, 1.0);
    if (weighted) {
        for (int i = 0; i < count; ++i) sigma[i] = std::max(se[i], se_min_pos);
    }

    // Stage 1: weighted least squares on ln(mean_uz); sigma_ln = se / mean.
    std::vector<double> y(count), wlog(count);
    for (int i = 0; i < count; ++i) {
        y[i] = std::log(m[i]);
        const double s_ln = weighted ? sigma[i] / m[i] : 1.0;
        wlog[i] = 1.0 / (s_ln * s_ln);
    }
    const LinFit lin = weighted_linear(t, y, wlog);
    if (!lin.ok) throw InsufficientData("fit_rate: degenerate time grid");
    double rate = -lin.slope;
    double amp = std::exp(lin.intercept);

    // Stage 2: Gauss-Newton refinement of m ~ A exp(-r t), damped.
    auto chisq = [&](double a, double r) {
        double acc = 0.0;
        for (int i = 0; i < count; ++i) {
            const double e = m[i] - a * std::exp(-r * t[i]);
            acc += e * e / (sigma[i] * sigma[i]);
        }
        return acc;
    };

    bool refined = false;
    double jtj_rr_inv = 0.0;
    {
        double a = amp, r = rate;
        double best = chisq(a, r);
        for (int iter = 0; iter < 100; ++iter) {
            double h00 = 0, h01 = 0, h11 = 0, g0 = 0, g1 = 0;
            for (int i = 0; i < count; ++i) {
                const double f = std::exp(-r * t[i]);
                const double j0 = f;             // d/dA
                const double j1 = -a * t[i] * f; // d/dr
                const double wi = 1.0 / (sigma[i] * sigma[i]);
                const double e = m[i] - a * f;
                h00 += wi * j0 * j0;
                h01 += wi * j0 * j1;
                h11 += wi * j1 * j1;
                g0 += wi * j0 * e;
                g1 += wi * j1 * e;
            }
            const double det = h00 * h11 - h01 * h01;
            if (!(std::abs(det) > 0.0) || !std::isfinite(det)) break;
            double da = (h11 * g0 - h01 * g1) / det;
            double dr = (h00 * g1 - h01 * g0) / det;

            double step = 1.0;
            double next = chisq(a + da, r + dr);
            int halvings = 0;
            while (!(next <= best) && halvings < 25) {
                step *= 0.5;
                next = chisq(a + step * da, r + step * dr);
                ++halvings;
            }
            if (!(next <= best)) break;
            a += step * da;
            r += step * dr;
            best = next;
            refined = true;
            jtj_rr_inv = h00 / det;
            if (std::abs(step * dr) <= 1e-13 * std::max(std::abs(r), 1e-300)) break;
        }
        if (refined && std::isfinite(r)) {
            rate = r;
            amp = a;
        } else {
            refined = false;
        }
    }

    RateEstimate est;
    est.rate = rate;
    est.window = {t.front(), t.back()};
    est.method = refined ? RateEstimate::Method::nonlinear_ls
                         : RateEstimate::Method::log_linear;

    double ss = 0.0;
    for (int i = 0; i < count; ++i) {
        const double e = m[i] - amp * std::exp(-rate * t[i]);
        ss += e * e;
    }
    est.residual_rms = std::sqrt(ss / count);

    if (refined) {
        if (weighted) {
            est.rate_stderr = std::sqrt(std::max(0.0, jtj_rr_inv));
        } else if (count > 2) {
            est.rate_stderr =
                std::sqrt(std::max(0.0, jtj_rr_inv * ss / (count - 2)));
        }
    }

    double se_level = 0.0;
    if (weighted) {
        double acc = 0.0;
        for (int i = 0; i < count; ++i) acc += se[i] * se[i];
        se_level = std::sqrt(acc / count);
    } else {
        double peak = 0.0;
        for (double v : m) peak = std::max(peak, std::abs(v));
        se_level = 1e-9 * peak / 3.0;
    }
    est.non_exponential = est.residual_rms > 3.0 * se_level;
    return est;
}

double oracle_rate_2d(const GammaTensor& g, double d1) {
    if (d1 < 0.0) throw std::invalid_argument("oracle_rate_2d: d1 must be >= 0");
    const double dg = g.delta_gamma_perp();
    return dg * dg * d1;
}

double oracle_rate_3d(const GammaTensor& g, double omega_sq_mean, double tau_c) {
    if (omega_sq_mean < 0.0 || tau_c < 0.0) {
        throw std::invalid_argument("oracle_rate_3d: inputs must be >= 0");
    }
    const double dg = g.delta_gamma_perp();
    return (4.0 / 3.0) * dg * dg * omega_sq_mean * tau_c;
}

namespace {

// Recursive adaptive Simpson with the standard 1/15 error estimate.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    if (depth > 60) {
        throw std::runtime_error("gaussian_average_oracle: quadrature failed to converge");
    }
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace

double gaussian_average_oracle(const GammaTensor& g, double d1, double t) {
    if (t < 0.0) throw std::invalid_argument("gaussian_average_oracle: t must be >= 0");
    if (d1 < 0.0) throw std::invalid_argument("gaussian_average_oracle: d1 must be >= 0");
    const double dg = g.delta_gamma_perp();
    if (t == 0.0 || d1 == 0.0 || dg == 0.0) return 1.0;

    const double var = 2.0 * d1 * t;  // angle variance at time t
    const double s = std::sqrt(var);
    const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
    const auto f = [&](double x) {
        return std::cos(dg * x) * std::exp(-0.5 * x * x / var) * norm;
    };
    // Even integrand; 12 standard deviations bounds the tail far below tol.
    return 2.0 * integrate(f, 0.0, 12.0 * s, 5e-11);
}

ElliottScan elliott_scan(const EnsembleSpec& base,
                         std::span<const double> tau_p_values) {
    const auto* model = std::get_if<StrongCollision3D>(&base.model);
    if (!model) {
        throw std::invalid_argument("elliott_scan: base model must be StrongCollision3D");
    }
    if (tau_p_values.size() < 3) {
        throw RegressionIllConditioned("elliott_scan: need at least 3 tau_p values");
    }
    const auto [mn, mx] =
        std::minmax_element(tau_p_values.begin(), tau_p_values.end());
    if (!(*mn > 0.0) || *mx / *mn < 4.0) {
        throw RegressionIllConditioned(
            "elliott_scan: tau_p values must be positive and span a >= 4x range");
    }

    ElliottScan scan;
    scan.delta_g_norm_sq = base.gamma.delta_g_norm_sq();

    for (std::size_t i = 0; i < tau_p_values.size(); ++i) {
        const double tau_p = tau_p_values[i];
        EnsembleSpec spec = base;
        auto m = *model;
        m.tau_p = tau_p;
        spec.model = m;
        // Same decay depth for every run; independent stream family per run.
        spec.grid.t_max = base.grid.t_max * tau_p / model->tau_p;
        spec.root_seed = rng::stream_seed(base.root_seed, 0xE1100000ull + i);

        DecayCurve curve = run_3d_collisions(spec);
        RateEstimate fit = fit_rate(curve);

        scan.tau_p_values.push_back(tau_p);
        scan.fitted_rates.push_back(fit.rate);
        scan.rate_stderrs.push_back(fit.rate_stderr);
        scan.prefactors.push_back(scan.delta_g_norm_sq > 0.0
                                      ? fit.rate * tau_p / scan.delta_g_norm_sq
                                      : std::numeric_limits<double>::quiet_NaN());
        scan.curves.push_back(std::move(curve));
        scan.fits.push_back(fit);
    }

    // Through-origin regression of rate on 1/tau_p, weighted by fit variance.
    bool weighted = true;
    for (double s : scan.rate_stderrs) {
        if (!(s > 0.0)) weighted = false;
    }
    double swxx = 0.0, swxy = 0.0;
    for (std::size_t i = 0; i < scan.tau_p_values.size(); ++i) {
        const double x = 1.0 / scan.tau_p_values[i];
        const double w =
            weighted ? 1.0 / (scan.rate_stderrs[i] * scan.rate_stderrs[i]) : 1.0;
        swxx += w * x * x;
        swxy += w * x * scan.fitted_rates[i];
    }
    scan.slope = swxy / swxx;

    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < scan.tau_p_values.size(); ++i) {
        const double x = 1.0 / scan.tau_p_values[i];
        const double e = scan.fitted_rates[i] - scan.slope * x;
        ss_res += e * e;
        ss_tot += scan.fitted_rates[i] * scan.fitted_rates[i];
    }
    scan.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;

    if (weighted) {
        scan.slope_stderr = std::sqrt(1.0 / swxx);
    } else {
        const auto npts = static_cast<double>(scan.tau_p_values.size());
        scan.slope_stderr =
            npts > 1 ? std::sqrt(ss_res / (npts - 1.0) / swxx) : 0.0;
    }

    if (scan.delta_g_norm_sq > 0.0) {
        scan.prefactor_defined = true;
        scan.prefactor_a = scan.slope / scan.delta_g_norm_sq;
        scan.prefactor_a_stderr = scan.slope_stderr / scan.delta_g_norm_sq;
    } else {
        scan.prefactor_defined = false;
        scan.prefactor_a = std::numeric_limits<double>::quiet_NaN();
        scan.prefactor_a_stderr = std::numeric_limits<double>::quiet_NaN();
    }
    return scan;
}

}  // namespace geodephase

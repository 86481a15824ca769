#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "geodephase/gamma.hpp"
#include "geodephase/regime.hpp"

using namespace geodephase;

TEST_CASE("from_delta_g") {
    const GammaTensor free = from_delta_g(0.0, 0.0);
    CHECK(free.gamma_par == 1.0);
    CHECK(free.gamma_perp == 1.0);
    CHECK(free.delta_gamma_perp() == 0.0);

    const GammaTensor g = from_delta_g(0.05, 0.0);
    CHECK(g.gamma_perp == doctest::Approx(1.05).epsilon(1e-15));
    CHECK(g.delta_gamma_perp() == doctest::Approx(0.05).epsilon(1e-12));

    const GammaTensor h = from_delta_g(-0.1, 0.02);
    CHECK(h.gamma_perp == doctest::Approx(0.9));
    CHECK(h.gamma_par == doctest::Approx(1.02));
}

TEST_CASE("from_delta_g inverts the componentwise read-off") {
    for (double dgp : {-0.3, 0.0, 0.07, 0.5}) {
        for (double dga : {-0.1, 0.0, 0.2}) {
            const GammaTensor g = from_delta_g(dgp, dga);
            CHECK(g.delta_gamma_perp() == doctest::Approx(dgp).epsilon(1e-14));
            CHECK(g.delta_gamma_par() == doctest::Approx(dga).epsilon(1e-14));
        }
    }
}

TEST_CASE("jones_pines presets") {
    const GammaTensor xe = jones_pines(1.5);
    CHECK(xe.gamma_par == 1.0);
    CHECK(xe.gamma_perp == 2.0);
    CHECK(xe.delta_gamma_perp() == 1.0);

    const GammaTensor g52 = jones_pines(2.5);
    CHECK(g52.gamma_par == 1.0);
    CHECK(g52.gamma_perp == 3.0);

    CHECK_THROWS_AS(jones_pines(0.5), std::invalid_argument);
    CHECK_THROWS_AS(jones_pines(1.0), std::invalid_argument);
    CHECK_THROWS_AS(jones_pines(2.0), std::invalid_argument);
    CHECK_THROWS_AS(jones_pines(1.2), std::invalid_argument);
}

TEST_CASE("jones_pines lag is I - 1/2") {
    for (double i = 1.5; i < 16.0; i += 1.0) {
        CHECK(jones_pines(i).delta_gamma_perp() == doctest::Approx(i - 0.5));
    }
}

TEST_CASE("adiabaticity flags") {
    AdiabaticityParams strong{0.01, 1.0, 100.0};
    CHECK(strong.adiabaticity_ratio() == doctest::Approx(100.0));
    CHECK(strong.is_adiabatic());
    CHECK(strong.perturbative());

    AdiabaticityParams weak{0.01, 1.0, 1.0};
    CHECK_FALSE(weak.is_adiabatic());

    AdiabaticityParams mixed{2.0, 1.0, 100.0};
    CHECK_FALSE(mixed.perturbative());
}

TEST_CASE("validate_regime never throws and sets all three flags") {
    const GammaTensor g = from_delta_g(0.05, 0.0);

    // OU model tuned so dg * w_rms * tau_c = 0.01
    StochasticModel fast = OuAngularVelocity3D{4.0, 0.1};  // w_rms tau_c = 0.2
    RegimeReport r = validate_regime(g, AdiabaticityParams{0.01, 1.0, 100.0}, fast);
    CHECK(r.adiabatic);
    CHECK(r.perturbative);
    CHECK(r.fast_motional);
    CHECK(r.fast_motional_ratio == doctest::Approx(0.01));
    CHECK(r.notes.empty());

    RegimeReport slow_frame =
        validate_regime(g, AdiabaticityParams{0.01, 1.0, 1.0}, fast);
    CHECK_FALSE(slow_frame.adiabatic);
    CHECK(slow_frame.notes.size() == 1);

    // dg * w_rms * tau_c = 0.5: outside the fast-motional window
    StochasticModel slow = OuAngularVelocity3D{100.0, 1.0};
    RegimeReport s = validate_regime(g, AdiabaticityParams{0.01, 1.0, 100.0}, slow);
    CHECK_FALSE(s.fast_motional);
    CHECK(s.fast_motional_ratio == doctest::Approx(0.5));
}

TEST_CASE("noise scales per model") {
    const NoiseScales diff = noise_scales(Diffusion2D{2.0});
    CHECK(diff.omega_rms_tau_c == 0.0);  // ideal diffusion: fast-motional limit

    const NoiseScales sc =
        noise_scales(StrongCollision3D{1.0, AngleLaw::gaussian(0.5), 0.01});
    CHECK(sc.tau_c == doctest::Approx(0.01));
    CHECK(sc.omega_rms_tau_c == doctest::Approx(0.5));  // rms angle itself

    const NoiseScales ou = noise_scales(OuAngularVelocity3D{9.0, 0.2});
    CHECK(ou.omega_rms == doctest::Approx(3.0));
    CHECK(ou.omega_rms_tau_c == doctest::Approx(0.6));
}

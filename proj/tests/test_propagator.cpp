#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "geodephase/propagator.hpp"
#include "geodephase/rng.hpp"
#include "oracle2x2.hpp"

using namespace geodephase;

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs_diff(const Vec3& a, const Vec3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

// Stepwise reference: split the collision into n piecewise-constant steps of
// the effective dynamics and, for the local frame, undo the accumulated frame
// rotation at the end.
Vec3 stepwise_uz_m_frame(const CollisionEvent& e, const GammaTensor& g, int n) {
    const Vec3 omega = e.axis * e.angular_speed();
    const double dt = e.duration / n;
    std::vector<EffectiveHamiltonianSample> samples(n, {omega, g});
    return apply(integrate_piecewise(samples, dt), kZAxis);
}

Vec3 stepwise_uz_lab_frame(const CollisionEvent& e, const GammaTensor& g, int n) {
    const Vec3 omega = e.axis * e.angular_speed();
    const double dt = e.duration / n;
    RotorChain moving, frame;
    for (int k = 0; k < n; ++k) {
        moving.push(step_rotor(omega, dt, g));
        frame.push(frame_step_rotor(omega, dt));
    }
    return apply(to_lab_frame(moving.value(), frame.value()), kZAxis);
}

}  // namespace

TEST_CASE("collision in the moving frame: u_Z = cos(theta * gamma_perp)") {
    const CollisionEvent e{kXAxis, kPi / 2, 0.1};
    const GammaTensor g{1.0, 2.0};
    const Vec3 u = apply(collision_rotor_m_frame(e, g), kZAxis);
    CHECK(u.z == doctest::Approx(-1.0).epsilon(1e-12));

    const GammaTensor zero{1.0, 0.0};
    const Vec3 u0 = apply(collision_rotor_m_frame(e, zero), kZAxis);
    CHECK(u0.z == doctest::Approx(1.0).epsilon(1e-14));

    const CollisionEvent e2{kXAxis, 0.3, 0.05};
    const GammaTensor g2{1.0, 1.05};
    const Vec3 u2 = apply(collision_rotor_m_frame(e2, g2), kZAxis);
    CHECK(u2.z == doctest::Approx(std::cos(0.315)).epsilon(1e-12));
    // stepwise integration agrees
    CHECK(max_abs_diff(u2, stepwise_uz_m_frame(e2, g2, 10'000)) < 1e-8);
}

TEST_CASE("collision in the local frame: u_Z = cos(theta * dgamma_perp)") {
    const GammaTensor jp{1.0, 2.0};  // dgamma_perp = 1
    const CollisionEvent e{kXAxis, kPi / 2, 0.2};
    CHECK(apply(collision_rotor_lab_frame(e, jp), kZAxis).z ==
          doctest::Approx(0.0).epsilon(1e-12));

    // dgamma_perp = 0: the polarization follows the reorientation exactly
    const GammaTensor follow{1.0, 1.0};
    for (double theta : {0.3, 1.5, 3.0}) {
        const CollisionEvent ev{kYAxis, theta, 0.1};
        const Vec3 u = apply(collision_rotor_lab_frame(ev, follow), kZAxis);
        CHECK(max_abs_diff(u, kZAxis) < 1e-14);
    }

    const GammaTensor g{1.0, 1.05};
    const CollisionEvent e3{kXAxis, 1.0, 0.1};
    const Vec3 u3 = apply(collision_rotor_lab_frame(e3, g), kZAxis);
    CHECK(u3.z == doctest::Approx(std::cos(0.05)).epsilon(1e-12));
    CHECK(max_abs_diff(u3, stepwise_uz_lab_frame(e3, g, 10'000)) < 1e-8);
}

TEST_CASE("lab rotor is exactly the frame-compensated moving rotor") {
    rng::Xoshiro256pp gen(23, 0);
    for (int k = 0; k < 20; ++k) {
        const double phi = 2.0 * kPi * gen.uniform01();
        const CollisionEvent e{{std::cos(phi), std::sin(phi), 0.0},
                               kPi * (2.0 * gen.uniform01() - 1.0) * 0.999,
                               0.01 + gen.uniform01()};
        const GammaTensor g{1.0, 0.8 + gen.uniform01()};
        const Rotor direct = collision_rotor_lab_frame(e, g);
        const Rotor composed =
            to_lab_frame(collision_rotor_m_frame(e, g), collision_frame_rotor(e));
        const Vec3 u{0.3, -0.5, 0.6};
        CHECK(max_abs_diff(apply(direct, u), apply(composed, u)) < 1e-14);
    }
}

TEST_CASE("u_Z depends only on the rotation angle, not on (omega, duration)") {
    const GammaTensor g{1.0, 1.3};
    const double theta = 0.9;
    const Vec3 ref =
        apply(collision_rotor_lab_frame({kXAxis, theta, 1.0}, g), kZAxis);
    for (int k = 1; k <= 10; ++k) {
        const double duration = 0.05 * k;  // same theta, different speed
        const Vec3 u =
            apply(collision_rotor_lab_frame({kXAxis, theta, duration}, g), kZAxis);
        CHECK(max_abs_diff(u, ref) < 1e-12);
    }
}

TEST_CASE("small-angle lag of the polarization behind the frame") {
    const GammaTensor g{1.0, 1.07};
    const double dg = g.delta_gamma_perp();
    for (double theta : {1e-2, 1e-3, 1e-4}) {
        const Vec3 u = apply(collision_rotor_lab_frame({kXAxis, theta, 1.0}, g), kZAxis);
        const double deflection = std::atan2(std::hypot(u.x, u.y), u.z);
        CHECK(std::abs(deflection - dg * theta) <
              10.0 * theta * theta * theta + 1e-15);
    }
}

TEST_CASE("to_lab_frame") {
    const Rotor m = Rotor::axis_angle(kXAxis, 0.77);
    CHECK(max_abs_diff(apply(to_lab_frame(m, Rotor{}), kZAxis), apply(m, kZAxis)) <
          1e-15);

    // Rx(theta*gamma_perp) compensated by Rx(theta) leaves Rx(theta*dgamma)
    const double theta = 0.6, gperp = 1.4;
    const Rotor lab = to_lab_frame(Rotor::axis_angle(kXAxis, theta * gperp),
                                   Rotor::axis_angle(kXAxis, theta));
    const Rotor ref = Rotor::axis_angle(kXAxis, theta * (gperp - 1.0));
    const Vec3 u{0.2, 0.4, 0.8};
    CHECK(max_abs_diff(apply(lab, u), apply(ref, u)) < 1e-13);

    rng::Xoshiro256pp gen(29, 0);
    rng::NormalSampler normal;
    for (int k = 0; k < 100; ++k) {
        const Rotor a = Rotor::from_components(normal(gen), normal(gen),
                                               normal(gen), normal(gen));
        const Rotor f = Rotor::from_components(normal(gen), normal(gen),
                                               normal(gen), normal(gen));
        const Vec3 v = Vec3{normal(gen), normal(gen), normal(gen)}.normalized();
        const auto oracle = oracle2x2::mul(
            oracle2x2::adjoint(oracle2x2::from_rotor(f)), oracle2x2::from_rotor(a));
        CHECK(max_abs_diff(apply(to_lab_frame(a, f), v),
                           oracle2x2::rotate(oracle, v)) < 1e-10);
    }
}

TEST_CASE("integrate_piecewise: fixed axis reduces to the closed form") {
    const GammaTensor g{1.0, 2.0};
    const double theta = 1.1;
    const int n = 1'000'000;
    const CollisionEvent e{kXAxis, theta, 1.0};
    const Vec3 closed = apply(collision_rotor_m_frame(e, g), kZAxis);
    CHECK(max_abs_diff(stepwise_uz_m_frame(e, g, n), closed) < 1e-10);
}

TEST_CASE("integrate_piecewise: zero omega and empty input") {
    std::vector<EffectiveHamiltonianSample> still(5, {{0.0, 0.0, 0.0}, {1.0, 1.5}});
    const Vec3 u{0.3, 0.1, 0.9};
    CHECK(max_abs_diff(apply(integrate_piecewise(still, 0.1), u), u) == 0.0);

    std::vector<EffectiveHamiltonianSample> none;
    CHECK_THROWS_AS(integrate_piecewise(none, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate_piecewise(still, 0.0), std::invalid_argument);
}

TEST_CASE("integrate_piecewise: wandering axis against the matrix oracle") {
    const GammaTensor g{1.0, 1.5};
    const double total_t = 2.0;
    const double omega0 = 1.3, nu = 2.1;

    auto make_samples = [&](int n) {
        std::vector<EffectiveHamiltonianSample> samples;
        samples.reserve(n);
        const double dt = total_t / n;
        for (int k = 0; k < n; ++k) {
            const double t = (k + 0.5) * dt;  // midpoint sampling
            samples.push_back(
                {Vec3{std::cos(nu * t), std::sin(nu * t), 0.2} * omega0, g});
        }
        return samples;
    };

    const int n = 10'000;
    const Rotor integrated = integrate_piecewise(make_samples(n), total_t / n);
    const auto oracle =
        oracle2x2::time_ordered_product(make_samples(10 * n), total_t / (10 * n));

    for (const Vec3& u : {kZAxis, Vec3{0.6, -0.3, 0.5}.normalized()}) {
        CHECK(max_abs_diff(apply(integrated, u), oracle2x2::rotate(oracle, u)) < 1e-6);
    }
}

TEST_CASE("integrate_piecewise: Richardson halving shows ~second order with midpoint samples") {
    const GammaTensor g{1.0, 1.5};
    const double total_t = 1.5;
    auto value = [&](int n) {
        std::vector<EffectiveHamiltonianSample> samples;
        const double dt = total_t / n;
        for (int k = 0; k < n; ++k) {
            const double t = (k + 0.5) * dt;
            samples.push_back({Vec3{std::cos(3.0 * t), std::sin(3.0 * t), 0.0} * 1.7, g});
        }
        return apply(integrate_piecewise(samples, dt), kZAxis);
    };
    const Vec3 fine = value(64'000);
    const double e1 = max_abs_diff(value(1'000), fine);
    const double e2 = max_abs_diff(value(2'000), fine);
    const double order = std::log2(e1 / e2);
    CHECK(order > 1.7);
    CHECK(order < 2.3);
}

TEST_CASE("collision event validity") {
    CHECK(CollisionEvent{kXAxis, 0.5, 0.1}.valid());
    CHECK_FALSE(CollisionEvent{kZAxis, 0.5, 0.1}.valid());          // axis || Z
    CHECK_FALSE(CollisionEvent{{0.5, 0.0, 0.0}, 0.5, 0.1}.valid()); // not unit
    CHECK_FALSE(CollisionEvent{kXAxis, 0.5, 0.0}.valid());          // no duration
    CHECK_FALSE(CollisionEvent{kXAxis, 4.0, 0.1}.valid());          // angle range
}

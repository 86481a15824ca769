#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geodephase/rng.hpp"
#include "geodephase/su2.hpp"
#include "oracle2x2.hpp"

using namespace geodephase;

namespace {

constexpr double kPi = std::numbers::pi;

Rotor random_rotor(rng::Xoshiro256pp& gen, rng::NormalSampler& normal) {
    // 4 gaussians normalized: uniform on S^3
    return Rotor::from_components(normal(gen), normal(gen), normal(gen), normal(gen));
}

Vec3 random_unit(rng::Xoshiro256pp& gen, rng::NormalSampler& normal) {
    return Vec3{normal(gen), normal(gen), normal(gen)}.normalized();
}

double max_abs_diff(const Vec3& a, const Vec3& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y), std::abs(a.z - b.z)});
}

}  // namespace

TEST_CASE("same-axis angles add under composition") {
    const Rotor a = Rotor::axis_angle(kZAxis, kPi / 2);
    const Rotor c = compose(a, a);
    const Rotor ref = Rotor::axis_angle(kZAxis, kPi);
    const Vec3 u{1.0, 0.3, -0.2};
    CHECK(max_abs_diff(apply(c, u), apply(ref, u)) < 1e-14);
}

TEST_CASE("identity laws") {
    const Rotor r = Rotor::axis_angle({0.3, -0.4, 0.2}, 1.1);
    const Rotor id;
    const Vec3 u{0.2, 0.5, -0.7};
    CHECK(max_abs_diff(apply(compose(r, id), u), apply(r, u)) < 1e-15);
    CHECK(max_abs_diff(apply(compose(id, r), u), apply(r, u)) < 1e-15);
    CHECK(max_abs_diff(apply(Rotor::axis_angle({0.0, 1.0, 0.0}, 0.0), u), u) == 0.0);
}

TEST_CASE("non-commuting axes, both orders, against the matrix oracle") {
    const Rotor rx = Rotor::axis_angle(kXAxis, kPi / 2);
    const Rotor ry = Rotor::axis_angle(kYAxis, kPi / 2);
    const Vec3 u{0.0, 0.0, 1.0};

    const Vec3 xy = apply(compose(rx, ry), u);
    const Vec3 yx = apply(compose(ry, rx), u);
    CHECK(max_abs_diff(xy, yx) > 0.5);  // genuinely different

    const auto mxy = oracle2x2::mul(oracle2x2::from_rotor(rx), oracle2x2::from_rotor(ry));
    const auto myx = oracle2x2::mul(oracle2x2::from_rotor(ry), oracle2x2::from_rotor(rx));
    CHECK(max_abs_diff(xy, oracle2x2::rotate(mxy, u)) < 1e-12);
    CHECK(max_abs_diff(yx, oracle2x2::rotate(myx, u)) < 1e-12);
}

TEST_CASE("apply: reference values") {
    CHECK(max_abs_diff(apply(Rotor::axis_angle(kXAxis, kPi), kZAxis),
                       {0.0, 0.0, -1.0}) < 1e-15);

    // sign convention pinned by the density-matrix oracle
    const Rotor r = Rotor::axis_angle(kXAxis, kPi / 3);
    const Vec3 got = apply(r, kZAxis);
    CHECK(got.x == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(got.y == doctest::Approx(-std::sin(kPi / 3)).epsilon(1e-14));
    CHECK(got.z == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(max_abs_diff(got, oracle2x2::rotate(r, kZAxis)) < 1e-14);
}

TEST_CASE("inverse") {
    const Rotor r = Rotor::axis_angle(kZAxis, 0.7);
    const Rotor ri = inverse(r);
    const Rotor ref = Rotor::axis_angle(kZAxis, -0.7);
    const Vec3 u{0.6, -0.1, 0.4};
    CHECK(max_abs_diff(apply(ri, u), apply(ref, u)) < 1e-15);

    const Rotor id_inv = inverse(Rotor{});
    CHECK(max_abs_diff(apply(id_inv, u), u) == 0.0);

    rng::Xoshiro256pp gen(7, 0);
    rng::NormalSampler normal;
    for (int k = 0; k < 100; ++k) {
        const Rotor q = random_rotor(gen, normal);
        const Vec3 v = random_unit(gen, normal);
        CHECK(max_abs_diff(apply(compose(inverse(q), q), v), v) < 1e-12);
    }
}

TEST_CASE("equivalence oracle: 1000 random rotors") {
    rng::Xoshiro256pp gen(11, 0);
    rng::NormalSampler normal;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const Rotor q = random_rotor(gen, normal);
        const Vec3 v = random_unit(gen, normal);
        worst = std::max(worst, max_abs_diff(apply(q, v), oracle2x2::rotate(q, v)));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("fixed-axis commutativity") {
    rng::Xoshiro256pp gen(13, 0);
    rng::NormalSampler normal;
    for (int k = 0; k < 50; ++k) {
        const Vec3 n = random_unit(gen, normal);
        const double p1 = 6.0 * gen.uniform01() - 3.0;
        const double p2 = 6.0 * gen.uniform01() - 3.0;
        const Rotor a = Rotor::axis_angle(n, p1);
        const Rotor b = Rotor::axis_angle(n, p2);
        const Vec3 u = random_unit(gen, normal);
        CHECK(max_abs_diff(apply(compose(a, b), u), apply(compose(b, a), u)) < 1e-12);
    }
}

TEST_CASE("double-cover pair (n, phi) vs (-n, -phi) acts identically") {
    const Vec3 n = Vec3{0.2, -0.7, 0.4}.normalized();
    const Rotor a = Rotor::axis_angle(n, 1.3);
    const Rotor b = Rotor::axis_angle(-n, -1.3);
    const Vec3 u{0.1, 0.8, -0.5};
    CHECK(max_abs_diff(apply(a, u), apply(b, u)) < 1e-15);
}

TEST_CASE("canonical axis-angle form") {
    const Rotor r = Rotor::axis_angle(kYAxis, -0.5);
    CHECK(r.angle() >= 0.0);
    CHECK(r.angle() < 2.0 * kPi);
    CHECK(r.angle() == doctest::Approx(2.0 * kPi - 0.5));
    CHECK(r.axis().y == doctest::Approx(-1.0));
    CHECK(Rotor{}.angle() == 0.0);
}

TEST_CASE("norm stays pinned through chains and |u| is preserved") {
    rng::Xoshiro256pp gen(17, 0);
    rng::NormalSampler normal;
    RotorChain chain;
    for (int k = 0; k < 100'000; ++k) {
        chain.push(random_rotor(gen, normal));
    }
    CHECK(std::abs(chain.value().norm() - 1.0) < 1e-12);
    const Vec3 u = apply(chain.value(), kZAxis);
    CHECK(std::abs(u.norm() - 1.0) < 1e-11);
}

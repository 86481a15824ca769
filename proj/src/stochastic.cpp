#include "geodephase/stochastic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geodephase {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

double AngleLaw::sample(rng::Xoshiro256pp& gen, rng::NormalSampler& normal) const {
    switch (kind) {
        case Kind::fixed:
            return param;
        case Kind::gaussian: {
            double theta;
            do {
                theta = param * normal(gen);
            } while (theta <= -kPi || theta > kPi);
            return theta;
        }
        case Kind::exponential: {
            double theta;
            do {
                theta = -param * std::log1p(-gen.uniform01());
            } while (theta > kPi);
            return theta;
        }
    }
    return 0.0;
}

double AngleLaw::rms() const {
    switch (kind) {
        case Kind::fixed:
            return std::abs(param);
        case Kind::gaussian:
            return std::abs(param);
        case Kind::exponential:
            return std::numbers::sqrt2 * std::abs(param);
    }
    return 0.0;
}

DiffusionPath sample_diffusion_2d(const Diffusion2D& model, const TimeGrid& grid,
                                  std::uint64_t root_seed, std::uint64_t traj_index) {
    require(model.d1 >= 0.0, "sample_diffusion_2d: d1 must be nonnegative");
    require(grid.valid(), "sample_diffusion_2d: invalid time grid");

    DiffusionPath path;
    path.seed = rng::stream_seed(root_seed, traj_index);
    path.theta.resize(grid.n_points);
    path.theta[0] = 0.0;

    rng::Xoshiro256pp gen(root_seed, traj_index);
    rng::NormalSampler normal;
    const double step_sigma = std::sqrt(2.0 * model.d1 * grid.dt());
    double theta = 0.0;
    for (int i = 1; i < grid.n_points; ++i) {
        theta += step_sigma * normal(gen);
        path.theta[i] = theta;
    }
    return path;
}

CollisionSequence sample_collisions(const StrongCollision3D& model, double horizon,
                                    std::uint64_t root_seed, std::uint64_t traj_index) {
    require(model.tau_p > 0.0, "sample_collisions: tau_p must be positive");
    require(horizon > 0.0, "sample_collisions: horizon must be positive");
    require(model.angle_law.kind != AngleLaw::Kind::fixed ||
                (model.angle_law.param > -kPi && model.angle_law.param <= kPi),
            "sample_collisions: fixed angle must lie in (-pi, pi]");
    require(model.angle_law.param >= 0.0 ||
                model.angle_law.kind == AngleLaw::Kind::fixed,
            "sample_collisions: angle law scale must be nonnegative");
    const double delta_t_c =
        model.delta_t_c > 0.0 ? model.delta_t_c : 1e-3 * model.tau_p;

    CollisionSequence seq;
    seq.horizon = horizon;
    seq.seed = rng::stream_seed(root_seed, traj_index);

    rng::Xoshiro256pp gen(root_seed, traj_index);
    rng::NormalSampler normal;
    double t = 0.0;
    for (;;) {
        const double wait = -model.tau_p * std::log1p(-gen.uniform01());
        if (!(wait < horizon - t)) break;  // also exits on overflow/inf
        t += wait;
        const double theta = model.angle_law.sample(gen, normal);
        const double phi = 2.0 * kPi * gen.uniform01();
        seq.times.push_back(t);
        seq.events.push_back(CollisionEvent{
            {std::cos(phi), std::sin(phi), 0.0},  // local frame, in-plane
            theta,
            delta_t_c});
    }
    return seq;
}

OmegaPath sample_ou_omega(const OuAngularVelocity3D& model, const TimeGrid& grid,
                          std::uint64_t root_seed, std::uint64_t traj_index) {
    require(model.omega_sq_mean >= 0.0,
            "sample_ou_omega: omega_sq_mean must be nonnegative");
    require(model.tau_c > 0.0, "sample_ou_omega: tau_c must be positive");
    require(grid.valid(), "sample_ou_omega: invalid time grid");

    OmegaPath path;
    path.seed = rng::stream_seed(root_seed, traj_index);
    path.omega.resize(grid.n_points);

    OuStepper stepper(model, rng::Xoshiro256pp(root_seed, traj_index));
    path.omega[0] = stepper.current();

    // The exact update has no step-size bias, so a grid coarser than tau_c/10
    // is refined internally: marginals on the grid are unchanged, only the
    // draw count per interval grows.
    const int substeps =
        std::max(1, static_cast<int>(std::ceil(grid.dt() / (model.tau_c / 10.0))));
    const double dt_sub = grid.dt() / substeps;
    for (int i = 1; i < grid.n_points; ++i) {
        for (int k = 0; k < substeps; ++k) stepper.advance(dt_sub);
        path.omega[i] = stepper.current();
    }
    return path;
}

OuStepper::OuStepper(const OuAngularVelocity3D& model, rng::Xoshiro256pp stream)
    : tau_c_(model.tau_c),
      sigma_(std::sqrt(model.omega_sq_mean)),
      gen_(stream) {
    omega_ = {sigma_ * normal_(gen_), sigma_ * normal_(gen_), sigma_ * normal_(gen_)};
}

const Vec3& OuStepper::advance(double dt) {
    const double a = std::exp(-dt / tau_c_);
    const double kick = sigma_ * std::sqrt(1.0 - a * a);
    omega_.x = a * omega_.x + kick * normal_(gen_);
    omega_.y = a * omega_.y + kick * normal_(gen_);
    omega_.z = a * omega_.z + kick * normal_(gen_);
    return omega_;
}

}  // namespace geodephase

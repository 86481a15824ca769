#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "geodephase/propagator.hpp"
#include "geodephase/rng.hpp"
#include "geodephase/vec3.hpp"

namespace geodephase {

// Uniform time grid t_i = i * t_max / (n_points - 1), i = 0 .. n_points-1.
struct TimeGrid {
    double t_max = 0.0;
    int n_points = 200;

    double dt() const { return t_max / (n_points - 1); }
    double t(int i) const { return i * dt(); }
    bool valid() const { return t_max > 0.0 && n_points >= 2; }
};

// Per-event rotation angle distribution, support restricted to (-pi, pi] by
// rejection (wrapping would distort the second moment the relaxation rate
// depends on).
struct AngleLaw {
    enum class Kind { fixed, gaussian, exponential };

    Kind kind = Kind::fixed;
    double param = 0.0;  // fixed angle / std deviation / mean

    static AngleLaw fixed(double theta0) { return {Kind::fixed, theta0}; }
    static AngleLaw gaussian(double sigma) { return {Kind::gaussian, sigma}; }
    static AngleLaw exponential(double mean) { return {Kind::exponential, mean}; }

    double sample(rng::Xoshiro256pp& gen, rng::NormalSampler& normal) const;

    // RMS angle of the untruncated law (used for regime diagnostics).
    double rms() const;
};

// Angular diffusion about a fixed axis (the planar case): the cumulative angle
// is a Wiener process with Var[theta(t)] = 2 * d1 * t.
struct Diffusion2D {
    double d1 = 0.0;
};

// Poisson-timed discrete reorientations: waiting times Exponential(tau_p),
// angles from angle_law, axis uniform in the plane perpendicular to the
// current momentum direction.
struct StrongCollision3D {
    double tau_p = 1.0;
    AngleLaw angle_law;
    double delta_t_c = 0.0;  // collision duration; 0 means tau_p / 1000
};

// Stationary Ornstein-Uhlenbeck angular velocity: three independent
// components, each with mean-square omega_sq_mean and exponential
// autocorrelation exp(-t/tau_c). omega_sq_mean is the per-component
// mean square <w_i^2>; the closed-form relaxation rate
// (4/3) dg_perp^2 <w^2> tau_c holds with this normalization.
struct OuAngularVelocity3D {
    double omega_sq_mean = 0.0;
    double tau_c = 1.0;
};

using StochasticModel =
    std::variant<Diffusion2D, StrongCollision3D, OuAngularVelocity3D>;

// The identification <w^2> tau_c := 1/tau_p, exposed so configurations may
// specify the noise through a momentum relaxation time instead.
inline double omega_sq_mean_from_tau_p(double tau_p, double tau_c) {
    return 1.0 / (tau_p * tau_c);
}

struct DiffusionPath {
    std::vector<double> theta;  // on the caller's grid, theta[0] = 0
    std::uint64_t seed = 0;     // derived stream seed (reproducibility token)
};

struct CollisionSequence {
    std::vector<double> times;  // strictly increasing, within [0, horizon)
    std::vector<CollisionEvent> events;
    double horizon = 0.0;
    std::uint64_t seed = 0;
};

struct OmegaPath {
    std::vector<Vec3> omega;  // on the caller's grid
    std::uint64_t seed = 0;
};

DiffusionPath sample_diffusion_2d(const Diffusion2D& model, const TimeGrid& grid,
                                  std::uint64_t root_seed, std::uint64_t traj_index);

CollisionSequence sample_collisions(const StrongCollision3D& model, double horizon,
                                    std::uint64_t root_seed, std::uint64_t traj_index);

OmegaPath sample_ou_omega(const OuAngularVelocity3D& model, const TimeGrid& grid,
                          std::uint64_t root_seed, std::uint64_t traj_index);

// Exact-discretization OU stepping (no Euler bias): w' = a w + s*sqrt(1-a^2) xi,
// a = exp(-dt/tau_c), initialized from the stationary distribution.
class OuStepper {
  public:
    OuStepper(const OuAngularVelocity3D& model, rng::Xoshiro256pp stream);

    const Vec3& current() const { return omega_; }
    const Vec3& advance(double dt);

  private:
    double tau_c_;
    double sigma_;
    rng::Xoshiro256pp gen_;
    rng::NormalSampler normal_;
    Vec3 omega_;
};

}  // namespace geodephase

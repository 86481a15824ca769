#pragma once

#include <cstdint>
#include <vector>

#include "geodephase/gamma.hpp"
#include "geodephase/stochastic.hpp"
#include "geodephase/su2.hpp"

namespace geodephase {

struct EnsembleSpec {
    StochasticModel model;
    GammaTensor gamma;
    long n_traj = 10000;
    TimeGrid grid;
    std::uint64_t root_seed = 0;
    Polarization initial_u{kZAxis};

    // Execution knobs; results are bit-identical for any worker count.
    int n_workers = 0;    // 0 = hardware concurrency
    double max_step = 0;  // 3D integration step cap, 0 = model-derived rule
};

// Ensemble average of the polarization on the readout grid. mean_uz carries
// the standard error; the transverse means are retained for diagnostics.
struct DecayCurve {
    std::vector<double> t;
    std::vector<double> mean_uz;
    std::vector<double> stderr_uz;
    std::vector<double> mean_ux;
    std::vector<double> mean_uy;
    long n_traj = 0;
};

// Planar angular diffusion about the fixed in-plane axis X: evaluated through
// the closed form u(t) = R_X(-dg_perp * theta(t)) u0 (no stepwise integration;
// the propagators all commute).
DecayCurve run_2d(const EnsembleSpec& spec);

// Discrete reorientations: per event a rotation of u by theta*dg_perp about
// the event axis expressed in lab coordinates, with the momentum direction
// tracked from event to event.
DecayCurve run_3d_collisions(const EnsembleSpec& spec);

// Continuous angular-velocity noise: accumulates the moving-frame propagator
// and the frame rotation as separate ordered products and reads out their
// difference (to_lab_frame) on the grid.
DecayCurve run_3d_ou(const EnsembleSpec& spec);

// Dispatch on the model variant.
DecayCurve run(const EnsembleSpec& spec);

// Integration step used by run_3d_ou after applying the resolution rules
// (exposed for convergence studies).
double ou_integration_step(const EnsembleSpec& spec);

}  // namespace geodephase

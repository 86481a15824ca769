#include "geodephase/ensemble.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

namespace geodephase {

namespace {

constexpr long kBlockSize = 1024;  // trajectories per reduction block

void validate_spec(const EnsembleSpec& spec) {
    if (spec.n_traj < 1) {
        throw std::invalid_argument("ensemble: n_traj must be >= 1");
    }
    if (!spec.grid.valid()) {
        throw std::invalid_argument("ensemble: invalid time grid");
    }
    if (spec.initial_u.norm() > 1.0 + 1e-12) {
        throw std::invalid_argument("ensemble: |initial_u| must be <= 1");
    }
}

struct BlockAccum {
    std::vector<double> sx, sy, sz, szz;

    explicit BlockAccum(int n) : sx(n, 0.0), sy(n, 0.0), sz(n, 0.0), szz(n, 0.0) {}

    void add(int i, const Vec3& u) {
        sx[i] += u.x;
        sy[i] += u.y;
        sz[i] += u.z;
        szz[i] += u.z * u.z;
    }
};

// Runs one trajectory per index, filling u at every grid point. Blocks of
// consecutive indices are accumulated separately and reduced in block order,
// so the result does not depend on how many workers ran or how blocks were
// scheduled.
DecayCurve run_blocks(const EnsembleSpec& spec,
                      const std::function<void(std::uint64_t, std::vector<Vec3>&)>& trajectory) {
    const int n_points = spec.grid.n_points;
    const long n_blocks = (spec.n_traj + kBlockSize - 1) / kBlockSize;

    std::vector<BlockAccum> blocks(n_blocks, BlockAccum(n_points));
    std::atomic<long> next_block{0};

    auto worker = [&] {
        std::vector<Vec3> u(n_points);
        for (;;) {
            const long b = next_block.fetch_add(1);
            if (b >= n_blocks) break;
            const long lo = b * kBlockSize;
            const long hi = std::min(lo + kBlockSize, spec.n_traj);
            for (long k = lo; k < hi; ++k) {
                trajectory(static_cast<std::uint64_t>(k), u);
                for (int i = 0; i < n_points; ++i) blocks[b].add(i, u[i]);
            }
        }
    };

    int n_workers = spec.n_workers > 0
                        ? spec.n_workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    if (n_workers < 1) n_workers = 1;
    n_workers = static_cast<int>(std::min<long>(n_workers, n_blocks));

    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    DecayCurve curve;
    curve.n_traj = spec.n_traj;
    curve.t.resize(n_points);
    curve.mean_uz.resize(n_points);
    curve.stderr_uz.resize(n_points);
    curve.mean_ux.resize(n_points);
    curve.mean_uy.resize(n_points);

    const double n = static_cast<double>(spec.n_traj);
    for (int i = 0; i < n_points; ++i) {
        double sx = 0.0, sy = 0.0, sz = 0.0, szz = 0.0;
        for (long b = 0; b < n_blocks; ++b) {  // fixed order
            sx += blocks[b].sx[i];
            sy += blocks[b].sy[i];
            sz += blocks[b].sz[i];
            szz += blocks[b].szz[i];
        }
        curve.t[i] = spec.grid.t(i);
        curve.mean_ux[i] = sx / n;
        curve.mean_uy[i] = sy / n;
        curve.mean_uz[i] = sz / n;
        if (spec.n_traj > 1) {
            const double var = std::max(0.0, (szz - sz * sz / n) / (n - 1.0));
            curve.stderr_uz[i] = std::sqrt(var / n);
        } else {
            curve.stderr_uz[i] = 0.0;
        }
    }

    // Every trajectory starts at exactly initial_u; pin the first point to the
    // exact value instead of the roundoff of summing n identical doubles.
    curve.mean_ux[0] = spec.initial_u.u.x;
    curve.mean_uy[0] = spec.initial_u.u.y;
    curve.mean_uz[0] = spec.initial_u.u.z;
    curve.stderr_uz[0] = 0.0;
    return curve;
}

}  // namespace

DecayCurve run_2d(const EnsembleSpec& spec) {
    validate_spec(spec);
    const auto* model = std::get_if<Diffusion2D>(&spec.model);
    if (!model) throw std::invalid_argument("run_2d: model is not Diffusion2D");

    const double dg = spec.gamma.delta_gamma_perp();
    const Vec3 u0 = spec.initial_u.u;

    return run_blocks(spec, [&](std::uint64_t traj, std::vector<Vec3>& out) {
        const DiffusionPath path =
            sample_diffusion_2d(*model, spec.grid, spec.root_seed, traj);
        for (int i = 0; i < spec.grid.n_points; ++i) {
            // R_X(-alpha) u0 with alpha = dg_perp * theta(t)
            const double a = dg * path.theta[i];
            const double c = std::cos(a), s = std::sin(a);
            out[i] = {u0.x, c * u0.y + s * u0.z, -s * u0.y + c * u0.z};
        }
    });
}

DecayCurve run_3d_collisions(const EnsembleSpec& spec) {
    validate_spec(spec);
    const auto* model = std::get_if<StrongCollision3D>(&spec.model);
    if (!model) {
        throw std::invalid_argument("run_3d_collisions: model is not StrongCollision3D");
    }

    const double dg = spec.gamma.delta_gamma_perp();
    const Vec3 u0 = spec.initial_u.u;

    return run_blocks(spec, [&](std::uint64_t traj, std::vector<Vec3>& out) {
        const CollisionSequence seq =
            sample_collisions(*model, spec.grid.t_max, spec.root_seed, traj);

        RotorChain lab;        // ordered product of per-event rotors
        RotorChain frame;      // orientation of the momentum frame
        std::size_t next_event = 0;
        for (int i = 0; i < spec.grid.n_points; ++i) {
            const double t = spec.grid.t(i);
            while (next_event < seq.events.size() && seq.times[next_event] <= t) {
                const CollisionEvent& e = seq.events[next_event];
                const Vec3 axis_lab = apply(frame.value(), e.axis);
                lab.push(Rotor::from_rotation_vector(axis_lab * (-e.theta * dg)));
                frame.push(Rotor::axis_angle(axis_lab, e.theta));
                ++next_event;
            }
            out[i] = apply(lab.value(), u0);
        }
    });
}

double ou_integration_step(const EnsembleSpec& spec) {
    const auto* model = std::get_if<OuAngularVelocity3D>(&spec.model);
    if (!model) {
        throw std::invalid_argument("ou_integration_step: model is not OuAngularVelocity3D");
    }
    const double omega_rms = std::sqrt(model->omega_sq_mean);
    const double dg = std::abs(spec.gamma.delta_gamma_perp());
    const double gmax = std::max({std::abs(spec.gamma.gamma_perp),
                                  std::abs(spec.gamma.gamma_par), 1.0});

    double dt_max = model->tau_c / 10.0;
    if (dg * omega_rms > 0.0) dt_max = std::min(dt_max, 0.1 / (dg * omega_rms));
    // keep single-step rotation angles small so the piecewise-constant
    // product resolves the axis wander
    if (omega_rms > 0.0) dt_max = std::min(dt_max, 0.1 / (omega_rms * gmax));

    if (spec.max_step > 0.0) {
        if (spec.max_step > dt_max * (1.0 + 1e-9)) {
            throw std::invalid_argument(
                "run_3d_ou: requested step too coarse for the noise scales");
        }
        dt_max = spec.max_step;
    }

    const double readout_dt = spec.grid.dt();
    const int substeps = std::max(1, static_cast<int>(std::ceil(readout_dt / dt_max)));
    return readout_dt / substeps;
}

DecayCurve run_3d_ou(const EnsembleSpec& spec) {
    validate_spec(spec);
    const auto* model = std::get_if<OuAngularVelocity3D>(&spec.model);
    if (!model) throw std::invalid_argument("run_3d_ou: model is not OuAngularVelocity3D");

    const double dt = ou_integration_step(spec);
    const int substeps = static_cast<int>(std::llround(spec.grid.dt() / dt));
    const Vec3 u0 = spec.initial_u.u;
    const GammaTensor g = spec.gamma;

    return run_blocks(spec, [&](std::uint64_t traj, std::vector<Vec3>& out) {
        OuStepper noise(*model, rng::Xoshiro256pp(spec.root_seed, traj));
        RotorChain moving;  // product of exp[+i dt/2 (w o gamma).sigma]
        RotorChain frame;   // same with gamma = 1

        out[0] = u0;
        noise.advance(0.5 * dt);  // sample omega at substep midpoints
        for (int i = 1; i < spec.grid.n_points; ++i) {
            for (int k = 0; k < substeps; ++k) {
                const Vec3& w = noise.current();
                moving.push(step_rotor(w, dt, g));
                frame.push(frame_step_rotor(w, dt));
                noise.advance(dt);
            }
            out[i] = apply(to_lab_frame(moving.value(), frame.value()), u0);
        }
    });
}

DecayCurve run(const EnsembleSpec& spec) {
    struct Visitor {
        const EnsembleSpec& spec;
        DecayCurve operator()(const Diffusion2D&) const { return run_2d(spec); }
        DecayCurve operator()(const StrongCollision3D&) const {
            return run_3d_collisions(spec);
        }
        DecayCurve operator()(const OuAngularVelocity3D&) const {
            return run_3d_ou(spec);
        }
    };
    return std::visit(Visitor{spec}, spec.model);
}

}  // namespace geodephase

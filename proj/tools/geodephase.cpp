#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "geodephase/bundle.hpp"
#include "geodephase/config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIo = 3;

void print_summary(const geodephase::ResultBundle& bundle) {
    using std::cout;
    for (const auto& w : bundle.warnings) cout << "warning: " << w << "\n";
    if (bundle.regime) {
        const auto& r = *bundle.regime;
        cout << "regime: adiabatic=" << (r.adiabatic ? "yes" : "no")
             << " perturbative=" << (r.perturbative ? "yes" : "no")
             << " fast_motional=" << (r.fast_motional ? "yes" : "no")
             << " (ratio " << r.fast_motional_ratio << ")\n";
        for (const auto& note : r.notes) cout << "regime note: " << note << "\n";
    }
    for (const auto& nc : bundle.curves) {
        cout << "curve " << nc.name;
        if (nc.fit) {
            cout << ": rate = " << nc.fit->rate << " +/- " << nc.fit->rate_stderr;
        }
        if (nc.oracle_rate) {
            cout << ", oracle = " << *nc.oracle_rate;
            if (nc.rel_deviation) {
                cout << " (deviation " << *nc.rel_deviation * 100.0 << "%)";
            }
        }
        cout << "\n";
    }
    if (bundle.scan) {
        const auto& s = *bundle.scan;
        cout << "elliott scan: slope = " << s.slope << " +/- " << s.slope_stderr
             << ", R^2 = " << s.r_squared;
        if (s.prefactor_defined) {
            cout << ", prefactor a = " << s.prefactor_a << " +/- "
                 << s.prefactor_a_stderr;
        } else {
            cout << ", prefactor a undefined (|delta_g|^2 = 0)";
        }
        cout << "\n";
    }
    for (const auto& e : bundle.oracle_table) {
        cout << "oracle " << e.name << " = " << e.value << "\n";
    }
    cout << "wall time: " << bundle.wall_seconds << " s\n";
}

int run_command(const std::string& config_path, const std::string& seed_arg,
                const std::string& out_arg, const std::string& formats_arg,
                bool oracle_only) {
    auto cfg = geodephase::load_config(config_path);
    if (!seed_arg.empty()) {
        cfg.root_seed = std::stoull(seed_arg);
        cfg.seed_given = true;
        cfg.echo["root_seed"] = cfg.root_seed;
    }
    if (!out_arg.empty()) {
        cfg.output_dir = out_arg;
        cfg.echo["output_dir"] = out_arg;
    }
    if (oracle_only) {
        if (!std::holds_alternative<geodephase::Diffusion2D>(cfg.model) &&
            !std::holds_alternative<geodephase::OuAngularVelocity3D>(cfg.model)) {
            throw geodephase::ValidationError(
                {"oracle: no closed form for strong-collision-3d models"});
        }
        cfg.scenario = geodephase::Scenario::oracle_table;
        cfg.echo["scenario"] = to_string(cfg.scenario);
    }

    const auto formats = geodephase::parse_formats(formats_arg);
    geodephase::ensure_writable_dir(cfg.output_dir);

    const auto bundle = geodephase::run_experiment(cfg);
    print_summary(bundle);

    const auto written =
        geodephase::export_bundle(bundle, cfg.output_dir, formats);
    for (const auto& p : written) std::cout << "wrote " << p.string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo relaxation of a pseudo spin-1/2 under stochastic "
                 "rotations"};
    app.require_subcommand(1);

    std::string config_path, seed_arg, out_arg, formats_arg = "csv,json,svg";

    auto* run = app.add_subcommand("run", "execute the experiment in a config");
    run->add_option("config", config_path, "config file (JSON)")->required();
    run->add_option("--seed", seed_arg, "override root_seed");
    run->add_option("--out", out_arg, "override output directory");
    run->add_option("--formats", formats_arg, "comma list of csv,json,svg");

    auto* oracle =
        app.add_subcommand("oracle", "evaluate the closed-form rates for a config");
    oracle->add_option("config", config_path, "config file (JSON)")->required();
    oracle->add_option("--out", out_arg, "override output directory");
    oracle->add_option("--formats", formats_arg, "comma list of csv,json,svg");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitValidation;
    }

    try {
        return run_command(config_path, seed_arg, out_arg, formats_arg,
                           oracle->parsed());
    } catch (const geodephase::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const geodephase::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const geodephase::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

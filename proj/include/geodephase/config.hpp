#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodephase/analysis.hpp"
#include "geodephase/gamma.hpp"
#include "geodephase/stochastic.hpp"

namespace geodephase {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Carries every violation found, not just the first.
struct ValidationError : std::runtime_error {
    explicit ValidationError(std::vector<std::string> violations);
    std::vector<std::string> violations;
};

enum class Scenario {
    decay_2d,
    decay_3d_collisions,
    decay_3d_ou,
    elliott_scan,
    oracle_table,
};

std::string to_string(Scenario s);

struct ExperimentConfig {
    int schema_version = 1;
    Scenario scenario = Scenario::decay_2d;
    GammaTensor gamma;
    StochasticModel model;
    long n_traj = 10000;
    TimeGrid grid{0.0, 200};
    std::uint64_t root_seed = 0;
    bool seed_given = false;
    std::string output_dir = "out";
    bool regime_check = false;
    std::optional<AdiabaticityParams> adiabaticity;
    std::optional<FitWindow> fit_window;
    std::vector<double> elliott_tau_p;

    std::vector<std::string> warnings;  // non-fatal issues found at load time
    nlohmann::json echo;                // canonical config, defaults filled
};

// Parses and validates an in-memory config document. Unknown fields are
// rejected; all violations are reported together in one ValidationError.
ExperimentConfig parse_config(const nlohmann::json& doc);

// Reads, parses and validates a config file. Throws ParseError with position
// context on malformed JSON.
ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a hash of the canonical (echoed) config text; embedded in every output.
std::uint64_t config_hash(const nlohmann::json& echo);

}  // namespace geodephase

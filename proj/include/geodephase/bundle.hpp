#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geodephase/analysis.hpp"
#include "geodephase/config.hpp"
#include "geodephase/regime.hpp"

namespace geodephase {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NamedCurve {
    std::string name;
    DecayCurve curve;
    std::optional<RateEstimate> fit;
    std::optional<double> oracle_rate;
    std::optional<double> rel_deviation;  // |fit - oracle| / oracle
};

struct OracleEntry {
    std::string name;
    double value;
};

// Everything one experiment produced, paired with its provenance. Wall-clock
// time is kept in memory for reporting but never serialized, so identical
// (config, seed) runs export identical bytes.
struct ResultBundle {
    int schema_version = 1;
    nlohmann::json config_echo;
    std::uint64_t config_hash = 0;
    std::uint64_t root_seed = 0;
    std::string rng_scheme;
    std::vector<std::string> warnings;
    std::optional<RegimeReport> regime;
    std::vector<NamedCurve> curves;
    std::optional<ElliottScan> scan;
    std::vector<OracleEntry> oracle_table;
    double wall_seconds = 0.0;
};

// Executes the configured scenario. Regime violations and load-time warnings
// surface in the bundle; only hard errors throw.
ResultBundle run_experiment(const ExperimentConfig& cfg);

struct ExportFormats {
    bool csv = true;
    bool json = true;
    bool svg = false;
};

// "csv,json,svg" -> flags; throws ValidationError on unknown names.
ExportFormats parse_formats(const std::string& spec);

// Serializable view of the bundle (schema_version 1).
nlohmann::json bundle_to_json(const ResultBundle& bundle);

// Strict schema check for re-loaded bundles: version must be 1 and unknown
// top-level fields are rejected rather than ignored.
void validate_bundle_json(const nlohmann::json& doc);

// Writes one CSV/SVG per curve plus bundle.json, whole-file atomically
// (temp + rename). Returns the paths written. Throws IoError.
std::vector<std::filesystem::path> export_bundle(const ResultBundle& bundle,
                                                 const std::filesystem::path& dir,
                                                 const ExportFormats& formats);

// Startup check that the output directory exists (created if needed) and is
// writable; throws IoError otherwise.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace geodephase

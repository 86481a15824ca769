#include "geodephase/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace geodephase {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

struct Checker {
    std::vector<std::string> violations;

    void fail(const std::string& msg) { violations.push_back(msg); }

    void reject_unknown_keys(const json& obj, const std::string& where,
                             const std::set<std::string>& allowed) {
        if (!obj.is_object()) return;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.contains(it.key())) {
                fail(where + ": unknown field \"" + it.key() + "\"");
            }
        }
    }

    bool require_object(const json& doc, const std::string& key) {
        if (!doc.contains(key)) {
            fail("missing required field \"" + key + "\"");
            return false;
        }
        if (!doc.at(key).is_object()) {
            fail("\"" + key + "\" must be an object");
            return false;
        }
        return true;
    }

    std::optional<double> number(const json& obj, const std::string& where,
                                 const std::string& key) {
        if (!obj.contains(key)) {
            fail(where + ": missing required field \"" + key + "\"");
            return std::nullopt;
        }
        if (!obj.at(key).is_number()) {
            fail(where + ": \"" + key + "\" must be a number");
            return std::nullopt;
        }
        return obj.at(key).get<double>();
    }
};

const std::vector<std::pair<Scenario, std::string>> kScenarioNames = {
    {Scenario::decay_2d, "decay-2d"},
    {Scenario::decay_3d_collisions, "decay-3d-collisions"},
    {Scenario::decay_3d_ou, "decay-3d-ou"},
    {Scenario::elliott_scan, "elliott-scan"},
    {Scenario::oracle_table, "oracle-table"},
};

}  // namespace

ValidationError::ValidationError(std::vector<std::string> v)
    : std::runtime_error("config validation failed:\n  - " + join(v, "\n  - ")),
      violations(std::move(v)) {}

std::string to_string(Scenario s) {
    for (const auto& [scenario, name] : kScenarioNames) {
        if (scenario == s) return name;
    }
    return "?";
}

ExperimentConfig parse_config(const json& doc) {
    Checker check;
    ExperimentConfig cfg;

    if (!doc.is_object()) {
        throw ValidationError({"top level: config must be a JSON object"});
    }
    check.reject_unknown_keys(
        doc, "top level",
        {"schema_version", "scenario", "gamma", "model", "n_traj", "t_grid",
         "root_seed", "output_dir", "regime_check", "adiabaticity", "fit_window",
         "elliott"});

    if (doc.contains("schema_version")) {
        if (!doc.at("schema_version").is_number_integer() ||
            doc.at("schema_version").get<int>() != 1) {
            check.fail("schema_version: only version 1 is supported");
        }
    }

    // --- scenario ---
    bool scenario_ok = false;
    if (!doc.contains("scenario") || !doc.at("scenario").is_string()) {
        check.fail("scenario: required string field");
    } else {
        const auto name = doc.at("scenario").get<std::string>();
        for (const auto& [scenario, sname] : kScenarioNames) {
            if (sname == name) {
                cfg.scenario = scenario;
                scenario_ok = true;
            }
        }
        if (!scenario_ok) check.fail("scenario: unknown scenario \"" + name + "\"");
    }

    // --- gamma: exactly one of the three forms ---
    json gamma_echo;
    if (check.require_object(doc, "gamma")) {
        const json& g = doc.at("gamma");
        const bool has_explicit = g.contains("gamma_par") || g.contains("gamma_perp");
        const bool has_delta = g.contains("delta_g_perp") || g.contains("delta_g_par");
        const bool has_jp = g.contains("jones_pines_i");
        const int forms = int(has_explicit) + int(has_delta) + int(has_jp);
        if (forms != 1) {
            check.fail("gamma: specify exactly one of (gamma_par, gamma_perp), "
                       "(delta_g_perp[, delta_g_par]), or jones_pines_i");
        } else if (has_explicit) {
            check.reject_unknown_keys(g, "gamma", {"gamma_par", "gamma_perp"});
            auto par = check.number(g, "gamma", "gamma_par");
            auto perp = check.number(g, "gamma", "gamma_perp");
            if (par && perp) {
                cfg.gamma = GammaTensor{*par, *perp};
                gamma_echo = {{"gamma_par", *par}, {"gamma_perp", *perp}};
            }
        } else if (has_delta) {
            check.reject_unknown_keys(g, "gamma", {"delta_g_perp", "delta_g_par"});
            auto dgp = check.number(g, "gamma", "delta_g_perp");
            double dga = 0.0;
            if (g.contains("delta_g_par")) {
                if (auto v = check.number(g, "gamma", "delta_g_par")) dga = *v;
            }
            if (dgp) {
                cfg.gamma = from_delta_g(*dgp, dga);
                gamma_echo = {{"delta_g_perp", *dgp}, {"delta_g_par", dga}};
            }
        } else {
            check.reject_unknown_keys(g, "gamma", {"jones_pines_i"});
            if (auto i = check.number(g, "gamma", "jones_pines_i")) {
                try {
                    cfg.gamma = jones_pines(*i);
                    gamma_echo = {{"jones_pines_i", *i}};
                } catch (const std::invalid_argument& e) {
                    check.fail(std::string("gamma: ") + e.what());
                }
            }
        }
        if (!cfg.gamma.first_order_valid()) {
            cfg.warnings.push_back(
                "gamma: |delta_g| >= 1 is outside the first-order regime");
        }
    }

    // --- model ---
    json model_echo;
    std::string model_type;
    if (check.require_object(doc, "model")) {
        const json& m = doc.at("model");
        if (!m.contains("type") || !m.at("type").is_string()) {
            check.fail("model: required string field \"type\"");
        } else {
            model_type = m.at("type").get<std::string>();
        }
        if (model_type == "diffusion-2d") {
            check.reject_unknown_keys(m, "model", {"type", "d1"});
            if (auto d1 = check.number(m, "model", "d1")) {
                if (*d1 < 0.0) check.fail("model: d1 must be >= 0");
                cfg.model = Diffusion2D{*d1};
                model_echo = {{"type", model_type}, {"d1", *d1}};
            }
        } else if (model_type == "strong-collision-3d") {
            check.reject_unknown_keys(m, "model",
                                      {"type", "tau_p", "angle_law", "delta_t_c"});
            auto tau_p = check.number(m, "model", "tau_p");
            StrongCollision3D sc;
            if (tau_p) {
                if (*tau_p <= 0.0) check.fail("model: tau_p must be > 0");
                sc.tau_p = *tau_p;
            }
            if (!m.contains("angle_law") || !m.at("angle_law").is_object()) {
                check.fail("model: required object field \"angle_law\"");
            } else {
                const json& al = m.at("angle_law");
                check.reject_unknown_keys(al, "model.angle_law", {"type", "value"});
                std::string alt =
                    al.contains("type") && al.at("type").is_string()
                        ? al.at("type").get<std::string>()
                        : "";
                auto value = check.number(al, "model.angle_law", "value");
                if (value) {
                    if (alt == "fixed") {
                        if (!(*value > -std::numbers::pi && *value <= std::numbers::pi)) {
                            check.fail("model.angle_law: fixed angle must be in (-pi, pi]");
                        }
                        sc.angle_law = AngleLaw::fixed(*value);
                    } else if (alt == "gaussian") {
                        if (*value < 0.0) check.fail("model.angle_law: sigma must be >= 0");
                        sc.angle_law = AngleLaw::gaussian(*value);
                    } else if (alt == "exponential") {
                        if (*value < 0.0) check.fail("model.angle_law: mean must be >= 0");
                        sc.angle_law = AngleLaw::exponential(*value);
                    } else {
                        check.fail("model.angle_law: type must be fixed, gaussian or exponential");
                    }
                }
                model_echo = {{"type", model_type},
                              {"tau_p", sc.tau_p},
                              {"angle_law", {{"type", alt}, {"value", value ? *value : 0.0}}}};
            }
            if (m.contains("delta_t_c")) {
                if (auto dtc = check.number(m, "model", "delta_t_c")) {
                    if (*dtc <= 0.0) check.fail("model: delta_t_c must be > 0");
                    sc.delta_t_c = *dtc;
                }
            } else {
                sc.delta_t_c = sc.tau_p * 1e-3;
            }
            if (sc.delta_t_c > 0.1 * sc.tau_p) {
                cfg.warnings.push_back(
                    "model: delta_t_c is not small against tau_p; collisions are "
                    "not well separated");
            }
            if (model_echo.is_object()) model_echo["delta_t_c"] = sc.delta_t_c;
            cfg.model = sc;
        } else if (model_type == "ou-3d") {
            check.reject_unknown_keys(m, "model",
                                      {"type", "omega_sq_mean", "tau_c", "tau_p"});
            auto tau_c = check.number(m, "model", "tau_c");
            OuAngularVelocity3D ou;
            if (tau_c) {
                if (*tau_c <= 0.0) check.fail("model: tau_c must be > 0");
                ou.tau_c = *tau_c;
            }
            const bool has_w2 = m.contains("omega_sq_mean");
            const bool has_tp = m.contains("tau_p");
            if (has_w2 == has_tp) {
                check.fail("model: specify exactly one of omega_sq_mean or tau_p "
                           "(<w^2> tau_c = 1/tau_p)");
            } else if (has_w2) {
                if (auto w2 = check.number(m, "model", "omega_sq_mean")) {
                    if (*w2 < 0.0) check.fail("model: omega_sq_mean must be >= 0");
                    ou.omega_sq_mean = *w2;
                }
            } else if (tau_c) {
                if (auto tp = check.number(m, "model", "tau_p")) {
                    if (*tp <= 0.0) check.fail("model: tau_p must be > 0");
                    ou.omega_sq_mean = omega_sq_mean_from_tau_p(*tp, *tau_c);
                }
            }
            cfg.model = ou;
            model_echo = {{"type", model_type},
                          {"omega_sq_mean", ou.omega_sq_mean},
                          {"tau_c", ou.tau_c}};
        } else if (!model_type.empty()) {
            check.fail("model: unknown type \"" + model_type + "\"");
        }
    }

    // --- scenario / model consistency ---
    if (scenario_ok && !model_type.empty()) {
        auto needs = [&](const char* t) {
            if (model_type != t) {
                check.fail("scenario " + to_string(cfg.scenario) +
                           " requires model type \"" + t + "\"");
            }
        };
        switch (cfg.scenario) {
            case Scenario::decay_2d:
                needs("diffusion-2d");
                break;
            case Scenario::decay_3d_collisions:
            case Scenario::elliott_scan:
                needs("strong-collision-3d");
                break;
            case Scenario::decay_3d_ou:
                needs("ou-3d");
                break;
            case Scenario::oracle_table:
                if (model_type == "strong-collision-3d") {
                    check.fail("scenario oracle-table has no closed form for "
                               "strong-collision-3d models");
                }
                break;
        }
    }

    // --- plain fields ---
    if (doc.contains("n_traj")) {
        if (!doc.at("n_traj").is_number_integer() || doc.at("n_traj").get<long>() < 1) {
            check.fail("n_traj: must be a positive integer");
        } else {
            cfg.n_traj = doc.at("n_traj").get<long>();
        }
    }

    if (check.require_object(doc, "t_grid")) {
        const json& tg = doc.at("t_grid");
        check.reject_unknown_keys(tg, "t_grid", {"t_max", "n_points"});
        if (auto tmax = check.number(tg, "t_grid", "t_max")) {
            if (*tmax <= 0.0) check.fail("t_grid: t_max must be > 0");
            cfg.grid.t_max = *tmax;
        }
        if (tg.contains("n_points")) {
            if (!tg.at("n_points").is_number_integer() ||
                tg.at("n_points").get<int>() < 2) {
                check.fail("t_grid: n_points must be an integer >= 2");
            } else {
                cfg.grid.n_points = tg.at("n_points").get<int>();
            }
        }
    }

    if (doc.contains("root_seed")) {
        if (!doc.at("root_seed").is_number_unsigned() &&
            !doc.at("root_seed").is_number_integer()) {
            check.fail("root_seed: must be a nonnegative integer");
        } else {
            cfg.root_seed = doc.at("root_seed").get<std::uint64_t>();
            cfg.seed_given = true;
        }
    } else if (cfg.scenario != Scenario::oracle_table) {
        check.fail("root_seed: required for stochastic scenarios");
    }

    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string()) {
            check.fail("output_dir: must be a string");
        } else {
            cfg.output_dir = doc.at("output_dir").get<std::string>();
        }
    }

    if (doc.contains("regime_check")) {
        if (!doc.at("regime_check").is_boolean()) {
            check.fail("regime_check: must be a boolean");
        } else {
            cfg.regime_check = doc.at("regime_check").get<bool>();
        }
    }

    if (doc.contains("adiabaticity")) {
        const json& a = doc.at("adiabaticity");
        check.reject_unknown_keys(a, "adiabaticity",
                                  {"lambda_soc", "delta_e", "tau_p"});
        auto lam = check.number(a, "adiabaticity", "lambda_soc");
        auto de = check.number(a, "adiabaticity", "delta_e");
        auto tp = check.number(a, "adiabaticity", "tau_p");
        if (lam && de && tp) {
            if (*de <= 0.0) check.fail("adiabaticity: delta_e must be > 0");
            if (*tp <= 0.0) check.fail("adiabaticity: tau_p must be > 0");
            cfg.adiabaticity = AdiabaticityParams{*lam, *de, *tp};
        }
    }

    if (doc.contains("fit_window")) {
        const json& fw = doc.at("fit_window");
        if (!fw.is_array() || fw.size() != 2 || !fw[0].is_number() ||
            !fw[1].is_number()) {
            check.fail("fit_window: must be [t_lo, t_hi]");
        } else {
            const double lo = fw[0].get<double>(), hi = fw[1].get<double>();
            if (!(lo >= 0.0 && hi > lo)) {
                check.fail("fit_window: need 0 <= t_lo < t_hi");
            } else {
                cfg.fit_window = FitWindow{lo, hi};
            }
        }
    }

    if (cfg.scenario == Scenario::elliott_scan || doc.contains("elliott")) {
        if (!doc.contains("elliott") || !doc.at("elliott").is_object()) {
            check.fail("elliott: required object for the elliott-scan scenario");
        } else {
            const json& e = doc.at("elliott");
            check.reject_unknown_keys(e, "elliott", {"tau_p_values"});
            if (!e.contains("tau_p_values") || !e.at("tau_p_values").is_array() ||
                e.at("tau_p_values").size() < 3) {
                check.fail("elliott: tau_p_values must be an array of >= 3 values");
            } else {
                for (const auto& v : e.at("tau_p_values")) {
                    if (!v.is_number() || v.get<double>() <= 0.0) {
                        check.fail("elliott: tau_p_values must be positive numbers");
                        cfg.elliott_tau_p.clear();
                        break;
                    }
                    cfg.elliott_tau_p.push_back(v.get<double>());
                }
                if (cfg.elliott_tau_p.size() >= 2) {
                    const auto [mn, mx] = std::minmax_element(
                        cfg.elliott_tau_p.begin(), cfg.elliott_tau_p.end());
                    if (*mx / *mn < 4.0) {
                        check.fail("elliott: tau_p_values must span at least a 4x range");
                    }
                }
            }
        }
    }

    if (!check.violations.empty()) throw ValidationError(std::move(check.violations));

    // --- canonical echo with defaults filled ---
    json echo;
    echo["schema_version"] = 1;
    echo["scenario"] = to_string(cfg.scenario);
    echo["gamma"] = gamma_echo;
    echo["model"] = model_echo;
    echo["n_traj"] = cfg.n_traj;
    echo["t_grid"] = {{"t_max", cfg.grid.t_max}, {"n_points", cfg.grid.n_points}};
    if (cfg.seed_given) echo["root_seed"] = cfg.root_seed;
    echo["output_dir"] = cfg.output_dir;
    echo["regime_check"] = cfg.regime_check;
    if (cfg.adiabaticity) {
        echo["adiabaticity"] = {{"lambda_soc", cfg.adiabaticity->lambda_soc},
                                {"delta_e", cfg.adiabaticity->delta_e},
                                {"tau_p", cfg.adiabaticity->tau_p}};
    }
    if (cfg.fit_window) {
        echo["fit_window"] = {cfg.fit_window->t_lo, cfg.fit_window->t_hi};
    }
    if (!cfg.elliott_tau_p.empty()) {
        echo["elliott"] = {{"tau_p_values", cfg.elliott_tau_p}};
    }
    cfg.echo = std::move(echo);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file: " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return parse_config(doc);
}

std::uint64_t config_hash(const nlohmann::json& echo) {
    const std::string text = echo.dump();
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace geodephase

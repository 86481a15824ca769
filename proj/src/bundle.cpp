#include "geodephase/bundle.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace geodephase {

namespace {

using nlohmann::json;

constexpr const char* kRngScheme =
    "splitmix64-seeded xoshiro256++; stream(k) seeded by "
    "mix64(root_seed ^ mix64(k + 1)); trajectory k always uses stream k";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') {
            out += c;
        } else {
            out += '_';
        }
    }
    return out.empty() ? "curve" : out;
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << text;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed for " + path.string() + ": " + ec.message());
}

std::string provenance_comment(const ResultBundle& b) {
    std::ostringstream os;
    os << "# config_hash=0x" << std::hex << b.config_hash << std::dec << "\n"
       << "# root_seed=" << b.root_seed << "\n";
    return os.str();
}

std::string curve_csv(const ResultBundle& b, const DecayCurve& c) {
    std::ostringstream os;
    os << "t,mean_uz,stderr_uz\n";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        os << fmt_double(c.t[i]) << ',' << fmt_double(c.mean_uz[i]) << ','
           << fmt_double(c.stderr_uz[i]) << "\n";
    }
    os << provenance_comment(b);
    return os.str();
}

// Minimal standalone line plot: simulation polyline plus the analytic decay
// overlay when an oracle rate exists.
std::string curve_svg(const ResultBundle& b, const NamedCurve& nc) {
    const DecayCurve& c = nc.curve;
    const double width = 640, height = 420;
    const double ml = 60, mr = 20, mt = 30, mb = 45;
    const double pw = width - ml - mr, ph = height - mt - mb;

    double ymin = 0.0, ymax = 1.0;
    for (double v : c.mean_uz) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
    }
    const double t_max = c.t.empty() ? 1.0 : c.t.back();
    auto X = [&](double t) { return ml + (t_max > 0 ? t / t_max : 0.0) * pw; };
    auto Y = [&](double v) { return mt + (ymax - v) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
       << height << "\">\n";
    os << "<!-- config_hash=0x" << std::hex << b.config_hash << std::dec
       << " root_seed=" << b.root_seed << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw
       << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
       << "\" y2=\"" << mt + ph << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = t_max * k / 4.0;
        const double v = ymin + (ymax - ymin) * k / 4.0;
        os << "<text x=\"" << X(t) << "\" y=\"" << mt + ph + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt_double(t)
           << "</text>\n";
        os << "<text x=\"" << ml - 6 << "\" y=\"" << Y(v) + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << fmt_double(v)
           << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 8
       << "\" font-size=\"12\" text-anchor=\"middle\">t</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << mt + ph / 2 << ")\">mean_uz</text>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"18\" font-size=\"13\" "
          "text-anchor=\"middle\">"
       << nc.name << "</text>\n";

    os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.4\" points=\"";
    for (std::size_t i = 0; i < c.t.size(); ++i) {
        os << X(c.t[i]) << ',' << Y(c.mean_uz[i]) << ' ';
    }
    os << "\"/>\n";

    if (nc.oracle_rate) {
        os << "<polyline fill=\"none\" stroke=\"#c03020\" stroke-width=\"1.2\" "
              "stroke-dasharray=\"6 4\" points=\"";
        const double u0 = c.mean_uz.empty() ? 1.0 : c.mean_uz.front();
        for (std::size_t i = 0; i < c.t.size(); ++i) {
            os << X(c.t[i]) << ',' << Y(u0 * std::exp(-*nc.oracle_rate * c.t[i]))
               << ' ';
        }
        os << "\"/>\n";
        os << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 16
           << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#c03020\">oracle "
              "exp(-rate t)</text>\n";
    }
    os << "<text x=\"" << ml + pw - 8 << "\" y=\"" << mt + 32
       << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#1f4e9c\">simulation"
          "</text>\n";
    os << "</svg>\n";
    return os.str();
}

json curve_to_json(const DecayCurve& c) {
    return {{"t", c.t},
            {"mean_uz", c.mean_uz},
            {"stderr_uz", c.stderr_uz},
            {"mean_ux", c.mean_ux},
            {"mean_uy", c.mean_uy},
            {"n_traj", c.n_traj}};
}

json fit_to_json(const RateEstimate& f) {
    return {{"rate", f.rate},
            {"rate_stderr", f.rate_stderr},
            {"window", {f.window.t_lo, f.window.t_hi}},
            {"residual_rms", f.residual_rms},
            {"method", f.method == RateEstimate::Method::nonlinear_ls
                           ? "nonlinear-LS"
                           : "log-linear"},
            {"non_exponential", f.non_exponential}};
}

json regime_to_json(const RegimeReport& r) {
    return {{"adiabatic", r.adiabatic},
            {"perturbative", r.perturbative},
            {"fast_motional", r.fast_motional},
            {"adiabaticity_ratio", r.adiabaticity_ratio},
            {"perturbation_ratio", r.perturbation_ratio},
            {"fast_motional_ratio", r.fast_motional_ratio},
            {"adiabatic_threshold", r.adiabatic_threshold},
            {"fast_motional_threshold", r.fast_motional_threshold},
            {"notes", r.notes}};
}

double rel_dev(double fitted, double oracle) {
    return oracle != 0.0 ? std::abs(fitted - oracle) / std::abs(oracle)
                         : std::abs(fitted);
}

}  // namespace

ResultBundle run_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();

    ResultBundle bundle;
    bundle.config_echo = cfg.echo;
    bundle.config_hash = config_hash(cfg.echo);
    bundle.root_seed = cfg.root_seed;
    bundle.rng_scheme = kRngScheme;
    bundle.warnings = cfg.warnings;

    if (cfg.regime_check) {
        AdiabaticityParams a = cfg.adiabaticity.value_or(AdiabaticityParams{});
        RegimeReport report = validate_regime(cfg.gamma, a, cfg.model);
        if (!cfg.adiabaticity) {
            report.notes.push_back(
                "adiabaticity parameters not provided; isolation ratios nominal");
        }
        bundle.regime = std::move(report);
    }

    EnsembleSpec spec;
    spec.model = cfg.model;
    spec.gamma = cfg.gamma;
    spec.n_traj = cfg.n_traj;
    spec.grid = cfg.grid;
    spec.root_seed = cfg.root_seed;

    switch (cfg.scenario) {
        case Scenario::decay_2d: {
            NamedCurve nc;
            nc.name = "decay2d";
            nc.curve = run_2d(spec);
            nc.fit = fit_rate(nc.curve, cfg.fit_window);
            nc.oracle_rate =
                oracle_rate_2d(cfg.gamma, std::get<Diffusion2D>(cfg.model).d1);
            nc.rel_deviation = rel_dev(nc.fit->rate, *nc.oracle_rate);
            bundle.curves.push_back(std::move(nc));
            break;
        }
        case Scenario::decay_3d_collisions: {
            NamedCurve nc;
            nc.name = "decay3d_collisions";
            nc.curve = run_3d_collisions(spec);
            nc.fit = fit_rate(nc.curve, cfg.fit_window);
            bundle.curves.push_back(std::move(nc));
            break;
        }
        case Scenario::decay_3d_ou: {
            const auto& ou = std::get<OuAngularVelocity3D>(cfg.model);
            NamedCurve nc;
            nc.name = "decay3d_ou";
            nc.curve = run_3d_ou(spec);
            nc.fit = fit_rate(nc.curve, cfg.fit_window);
            nc.oracle_rate = oracle_rate_3d(cfg.gamma, ou.omega_sq_mean, ou.tau_c);
            nc.rel_deviation = rel_dev(nc.fit->rate, *nc.oracle_rate);
            bundle.curves.push_back(std::move(nc));
            break;
        }
        case Scenario::elliott_scan: {
            ElliottScan scan = elliott_scan(spec, cfg.elliott_tau_p);
            for (std::size_t i = 0; i < scan.curves.size(); ++i) {
                NamedCurve nc;
                std::ostringstream name;
                name << "tau_p_" << scan.tau_p_values[i];
                nc.name = sanitize(name.str());
                nc.curve = std::move(scan.curves[i]);
                nc.fit = scan.fits[i];
                bundle.curves.push_back(std::move(nc));
            }
            scan.curves.clear();
            bundle.scan = std::move(scan);
            break;
        }
        case Scenario::oracle_table: {
            if (const auto* d = std::get_if<Diffusion2D>(&cfg.model)) {
                const double rate = oracle_rate_2d(cfg.gamma, d->d1);
                bundle.oracle_table.push_back({"rate_2d", rate});
                NamedCurve nc;
                nc.name = "gaussian_average";
                nc.oracle_rate = rate;
                nc.curve.n_traj = 0;
                for (int i = 0; i < cfg.grid.n_points; ++i) {
                    const double t = cfg.grid.t(i);
                    nc.curve.t.push_back(t);
                    nc.curve.mean_uz.push_back(
                        gaussian_average_oracle(cfg.gamma, d->d1, t));
                    nc.curve.stderr_uz.push_back(0.0);
                    nc.curve.mean_ux.push_back(0.0);
                    nc.curve.mean_uy.push_back(0.0);
                }
                bundle.curves.push_back(std::move(nc));
            } else if (const auto* ou = std::get_if<OuAngularVelocity3D>(&cfg.model)) {
                bundle.oracle_table.push_back(
                    {"rate_3d", oracle_rate_3d(cfg.gamma, ou->omega_sq_mean, ou->tau_c)});
            }
            bundle.oracle_table.push_back(
                {"delta_gamma_perp", cfg.gamma.delta_gamma_perp()});
            bundle.oracle_table.push_back(
                {"delta_g_norm_sq", cfg.gamma.delta_g_norm_sq()});
            break;
        }
    }

    bundle.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return bundle;
}

ExportFormats parse_formats(const std::string& spec) {
    ExportFormats f{false, false, false};
    std::stringstream ss(spec);
    std::string tok;
    std::vector<std::string> bad;
    while (std::getline(ss, tok, ',')) {
        if (tok == "csv") {
            f.csv = true;
        } else if (tok == "json") {
            f.json = true;
        } else if (tok == "svg") {
            f.svg = true;
        } else if (!tok.empty()) {
            bad.push_back("formats: unknown format \"" + tok + "\"");
        }
    }
    if (!bad.empty()) throw ValidationError(bad);
    if (!f.csv && !f.json && !f.svg) {
        throw ValidationError({"formats: at least one of csv,json,svg required"});
    }
    return f;
}

json bundle_to_json(const ResultBundle& b) {
    std::ostringstream hash;
    hash << "0x" << std::hex << b.config_hash;

    json curves = json::array();
    for (const auto& nc : b.curves) {
        json jc;
        jc["name"] = nc.name;
        jc["curve"] = curve_to_json(nc.curve);
        if (nc.fit) jc["fit"] = fit_to_json(*nc.fit);
        if (nc.oracle_rate) jc["oracle_rate"] = *nc.oracle_rate;
        if (nc.rel_deviation) jc["rel_deviation"] = *nc.rel_deviation;
        curves.push_back(std::move(jc));
    }

    json doc;
    doc["schema_version"] = b.schema_version;
    doc["config"] = b.config_echo;
    doc["config_hash"] = hash.str();
    doc["root_seed"] = b.root_seed;
    doc["rng_scheme"] = b.rng_scheme;
    doc["warnings"] = b.warnings;
    if (b.regime) doc["regime"] = regime_to_json(*b.regime);
    doc["curves"] = std::move(curves);
    if (b.scan) {
        const auto& s = *b.scan;
        doc["elliott_scan"] = {{"tau_p_values", s.tau_p_values},
                               {"fitted_rates", s.fitted_rates},
                               {"rate_stderrs", s.rate_stderrs},
                               {"prefactors", s.prefactors},
                               {"slope", s.slope},
                               {"slope_stderr", s.slope_stderr},
                               {"r_squared", s.r_squared},
                               {"delta_g_norm_sq", s.delta_g_norm_sq},
                               {"prefactor_a", s.prefactor_a},
                               {"prefactor_a_stderr", s.prefactor_a_stderr},
                               {"prefactor_defined", s.prefactor_defined}};
    }
    if (!b.oracle_table.empty()) {
        json table = json::array();
        for (const auto& e : b.oracle_table) {
            table.push_back({{"name", e.name}, {"value", e.value}});
        }
        doc["oracle_table"] = std::move(table);
    }
    return doc;
}

void validate_bundle_json(const json& doc) {
    std::vector<std::string> bad;
    if (!doc.is_object()) {
        throw ValidationError({"bundle: not a JSON object"});
    }
    if (!doc.contains("schema_version") ||
        !doc.at("schema_version").is_number_integer() ||
        doc.at("schema_version").get<int>() != 1) {
        bad.push_back("bundle: schema_version must be 1");
    }
    static const std::set<std::string> allowed = {
        "schema_version", "config",  "config_hash", "root_seed", "rng_scheme",
        "warnings",       "regime",  "curves",      "elliott_scan",
        "oracle_table"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!allowed.contains(it.key())) {
            bad.push_back("bundle: unknown field \"" + it.key() + "\"");
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad));
}

std::vector<std::filesystem::path> export_bundle(const ResultBundle& bundle,
                                                 const std::filesystem::path& dir,
                                                 const ExportFormats& formats) {
    ensure_writable_dir(dir);
    std::vector<std::filesystem::path> written;

    if (formats.csv) {
        for (const auto& nc : bundle.curves) {
            const auto path = dir / (sanitize(nc.name) + ".csv");
            atomic_write(path, curve_csv(bundle, nc.curve));
            written.push_back(path);
        }
    }
    if (formats.svg) {
        for (const auto& nc : bundle.curves) {
            const auto path = dir / (sanitize(nc.name) + ".svg");
            atomic_write(path, curve_svg(bundle, nc));
            written.push_back(path);
        }
    }
    if (formats.json) {
        const auto path = dir / "bundle.json";
        atomic_write(path, bundle_to_json(bundle).dump(2) + "\n");
        written.push_back(path);
    }
    return written;
}

void ensure_writable_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + dir.string() + ": " +
                      ec.message());
    }
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) {
            throw IoError("output directory not writable: " + dir.string());
        }
    }
    std::filesystem::remove(probe, ec);
}

}  // namespace geodephase

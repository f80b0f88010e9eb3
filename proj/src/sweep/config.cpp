#include "dickestat/errors.hpp"
#include "dickestat/io.hpp"
#include "dickestat/sweep.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

namespace dickestat::sweep {

namespace {

std::string to_string(Mode m) { return m == Mode::direct ? "direct" : "scaled"; }

std::string to_string(FitMode m) {
    switch (m) {
        case FitMode::per_point: return "per_point";
        case FitMode::windowed: return "windowed";
        case FitMode::pooled: return "pooled";
    }
    return "per_point";
}

FitMode fit_mode_from(const std::string& s) {
    if (s == "per_point") return FitMode::per_point;
    if (s == "windowed") return FitMode::windowed;
    if (s == "pooled") return FitMode::pooled;
    throw ConfigError("fit_mode must be per_point|windowed|pooled, got '" + s + "'");
}

void reject_unknown(const ordered_json& j, const std::set<std::string>& allowed, std::string_view where) {
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw ConfigError(fmt::format("unknown key '{}' in {}", key, where));
}

std::vector<double> photon_grid_from(const ordered_json& g) {
    if (g.is_array()) return g.get<std::vector<double>>();
    if (!g.is_object()) throw ConfigError("grid.photon_mean must be a list or {start, stop, step}");
    reject_unknown(g, {"start", "stop", "step"}, "grid.photon_mean");
    const double start = g.at("start").get<double>();
    const double stop = g.at("stop").get<double>();
    const double step = g.value("step", 1.0);
    if (!(step > 0.0) || stop < start) throw ConfigError("photon_mean range needs step > 0 and stop >= start");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
}

}  // namespace

ordered_json to_json(const SweepSpec& spec) {
    ordered_json j;
    j["mode"] = to_string(spec.mode);
    if (spec.mode == Mode::direct) {
        j["params"] = {{"omega_field", spec.params.omega_field},
                       {"omega_atom", spec.params.omega_atom},
                       {"coupling", spec.params.coupling},
                       {"n_atoms", spec.params.n_atoms}};
    } else if (spec.constants) {
        j["constants"] = {{"c_field", spec.constants->c_field},
                          {"c_atom", spec.constants->c_atom},
                          {"c_int", spec.constants->c_int}};
    } else {
        j["ratios"] = {{"field", spec.field_ratio},
                       {"coupling", spec.coupling_ratio},
                       {"omega_atom_ref", spec.omega_atom_ref}};
        j["reference"] = {{"n_atoms", spec.reference_n_atoms},
                          {"photon_mean", spec.reference_photon_mean}};
    }
    ordered_json grid;
    grid["photon_mean"] = spec.photon_grid;
    grid["n_atoms"] = spec.atom_grid;
    ordered_json labels = ordered_json::array();
    for (int two_m : spec.label_filters) labels.push_back(0.5 * two_m);
    grid["m"] = labels;
    j["grid"] = grid;
    j["levels"] = spec.levels;
    j["degree"] = spec.degree;
    j["trim_fraction"] = spec.trim_fraction;
    j["seed"] = spec.seed;
    j["sector"] = model::to_string(spec.sector);
    j["label_rule"] = model::to_string(spec.label_rule);
    j["tolerance"] = spec.tolerance;
    j["cutoffs"] = spec.cutoffs;
    j["max_dimension"] = spec.max_dimension;
    j["fit_mode"] = to_string(spec.fit_mode);
    j["window"] = spec.window;
    j["threads"] = spec.threads;
    return j;
}

SweepSpec spec_from_json(const ordered_json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        reject_unknown(j,
                       {"mode", "params", "constants", "ratios", "reference", "grid", "levels", "degree",
                        "trim_fraction", "seed", "sector", "label_rule", "tolerance", "cutoffs",
                        "max_dimension", "fit_mode", "window", "threads"},
                       "config");
        SweepSpec spec;
        const std::string mode = j.value("mode", std::string("scaled"));
        if (mode == "direct")
            spec.mode = Mode::direct;
        else if (mode == "scaled")
            spec.mode = Mode::scaled;
        else
            throw ConfigError("mode must be direct|scaled, got '" + mode + "'");

        if (j.contains("params")) {
            const auto& p = j.at("params");
            reject_unknown(p, {"omega_field", "omega_atom", "coupling", "n_atoms"}, "params");
            spec.params.omega_field = p.value("omega_field", 1.0);
            spec.params.omega_atom = p.value("omega_atom", 1.0);
            spec.params.coupling = p.value("coupling", 0.0);
            spec.params.n_atoms = p.value("n_atoms", 1);
        } else if (spec.mode == Mode::direct) {
            throw ConfigError("direct mode requires a params block");
        }
        if (j.contains("constants")) {
            const auto& c = j.at("constants");
            reject_unknown(c, {"c_field", "c_atom", "c_int"}, "constants");
            spec.constants = model::ScalingConstants{c.at("c_field").get<double>(), c.at("c_atom").get<double>(),
                                                     c.at("c_int").get<double>()};
        }
        if (j.contains("ratios")) {
            const auto& r = j.at("ratios");
            reject_unknown(r, {"field", "coupling", "omega_atom_ref"}, "ratios");
            spec.field_ratio = r.at("field").get<double>();
            spec.coupling_ratio = r.at("coupling").get<double>();
            spec.omega_atom_ref = r.value("omega_atom_ref", 1.0);
        }
        if (j.contains("reference")) {
            const auto& r = j.at("reference");
            reject_unknown(r, {"n_atoms", "photon_mean"}, "reference");
            spec.reference_n_atoms = r.value("n_atoms", spec.reference_n_atoms);
            spec.reference_photon_mean = r.value("photon_mean", spec.reference_photon_mean);
        }
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            reject_unknown(g, {"photon_mean", "n_atoms", "m"}, "grid");
            if (g.contains("photon_mean")) spec.photon_grid = photon_grid_from(g.at("photon_mean"));
            if (g.contains("n_atoms")) spec.atom_grid = g.at("n_atoms").get<std::vector<int>>();
            if (g.contains("m"))
                for (double m : g.at("m").get<std::vector<double>>()) {
                    try {
                        spec.label_filters.push_back(io::parse_half_integer(m));
                    } catch (const Error& e) {
                        throw ConfigError(std::string("grid.m: ") + e.what());
                    }
                }
        }
        spec.levels = j.value("levels", spec.levels);
        spec.degree = j.value("degree", spec.degree);
        spec.trim_fraction = j.value("trim_fraction", spec.trim_fraction);
        spec.seed = j.value("seed", spec.seed);
        try {
            spec.sector = model::sector_from_string(j.value("sector", std::string("even")));
            spec.label_rule =
                model::label_rule_from_string(j.value("label_rule", std::string("dominant_component")));
        } catch (const ArgumentError& e) {
            throw ConfigError(e.what());
        }
        spec.tolerance = j.value("tolerance", spec.tolerance);
        if (j.contains("cutoffs")) spec.cutoffs = j.at("cutoffs").get<std::vector<int>>();
        spec.max_dimension = j.value("max_dimension", spec.max_dimension);
        spec.fit_mode = fit_mode_from(j.value("fit_mode", std::string("per_point")));
        spec.window = j.value("window", spec.window);
        spec.threads = j.value("threads", spec.threads);

        // Parameter sets with labels must stay consistent with the basis.
        if (!spec.label_filters.empty()) {
            std::vector<int> atoms = spec.atom_grid;
            if (atoms.empty())
                atoms.push_back(spec.mode == Mode::scaled ? spec.reference_n_atoms : spec.params.n_atoms);
            for (int n : atoms)
                for (int two_m : spec.label_filters)
                    if (std::abs(two_m) > n || (two_m + n) % 2 != 0)
                        throw ConfigError(fmt::format("m = {} is not a spin projection for N_A = {}",
                                                      io::format_half_integer(two_m), n));
        }
        spec.validate();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
}

}  // namespace dickestat::sweep

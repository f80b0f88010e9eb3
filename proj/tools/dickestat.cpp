// dickestat: spectra of N two-level atoms coupled to one field mode, spectral
// unfolding and Berry-Robnik maximum-likelihood fits.
//
// Exit codes: 0 success, 2 when some sweep points (or validation checks)
// failed, 1 for configuration, I/O and other errors.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dickestat/errors.hpp"
#include "dickestat/io.hpp"
#include "dickestat/model.hpp"
#include "dickestat/stats.hpp"
#include "dickestat/sweep.hpp"
#include "dickestat/unfold.hpp"
#include "dickestat/validate.hpp"

namespace fs = std::filesystem;
using namespace dickestat;
using nlohmann::ordered_json;

namespace {

ordered_json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(fmt::format("{}: {}", path, e.what()));
    }
}

struct SpectrumArgs {
    double omega_field = 1.0;
    double omega_atom = 1.0;
    double coupling = 0.2;
    int n_atoms = 21;
    std::optional<double> photon_mean;  // scaled mode when set
    double field_ratio = 1.0;
    double coupling_ratio = 0.2;
    double reference_photon_mean = 40.0;
    std::size_t levels = 250;
    std::string sector = "even";
    std::string label_rule = "dominant_component";
    std::optional<double> m_filter;
    std::vector<int> cutoffs;
    double tolerance = 1e-8;
};

int run_spectrum(const SpectrumArgs& a, const fs::path& out) {
    io::prepare_output_dir(out);
    model::ModelParams params;
    ordered_json source;
    if (a.photon_mean) {
        const auto consts = model::constants_from_ratios(a.field_ratio, a.coupling_ratio, a.n_atoms,
                                                         a.reference_photon_mean);
        params = model::derive_scaled_params(consts, a.n_atoms, *a.photon_mean);
        source = {{"mode", "scaled"},
                  {"field_ratio", a.field_ratio},
                  {"coupling_ratio", a.coupling_ratio},
                  {"reference_photon_mean", a.reference_photon_mean},
                  {"photon_mean", *a.photon_mean}};
    } else {
        params = {a.omega_field, a.omega_atom, a.coupling, a.n_atoms, 1};
        source = {{"mode", "direct"}};
    }
    model::ConvergenceOptions opts;
    opts.tolerance = a.tolerance;
    opts.sector = model::sector_from_string(a.sector);
    opts.label_rule = model::label_rule_from_string(a.label_rule);
    if (a.m_filter) opts.label_filter = io::parse_half_integer(*a.m_filter);
    opts.adaptive = a.cutoffs.empty();
    const std::vector<int> schedule =
        a.cutoffs.empty() ? model::default_cutoff_schedule(params, a.levels) : a.cutoffs;
    const auto seq = model::converged_levels(params, a.levels, schedule, opts);

    io::write_text(out / "levels.csv", io::levels_csv(seq));
    ordered_json meta = io::levels_metadata(seq);
    meta["source"] = source;
    io::write_text(out / "levels.json", meta.dump(2) + "\n");
    std::cout << fmt::format("{} levels, cutoff {}, converged {}\n", seq.energies.size(), seq.params.n_max,
                             seq.converged);
    return seq.converged ? 0 : 2;
}

int run_unfold(const std::string& input, const unfold::UnfoldOptions& options, const fs::path& out) {
    io::prepare_output_dir(out);
    const auto levels = io::read_column_csv(input, "energy");
    const auto pts = unfold::staircase(levels);
    if (pts.ties_split > 0)
        std::cerr << fmt::format("warning: split {} degenerate level(s) by jitter\n", pts.ties_split);
    const auto model = unfold::fit_smooth(pts, options.degree);
    const auto seq = unfold::trim_edges(unfold::unfold(pts.energies, model), options.trim_fraction);
    io::write_text(out / "unfolded.csv", io::column_csv("unfolded", seq.levels));
    io::write_text(out / "spacings.csv", io::column_csv("spacing", seq.spacings));
    io::write_text(out / "unfold.json", io::unfold_metadata(model, seq, options, pts.ties_split).dump(2) + "\n");
    std::cout << fmt::format("{} spacings, mean {:.6f}\n", seq.spacings.size(), seq.mean_spacing());
    return 0;
}

int run_fit(const std::string& input, std::optional<double> q0, int bins, const fs::path& out) {
    io::prepare_output_dir(out);
    const stats::SpacingSample sample(io::read_column_csv(input, "spacing"));
    const auto fit = stats::mle_q(sample, q0);
    io::write_text(out / "fit.json", io::fit_result_json(fit).dump(2) + "\n");
    io::write_text(out / "histogram.csv", io::histogram_csv(sample, fit.q_hat, bins));
    std::cout << fmt::format("q = {:.4f} +- {:.4f} (n = {})\n", fit.q_hat, fit.std_err, fit.n);
    return 0;
}

int run_sweep_cmd(const std::string& config, std::optional<std::uint64_t> seed, int threads,
                  const fs::path& out) {
    sweep::SweepSpec spec = sweep::spec_from_json(load_json(config));
    if (seed) spec.seed = *seed;
    if (threads > 0) spec.threads = threads;
    io::prepare_output_dir(out);
    const auto result = sweep::run_sweep(spec);
    sweep::emit_report(out, spec, result);
    std::cout << fmt::format("{} points, {} failed", result.rows.size(), result.failed_points);
    if (result.pooled) std::cout << fmt::format(", pooled q = {:.4f} +- {:.4f}", result.pooled->q_hat, result.pooled->std_err);
    std::cout << "\n";
    return result.failed_points == 0 ? 0 : 2;
}

sweep::Table1Options table1_options(const std::string& config) {
    sweep::Table1Options o;
    if (config.empty()) return o;
    const ordered_json j = load_json(config);
    try {
        for (const auto& [key, _] : j.items())
            if (key != "levels" && key != "degree" && key != "trim_fraction" && key != "sector" &&
                key != "photon_step" && key != "reference_photon_mean" && key != "threads" && key != "seed")
                throw ConfigError("unknown key '" + key + "' in table1 config");
        o.levels = j.value("levels", o.levels);
        o.degree = j.value("degree", o.degree);
        o.trim_fraction = j.value("trim_fraction", o.trim_fraction);
        o.sector = model::sector_from_string(j.value("sector", std::string("even")));
        o.photon_step = j.value("photon_step", o.photon_step);
        if (j.contains("reference_photon_mean") && !j.at("reference_photon_mean").is_null())
            o.reference_photon_mean = j.at("reference_photon_mean").get<double>();
        o.threads = j.value("threads", o.threads);
        o.seed = j.value("seed", o.seed);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed table1 config: ") + e.what());
    } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
    }
    return o;
}

int run_table1_cmd(const std::vector<std::string>& set_ids, const std::string& config,
                   std::optional<std::uint64_t> seed, int threads, const fs::path& out) {
    sweep::Table1Options options = table1_options(config);
    if (seed) options.seed = *seed;
    if (threads > 0) options.threads = threads;
    std::vector<const sweep::TableSet*> sets;
    for (const auto& id : set_ids) {
        if (id == "all") {
            for (const auto& s : sweep::table1_sets()) sets.push_back(&s);
        } else {
            try {
                sets.push_back(&sweep::table1_set(id));
            } catch (const ArgumentError& e) {
                throw ConfigError(e.what());
            }
        }
    }
    for (const auto* s : sets) sweep::table1_spec(*s, options).validate();
    io::prepare_output_dir(out);

    std::vector<sweep::Table1Result> results;
    std::vector<std::string> outputs;
    ordered_json configs = ordered_json::array();
    std::size_t failed = 0;
    for (const auto* s : sets) {
        results.push_back(sweep::run_table1(*s, options));
        const auto& r = results.back();
        const std::string name = "table1_" + s->id + ".csv";
        io::write_text(out / name, sweep::rows_csv(r.sweep.rows));
        outputs.push_back(name);
        if (r.sweep.pooled) {
            const std::string hist = "table1_" + s->id + "_histogram.csv";
            io::write_text(out / hist, io::histogram_csv(stats::SpacingSample(r.sweep.pooled_spacings),
                                                         r.sweep.pooled->q_hat));
            outputs.push_back(hist);
        }
        ordered_json c = sweep::to_json(r.spec);
        c["set"] = s->id;
        configs.push_back(c);
        failed += r.sweep.failed_points;
        std::cout << fmt::format("set {:>3}: ", s->id);
        if (r.sweep.pooled)
            std::cout << fmt::format("q = {:.3f} +- {:.3f}", r.sweep.pooled->q_hat, r.sweep.pooled->std_err);
        else
            std::cout << "no fit";
        std::cout << fmt::format("  (reference {:.2f} +- {:.2f}; {} / {} points ok)\n", s->reference_q, s->reference_err,
                                 r.sweep.rows.size() - r.sweep.failed_points, r.sweep.rows.size());
    }
    io::write_text(out / "table1_summary.csv", sweep::table1_summary_csv(results));
    outputs.emplace_back("table1_summary.csv");
    outputs.emplace_back("manifest.json");
    io::write_text(out / "manifest.json", sweep::manifest("table1", configs, options.seed, outputs).dump(2) + "\n");
    return failed == 0 ? 0 : 2;
}

int run_validate_cmd(std::uint64_t seed, const fs::path& out) {
    io::prepare_output_dir(out);
    const auto checks = oracle::run_validation(seed);
    const auto report = oracle::validation_report(checks, seed);
    io::write_text(out / "validate.json", report.dump(2) + "\n");
    for (const auto& c : checks)
        std::cout << fmt::format("[{}] {:<36} {:.6g} {} {:.6g}\n", c.passed ? "PASS" : "FAIL", c.name, c.value,
                                 c.detail, c.threshold);
    return report["all_passed"].get<bool>() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-level atoms in a quantized field: spectra, unfolding and Berry-Robnik fits"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::string out = "out";
    std::optional<std::uint64_t> seed;
    int threads = 0;
    bool validate_flag = false;
    app.add_option("--out", out, "Output directory");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--threads", threads, "Worker threads (0 = all cores)");
    app.add_flag("--validate", validate_flag, "Run the oracle validation suite");

    SpectrumArgs sa;
    auto* spectrum = app.add_subcommand("spectrum", "Diagonalize one parameter point and write levels.csv");
    spectrum->add_option("--omega-field", sa.omega_field);
    spectrum->add_option("--omega-atom", sa.omega_atom);
    spectrum->add_option("--coupling", sa.coupling);
    spectrum->add_option("--n-atoms", sa.n_atoms)->check(CLI::PositiveNumber);
    spectrum->add_option("--photon-mean", sa.photon_mean, "Scaled mode: derive parameters at this mean photon number");
    spectrum->add_option("--field-ratio", sa.field_ratio, "Scaled mode: Omega/omega at the reference point");
    spectrum->add_option("--coupling-ratio", sa.coupling_ratio, "Scaled mode: G/sqrt(Omega omega)");
    spectrum->add_option("--reference-photon-mean", sa.reference_photon_mean);
    spectrum->add_option("--levels", sa.levels);
    spectrum->add_option("--sector", sa.sector)->check(CLI::IsMember({"both", "even", "odd"}));
    spectrum->add_option("--label-rule", sa.label_rule)->check(CLI::IsMember({"dominant_component", "mean_sz"}));
    spectrum->add_option("--m", sa.m_filter, "Keep only levels labelled with this m");
    spectrum->add_option("--cutoffs", sa.cutoffs, "Photon cutoff schedule")->delimiter(',');
    spectrum->add_option("--tolerance", sa.tolerance);

    std::string input;
    unfold::UnfoldOptions uo;
    auto* unfold_cmd = app.add_subcommand("unfold", "Unfold a level list and write spacings");
    unfold_cmd->add_option("--input", input, "CSV with an 'energy' column or a single column")->required();
    unfold_cmd->add_option("--degree", uo.degree);
    unfold_cmd->add_option("--trim", uo.trim_fraction);

    std::optional<double> q0;
    int bins = 0;
    auto* fit = app.add_subcommand("fit", "Maximum-likelihood Berry-Robnik fit of a spacing list");
    fit->add_option("--input", input, "CSV with a 'spacing' column or a single column")->required();
    fit->add_option("--q0", q0, "Newton seed (default: least-squares histogram fit)");
    fit->add_option("--bins", bins);

    std::string config;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
    sweep_cmd->add_option("--config", config)->required();

    std::vector<std::string> set_ids{"all"};
    auto* table1 = app.add_subcommand("table1", "Run the six reference parameter sets");
    table1->add_option("--set", set_ids, "I..VI or all")->delimiter(',');
    table1->add_option("--config", config, "Optional JSON overrides");

    auto* validate = app.add_subcommand("validate", "Run the oracle validation suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (validate_flag || *validate) return run_validate_cmd(seed.value_or(0), out);
        if (*spectrum) return run_spectrum(sa, out);
        if (*unfold_cmd) return run_unfold(input, uo, out);
        if (*fit) return run_fit(input, q0, bins, out);
        if (*sweep_cmd) return run_sweep_cmd(config, seed, threads, out);
        if (*table1) return run_table1_cmd(set_ids, config, seed, threads, out);
        std::cout << app.help();
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << e.code() << " error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

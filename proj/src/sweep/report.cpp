#include "dickestat/errors.hpp"
#include "dickestat/io.hpp"
#include "dickestat/sweep.hpp"

#include <cmath>

#include <fmt/format.h>

namespace dickestat::sweep {

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string opt(const std::optional<double>& v) { return v ? io::format_double(*v) : ""; }

}  // namespace

std::string rows_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "photon_mean,n_atoms,m_filter,omega_field,omega_atom,coupling,cutoff,converged,n_spacings,"
        "mean_spacing,q_hat,std_err,status,message\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", opt(r.photon_mean), r.n_atoms,
                           r.label_filter ? io::format_half_integer(*r.label_filter) : "",
                           io::format_double(r.omega_field), io::format_double(r.omega_atom),
                           io::format_double(r.coupling), r.cutoff, r.converged ? "true" : "false",
                           r.n_spacings, io::format_double(r.mean_spacing), opt(r.q_hat), opt(r.std_err),
                           r.status, csv_quote(r.message));
    }
    return out;
}

std::string table1_summary_csv(const std::vector<Table1Result>& results) {
    std::string out =
        "set,field_ratio,coupling_ratio,n_atoms,photon_min,photon_max,reference_photon_mean,reference_q,"
        "reference_err,q_hat,std_err,n_spacings,points_ok,points_total,within_0.2\n";
    for (const auto& r : results) {
        const auto& fit = r.sweep.pooled;
        const std::size_t ok = r.sweep.rows.size() - r.sweep.failed_points;
        out += fmt::format(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.set.id, io::format_double(r.set.field_ratio),
            io::format_double(r.set.coupling_ratio), r.set.n_atoms,
            r.spec.photon_grid.empty() ? "" : io::format_double(r.spec.photon_grid.front()),
            io::format_double(r.set.photon_max), io::format_double(r.spec.reference_photon_mean),
            io::format_double(r.set.reference_q), io::format_double(r.set.reference_err),
            fit ? io::format_double(fit->q_hat) : "", fit ? io::format_double(fit->std_err) : "",
            r.sweep.pooled_spacings.size(), ok, r.sweep.rows.size(),
            fit ? (std::abs(fit->q_hat - r.set.reference_q) <= 0.2 ? "true" : "false") : "");
    }
    return out;
}

ordered_json manifest(std::string_view command, const ordered_json& config, std::uint64_t seed,
                      const std::vector<std::string>& outputs) {
    ordered_json m;
    m["tool"] = "dickestat";
    m["version"] = std::string(version());
    m["command"] = std::string(command);
    m["config"] = config;
    m["config_hash"] = io::config_hash(config);
    m["seed"] = seed;
    m["outputs"] = outputs;
    return m;
}

std::vector<std::string> emit_report(const std::filesystem::path& dir, const SweepSpec& spec,
                                     const SweepResult& result) {
    io::prepare_output_dir(dir);
    std::vector<std::string> written;
    io::write_text(dir / "sweep.csv", rows_csv(result.rows));
    written.emplace_back("sweep.csv");
    if (result.pooled) {
        io::write_text(dir / "pooled_fit.json", io::fit_result_json(*result.pooled).dump(2) + "\n");
        io::write_text(dir / "pooled_histogram.csv",
                       io::histogram_csv(stats::SpacingSample(result.pooled_spacings), result.pooled->q_hat));
        written.emplace_back("pooled_fit.json");
        written.emplace_back("pooled_histogram.csv");
    }
    written.emplace_back("manifest.json");
    io::write_text(dir / "manifest.json", manifest("sweep", to_json(spec), spec.seed, written).dump(2) + "\n");
    return written;
}

}  // namespace dickestat::sweep

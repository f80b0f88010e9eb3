#include "dickestat/io.hpp"

#include "dickestat/errors.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace dickestat::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

std::string format_half_integer(int two_m) {
    if (two_m % 2 == 0) return fmt::format("{}", two_m / 2);
    return fmt::format("{}{}.5", two_m < 0 ? "-" : "", std::abs(two_m) / 2);
}

int parse_half_integer(double m) {
    const double twice = 2.0 * m;
    if (!std::isfinite(twice) || std::abs(twice - std::round(twice)) > 1e-9)
        throw ArgumentError(fmt::format("{} is not a half-integer", m));
    return static_cast<int>(std::lround(twice));
}

void prepare_output_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
    const auto probe = dir / ".write_probe";
    {
        std::ofstream out(probe);
        if (!out) throw IoError(fmt::format("output directory {} is not writable", dir.string()));
    }
    std::filesystem::remove(probe, ec);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

std::string levels_csv(const model::LevelSequence& seq) {
    std::string out = "index,energy,m_label,parity\n";
    for (std::size_t i = 0; i < seq.energies.size(); ++i) {
        out += fmt::format("{},{},{},{}\n", i, format_double(seq.energies[i]),
                           i < seq.two_m_labels.size() ? format_half_integer(seq.two_m_labels[i]) : "",
                           i < seq.parities.size() ? model::to_string(seq.parities[i]) : "");
    }
    return out;
}

ordered_json levels_metadata(const model::LevelSequence& seq) {
    ordered_json j;
    j["params"] = {{"omega_field", seq.params.omega_field},
                   {"omega_atom", seq.params.omega_atom},
                   {"coupling", seq.params.coupling},
                   {"n_atoms", seq.params.n_atoms}};
    j["cutoff_used"] = seq.params.n_max;
    j["cutoffs_tried"] = seq.cutoffs_tried;
    j["converged"] = seq.converged;
    j["last_shift"] = seq.last_shift;
    j["interlacing_ok"] = seq.interlacing_ok;
    j["sector"] = model::to_string(seq.sector);
    j["label_rule"] = model::to_string(seq.label_rule);
    j["label_filter"] = seq.label_filter ? ordered_json(format_half_integer(*seq.label_filter))
                                         : ordered_json(nullptr);
    j["levels"] = seq.energies.size();
    return j;
}

std::string column_csv(std::string_view header, std::span<const double> values) {
    std::string out(header);
    out += '\n';
    for (double v : values) {
        out += format_double(v);
        out += '\n';
    }
    return out;
}

std::vector<double> read_column_csv(const std::filesystem::path& path, std::string_view preferred) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<double> values;
    std::string line;
    std::size_t column = 0;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (first) {
            first = false;
            char* end = nullptr;
            std::strtod(cells[0].c_str(), &end);
            const bool header = end == cells[0].c_str() || *end != '\0';
            if (header) {
                for (std::size_t c = 0; c < cells.size(); ++c)
                    if (cells[c] == preferred) column = c;
                continue;
            }
        }
        if (column >= cells.size())
            throw ArgumentError(fmt::format("{}:{}: missing column {}", path.string(), line_no, column));
        char* end = nullptr;
        const double v = std::strtod(cells[column].c_str(), &end);
        if (end == cells[column].c_str() || *end != '\0')
            throw ArgumentError(fmt::format("{}:{}: '{}' is not a number", path.string(), line_no,
                                            cells[column]));
        values.push_back(v);
    }
    return values;
}

ordered_json unfold_metadata(const unfold::SmoothModel& model, const unfold::UnfoldedSequence& seq,
                             const unfold::UnfoldOptions& options, std::size_t ties_split) {
    ordered_json j;
    j["degree"] = model.degree;
    j["basis"] = "legendre";
    j["coefficients"] = model.coefficients;
    j["domain"] = {model.e_min, model.e_max};
    j["residual_norm"] = model.residual_norm;
    j["trim_fraction"] = options.trim_fraction;
    j["trimmed_per_side"] = seq.trimmed_per_side;
    j["ties_split"] = ties_split;
    j["spacings"] = seq.spacings.size();
    j["mean_spacing"] = seq.mean_spacing();
    return j;
}

ordered_json fit_result_json(const stats::FitResult& fit) {
    ordered_json j;
    j["q_hat"] = fit.q_hat;
    j["std_err"] = fit.std_err;
    j["log_likelihood"] = fit.log_likelihood;
    j["iterations"] = fit.iterations;
    j["initializer"] = fit.initializer;
    j["converged"] = fit.converged;
    j["clamped"] = fit.clamped;
    j["unclamped_root"] = fit.unclamped_root ? ordered_json(*fit.unclamped_root) : ordered_json(nullptr);
    j["used_fallback"] = fit.used_fallback;
    j["n"] = fit.n;
    j["std_err_method"] = "observed_fisher_information";
    return j;
}

std::string histogram_csv(const stats::SpacingSample& sample, double q_hat, int bins) {
    const auto h = stats::spacing_histogram(sample, bins);
    std::string out = "bin_center,empirical_density,br_density_at_qhat,wigner,poisson\n";
    for (std::size_t b = 0; b < h.centers.size(); ++b) {
        const double s = h.centers[b];
        out += fmt::format("{},{},{},{},{}\n", format_double(s), format_double(h.densities[b]),
                           format_double(stats::berry_robnik_pdf(s, q_hat)),
                           format_double(stats::wigner_pdf(s)), format_double(stats::poisson_pdf(s)));
    }
    return out;
}

std::string config_hash(const ordered_json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config.dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

}  // namespace dickestat::io

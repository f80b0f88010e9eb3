#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dickestat/model.hpp"
#include "dickestat/stats.hpp"
#include "dickestat/unfold.hpp"

// File formats shared by the CLI subcommands. Doubles are written with 17
// significant digits so files round-trip and repeat byte-for-byte.
namespace dickestat::io {

using nlohmann::ordered_json;

std::string format_double(double v);

/// "-10.5", "0", "3" for 2m = -21, 0, 6.
std::string format_half_integer(int two_m);

/// Parses "-10.5" / "3" into 2m. Throws ArgumentError if not a half-integer.
int parse_half_integer(double m);

/// Creates the directory if needed and checks that a file can be written there.
void prepare_output_dir(const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, std::string_view text);

/// CSV: index,energy,m_label,parity
std::string levels_csv(const model::LevelSequence& seq);

/// params, cutoff used, converged flag, sector, label rule.
ordered_json levels_metadata(const model::LevelSequence& seq);

/// One value per line under a single header.
std::string column_csv(std::string_view header, std::span<const double> values);

/// Reads a numeric column. A header row is skipped; with several columns the
/// one named `preferred` is taken, otherwise the first.
std::vector<double> read_column_csv(const std::filesystem::path& path,
                                    std::string_view preferred = "energy");

/// Fit coefficients, domain, residual and trim settings.
ordered_json unfold_metadata(const unfold::SmoothModel& model, const unfold::UnfoldedSequence& seq,
                             const unfold::UnfoldOptions& options, std::size_t ties_split);

ordered_json fit_result_json(const stats::FitResult& fit);

/// CSV: bin_center,empirical_density,br_density_at_qhat,wigner,poisson
std::string histogram_csv(const stats::SpacingSample& sample, double q_hat, int bins = 0);

/// FNV-1a over the compact dump of `config`, as 16 hex digits.
std::string config_hash(const ordered_json& config);

}  // namespace dickestat::io

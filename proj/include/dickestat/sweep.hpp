#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "dickestat/model.hpp"
#include "dickestat/stats.hpp"

namespace dickestat::sweep {

using nlohmann::ordered_json;

/// One of the six reference parameter sets with its expected q.
struct TableSet {
    std::string id;         // "I" ... "VI"
    double field_ratio;     // Omega / omega
    double coupling_ratio;  // G / sqrt(Omega omega)
    int n_atoms;
    double photon_max;      // upper end of the mean-photon-number range
    double reference_q;
    double reference_err;
};

const std::vector<TableSet>& table1_sets();

/// Throws ArgumentError for unknown ids.
const TableSet& table1_set(std::string_view id);

enum class Mode { direct, scaled };
enum class FitMode { per_point, windowed, pooled };

/**
 * A grid of (mean photon number, atom count, m label) points. In scaled mode
 * each point's (Omega, omega, G) comes from the fixed products; in direct mode
 * `params` is used as given (only n_atoms may vary along the atom grid).
 */
struct SweepSpec {
    Mode mode = Mode::scaled;
    model::ModelParams params;  // direct mode

    // Scaled mode: explicit constants win over ratios at the reference point.
    std::optional<model::ScalingConstants> constants;
    double field_ratio = 1.0;
    double coupling_ratio = 0.2;
    double omega_atom_ref = 1.0;
    int reference_n_atoms = 21;
    double reference_photon_mean = 40.0;

    std::vector<double> photon_grid;
    std::vector<int> atom_grid;
    std::vector<int> label_filters;  // 2m values; empty = no label filter

    std::size_t levels = 250;
    int degree = 6;
    double trim_fraction = 0.05;
    std::uint64_t seed = 0;
    model::Sector sector = model::Sector::even;
    model::LabelRule label_rule = model::LabelRule::dominant_component;
    double tolerance = 1e-8;
    std::vector<int> cutoffs;  // empty = default schedule per point
    std::size_t max_dimension = model::kDefaultMaxDimension;
    FitMode fit_mode = FitMode::per_point;
    int window = 1;   // grid points per window in windowed mode
    int threads = 0;  // 0 = hardware concurrency

    /// Throws ConfigError.
    void validate() const;

    model::ScalingConstants scaling_constants() const;
};

ordered_json to_json(const SweepSpec& spec);

/// Accepts the keys written by to_json; photon grid may also be given as
/// {"start", "stop", "step"}. Throws ConfigError.
SweepSpec spec_from_json(const ordered_json& j);

struct SweepRow {
    std::optional<double> photon_mean;
    int n_atoms = 0;
    std::optional<int> label_filter;
    double omega_field = 0.0;
    double omega_atom = 0.0;
    double coupling = 0.0;
    int cutoff = 0;
    bool converged = false;
    std::size_t n_spacings = 0;
    double mean_spacing = 0.0;
    std::optional<double> q_hat;
    std::optional<double> std_err;
    std::string status = "ok";  // "ok", "unconverged", or an error code
    std::string message;

    std::vector<double> spacings;  // trimmed unfolded spacings, not written out
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::optional<stats::FitResult> pooled;
    std::vector<double> pooled_spacings;
    std::size_t failed_points = 0;  // rows whose status is not "ok"
};

/// Evaluates every grid point (in parallel) and fits q per spec.fit_mode.
/// Per-point failures are recorded in the rows; the sweep never aborts.
SweepResult run_sweep(const SweepSpec& spec);

/// Options that apply when building a reference-set run.
struct Table1Options {
    std::size_t levels = 250;
    int degree = 6;
    double trim_fraction = 0.05;
    model::Sector sector = model::Sector::even;
    double photon_step = 1.0;
    std::optional<double> reference_photon_mean;  // default: top of the set's range
    int threads = 0;
    std::uint64_t seed = 0;
};

SweepSpec table1_spec(const TableSet& set, const Table1Options& options);

struct Table1Result {
    TableSet set;
    SweepSpec spec;
    SweepResult sweep;
};

Table1Result run_table1(const TableSet& set, const Table1Options& options);

/// sweep.csv contents.
std::string rows_csv(const std::vector<SweepRow>& rows);

/// table1_summary.csv contents (expected q next to the computed one).
std::string table1_summary_csv(const std::vector<Table1Result>& results);

/// Deterministic run manifest: version, command, config, its hash and seed.
ordered_json manifest(std::string_view command, const ordered_json& config, std::uint64_t seed,
                      const std::vector<std::string>& outputs);

/// Writes sweep.csv, manifest.json and (pooled mode) pooled_fit.json plus
/// pooled_histogram.csv into `dir`. Returns the written file names.
std::vector<std::string> emit_report(const std::filesystem::path& dir, const SweepSpec& spec,
                                     const SweepResult& result);

std::string_view version();

}  // namespace dickestat::sweep

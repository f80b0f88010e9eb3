#include "dickestat/sweep.hpp"

#include "dickestat/errors.hpp"
#include "dickestat/unfold.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <tuple>

#include <fmt/format.h>

namespace dickestat::sweep {

const std::vector<TableSet>& table1_sets() {
    static const std::vector<TableSet> sets{
        {"I", 1.0, 0.2, 21, 40.0, 0.52, 0.09},   {"II", 1.0, 0.2, 1, 200.0, 0.83, 0.12},
        {"III", 1.0, 0.09, 21, 40.0, 0.51, 0.08}, {"IV", 1.0, 1.0, 21, 40.0, 0.49, 0.13},
        {"V", 0.09, 0.3, 21, 110.0, 0.70, 0.10},  {"VI", 9.0, 0.3, 21, 28.0, 0.41, 0.08},
    };
    return sets;
}

const TableSet& table1_set(std::string_view id) {
    for (const auto& s : table1_sets())
        if (s.id == id) return s;
    throw ArgumentError(fmt::format("unknown parameter set '{}' (expected I..VI)", id));
}

void SweepSpec::validate() const {
    if (mode == Mode::scaled) {
        if (photon_grid.empty()) throw ConfigError("scaled mode needs a non-empty photon_mean grid");
        for (double v : photon_grid)
            if (!(v > 0.0) || !std::isfinite(v))
                throw ConfigError(fmt::format("mean photon number {} must be > 0", v));
        if (constants) {
            try {
                constants->validate();
            } catch (const Error& e) {
                throw ConfigError(e.what());
            }
        } else if (!(field_ratio > 0.0) || !(coupling_ratio > 0.0) || !(omega_atom_ref > 0.0) ||
                   reference_n_atoms < 1 || !(reference_photon_mean > 0.0)) {
            throw ConfigError("ratios and reference point must be positive");
        }
    } else {
        try {
            model::ModelParams p = params;
            p.n_max = std::max(p.n_max, 1);
            p.validate(max_dimension);
        } catch (const Error& e) {
            throw ConfigError(std::string("direct params: ") + e.what());
        }
    }
    for (int n : atom_grid)
        if (n < 1 || n > 100000) throw ConfigError(fmt::format("n_atoms {} out of range", n));
    std::vector<int> counts = atom_grid;
    if (counts.empty()) counts.push_back(mode == Mode::direct ? params.n_atoms : reference_n_atoms);
    for (int two_m : label_filters)
        for (int n : counts)
            if (std::abs(two_m) > n || (two_m + n) % 2 != 0)
                throw ConfigError(fmt::format("m = {} is not a spin projection for n_atoms = {}", 0.5 * two_m, n));
    if (levels < 100) throw ConfigError(fmt::format("levels = {} is below 100 for statistics runs", levels));
    if (degree < 1 || degree > 20) throw ConfigError(fmt::format("degree {} out of range", degree));
    if (!(trim_fraction >= 0.0 && trim_fraction <= 0.2))
        throw ConfigError(fmt::format("trim_fraction {} outside [0, 0.2]", trim_fraction));
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
    if (!cutoffs.empty()) {
        if (cutoffs.size() < 2) throw ConfigError("cutoffs needs at least two entries");
        for (std::size_t i = 0; i < cutoffs.size(); ++i)
            if (cutoffs[i] < 1 || (i > 0 && cutoffs[i] <= cutoffs[i - 1]))
                throw ConfigError("cutoffs must be positive and strictly increasing");
    }
    if (window < 1) throw ConfigError("window must be >= 1");
    if (threads < 0) throw ConfigError("threads must be >= 0");
}

model::ScalingConstants SweepSpec::scaling_constants() const {
    if (constants) return *constants;
    return model::constants_from_ratios(field_ratio, coupling_ratio, reference_n_atoms,
                                        reference_photon_mean, omega_atom_ref);
}

namespace {

struct GridPoint {
    std::optional<double> photon;
    int n_atoms;
    std::optional<int> label;
};

std::vector<GridPoint> grid_points(const SweepSpec& spec) {
    std::vector<std::optional<double>> photons;
    if (spec.mode == Mode::scaled)
        photons.assign(spec.photon_grid.begin(), spec.photon_grid.end());
    else
        photons.push_back(std::nullopt);

    std::vector<int> atoms = spec.atom_grid;
    if (atoms.empty()) atoms.push_back(spec.mode == Mode::scaled ? spec.reference_n_atoms : spec.params.n_atoms);

    std::vector<std::optional<int>> labels;
    for (int l : spec.label_filters) labels.emplace_back(l);
    if (labels.empty()) labels.push_back(std::nullopt);

    // N_A outermost, then m label, then photon number: windows run along the photon axis.
    std::vector<GridPoint> out;
    for (int n : atoms)
        for (const auto& l : labels)
            for (const auto& p : photons) out.push_back({p, n, l});
    return out;
}

SweepRow evaluate_point(const SweepSpec& spec, const GridPoint& point) {
    SweepRow row;
    row.photon_mean = point.photon;
    row.n_atoms = point.n_atoms;
    row.label_filter = point.label;
    try {
        model::ModelParams params;
        if (spec.mode == Mode::scaled) {
            params = model::derive_scaled_params(spec.scaling_constants(), point.n_atoms, *point.photon);
        } else {
            params = spec.params;
            params.n_atoms = point.n_atoms;
        }
        row.omega_field = params.omega_field;
        row.omega_atom = params.omega_atom;
        row.coupling = params.coupling;

        std::vector<int> schedule = spec.cutoffs;
        if (schedule.empty())
            schedule = model::default_cutoff_schedule(params, spec.levels, spec.max_dimension);
        if (schedule.size() < 2)
            throw SizeError(fmt::format("cutoff schedule for N_A = {} exceeds the dimension budget {}",
                                        point.n_atoms, spec.max_dimension));

        model::ConvergenceOptions opts;
        opts.tolerance = spec.tolerance;
        opts.sector = spec.sector;
        opts.label_rule = spec.label_rule;
        opts.label_filter = point.label;
        opts.max_dimension = spec.max_dimension;
        opts.with_labels = false;
        opts.adaptive = spec.cutoffs.empty();
        const model::LevelSequence seq = model::converged_levels(params, spec.levels, schedule, opts);
        row.cutoff = seq.params.n_max;
        row.converged = seq.converged;

        const unfold::UnfoldedSequence unfolded =
            unfold::unfold_levels(seq.energies, {spec.degree, spec.trim_fraction});
        row.n_spacings = unfolded.spacings.size();
        row.mean_spacing = unfolded.mean_spacing();
        row.spacings = unfolded.spacings;

        const stats::FitResult fit = stats::mle_q(stats::SpacingSample(row.spacings));
        row.q_hat = fit.q_hat;
        row.std_err = fit.std_err;
        if (!seq.converged) {
            row.status = "unconverged";
            row.message = fmt::format("levels still moved by {:.3g} at cutoff {}", seq.last_shift, row.cutoff);
        }
    } catch (const Error& e) {
        row.status = e.code();
        row.message = e.what();
        row.spacings.clear();
    }
    return row;
}

std::optional<stats::FitResult> pooled_fit(const std::vector<const SweepRow*>& rows,
                                           std::vector<double>* spacings_out) {
    std::vector<double> pooled;
    for (const SweepRow* r : rows)
        if (r->status == "ok") pooled.insert(pooled.end(), r->spacings.begin(), r->spacings.end());
    if (spacings_out != nullptr) *spacings_out = pooled;
    if (pooled.size() < stats::kMinFitSamples) return std::nullopt;
    return stats::mle_q(stats::SpacingSample(std::move(pooled)));
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();
    const std::vector<GridPoint> points = grid_points(spec);

    SweepResult result;
    result.rows.resize(points.size());
    unsigned workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(points.size()));

    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++)
            result.rows[i] = evaluate_point(spec, points[i]);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    if (spec.fit_mode == FitMode::windowed && spec.window > 1) {
        // Rows sharing (N_A, label) are contiguous and ordered along the photon grid.
        std::vector<std::optional<double>> q(result.rows.size());
        std::vector<std::optional<double>> err(result.rows.size());
        std::size_t start = 0;
        while (start < result.rows.size()) {
            std::size_t end = start;
            while (end < result.rows.size() && result.rows[end].n_atoms == result.rows[start].n_atoms &&
                   result.rows[end].label_filter == result.rows[start].label_filter)
                ++end;
            const auto half_lo = static_cast<std::size_t>((spec.window - 1) / 2);
            const auto half_hi = static_cast<std::size_t>(spec.window / 2);
            for (std::size_t i = start; i < end; ++i) {
                std::vector<const SweepRow*> members;
                const std::size_t lo = i >= start + half_lo ? i - half_lo : start;
                const std::size_t hi = std::min(end - 1, i + half_hi);
                for (std::size_t k = lo; k <= hi; ++k) members.push_back(&result.rows[k]);
                try {
                    if (auto fit = pooled_fit(members, nullptr)) {
                        q[i] = fit->q_hat;
                        err[i] = fit->std_err;
                    }
                } catch (const Error&) {
                }
            }
            start = end;
        }
        for (std::size_t i = 0; i < result.rows.size(); ++i) {
            if (result.rows[i].status != "ok") continue;
            result.rows[i].q_hat = q[i];
            result.rows[i].std_err = err[i];
        }
    }

    if (spec.fit_mode == FitMode::pooled) {
        std::vector<const SweepRow*> all;
        for (const auto& r : result.rows) all.push_back(&r);
        try {
            result.pooled = pooled_fit(all, &result.pooled_spacings);
        } catch (const Error&) {
            result.pooled.reset();
        }
    }

    for (const auto& r : result.rows)
        if (r.status != "ok") ++result.failed_points;
    return result;
}

SweepSpec table1_spec(const TableSet& set, const Table1Options& options) {
    if (!(options.photon_step > 0.0)) throw ConfigError("photon_step must be > 0");
    SweepSpec spec;
    spec.mode = Mode::scaled;
    spec.field_ratio = set.field_ratio;
    spec.coupling_ratio = set.coupling_ratio;
    spec.reference_n_atoms = set.n_atoms;
    spec.reference_photon_mean = options.reference_photon_mean.value_or(set.photon_max);
    // The range starts at 0 in the table; N_F = 0 is outside the scaling map.
    for (int i = 1;; ++i) {
        const double v = options.photon_step * i;
        if (v > set.photon_max + 1e-9) break;
        spec.photon_grid.push_back(v);
    }
    spec.atom_grid = {set.n_atoms};
    spec.levels = options.levels;
    spec.degree = options.degree;
    spec.trim_fraction = options.trim_fraction;
    spec.sector = options.sector;
    spec.fit_mode = FitMode::pooled;
    spec.threads = options.threads;
    spec.seed = options.seed;
    return spec;
}

Table1Result run_table1(const TableSet& set, const Table1Options& options) {
    Table1Result r{set, table1_spec(set, options), {}};
    r.sweep = run_sweep(r.spec);
    return r;
}

std::string_view version() { return "0.1.0"; }

}  // namespace dickestat::sweep

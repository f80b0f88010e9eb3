#include "dickestat/errors.hpp"
#include "dickestat/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace dickestat::model {

namespace {

// Sectors this small go through the dense solver, which also yields vectors.
constexpr std::size_t kDenseSectorLimit = 1200;

struct Solved {
    std::vector<double> energies;
    std::vector<int> labels;
    std::vector<Parity> parities;
};

Solved solve_sector(const BandedHamiltonian& h, std::size_t count, int n_atoms,
                    const ConvergenceOptions& opt, bool with_vectors) {
    Solved out;
    if (!with_vectors) {
        out.energies = h.dim() <= kDenseSectorLimit ? lowest_eigenvalues(h.to_dense(), count)
                                                    : lowest_eigenvalues(h, count);
        return out;
    }

    Eigen::MatrixXd vectors;
    if (h.dim() <= kDenseSectorLimit) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.to_dense());
        if (solver.info() != Eigen::Success) throw NumericError("dense eigensolver failed");
        const auto& ev = solver.eigenvalues();
        out.energies.assign(ev.data(), ev.data() + count);
        vectors = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(count));
    } else {
        auto pairs = lowest_eigenpairs(h, count);
        out.energies = std::move(pairs.values);
        vectors = std::move(pairs.vectors);
    }
    out.labels = assign_m_labels(vectors, h.basis, opt.label_rule);

    // Eigenstates carry a definite parity; read it off the dominant component.
    out.parities.reserve(count);
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index row = 0;
        vectors.col(c).cwiseAbs().maxCoeff(&row);
        out.parities.push_back(parity_of(h.basis[static_cast<std::size_t>(row)], n_atoms));
    }
    return out;
}

// Levels carrying the requested label, growing the number of computed
// eigenpairs until k of them are found or the sector is exhausted.
Solved solve_filtered(const BandedHamiltonian& h, std::size_t k, int n_atoms,
                      const ConvergenceOptions& opt) {
    const int target = *opt.label_filter;
    std::size_t count = std::min(h.dim(), 2 * k);
    for (;;) {
        Solved all = solve_sector(h, count, n_atoms, opt, true);
        Solved picked;
        for (std::size_t i = 0; i < all.energies.size() && picked.energies.size() < k; ++i) {
            if (all.labels[i] != target) continue;
            picked.energies.push_back(all.energies[i]);
            picked.labels.push_back(all.labels[i]);
            picked.parities.push_back(all.parities[i]);
        }
        if (picked.energies.size() == k || count == h.dim()) return picked;
        const std::size_t found = std::max<std::size_t>(picked.energies.size(), 1);
        const auto grown = static_cast<std::size_t>(
            std::ceil(1.25 * static_cast<double>(count) * static_cast<double>(k) / found));
        count = std::min(h.dim(), std::max(grown, count + k));
    }
}

double max_abs_entry(const BandedHamiltonian& h) {
    double m = 0.0;
    for (double v : h.band) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

// Mean-field ground state: photon displacement alpha = 2 G j sin(theta) / Omega
// with cos(theta) = Omega omega / (8 G^2 j) in the superradiant phase.
double mean_field_displacement(const ModelParams& params) {
    const double j = 0.5 * params.n_atoms;
    if (!(params.coupling > 0.0)) return 0.0;
    const double cos_theta =
        params.omega_field * params.omega_atom / (8.0 * params.coupling * params.coupling * j);
    if (cos_theta >= 1.0) return 0.0;
    return 2.0 * params.coupling * j * std::sqrt(1.0 - cos_theta * cos_theta) / params.omega_field;
}

namespace {

int round_up_10(double v) { return static_cast<int>(std::ceil(v / 10.0) * 10.0); }

// Photon number beyond which a level at excitation energy `excitation` above
// the ground state has only a Gaussian tail: the classical turning point of
// the displaced oscillator plus four units of field amplitude.
int turning_point_cutoff(const ModelParams& params, double excitation) {
    const double reach = mean_field_displacement(params) +
                         std::sqrt(std::max(0.0, excitation) / params.omega_field) + 4.0;
    return round_up_10(reach * reach);
}

}  // namespace

std::vector<int> default_cutoff_schedule(const ModelParams& params, std::size_t k,
                                         std::size_t max_dimension) {
    const double alpha = mean_field_displacement(params);
    // Parity sectors hold about half the spin states at each photon number.
    const double spins_per_n = std::max(1.0, 0.5 * (params.n_atoms + 1));
    const double start = alpha * alpha + 8.0 * alpha + 40.0 + 2.0 * static_cast<double>(k) / spins_per_n;

    std::vector<int> schedule;
    double cutoff = round_up_10(start);
    for (int step = 0; step < 16; ++step) {
        const auto n_max = static_cast<int>(cutoff);
        if (static_cast<std::size_t>(params.n_atoms + 1) * static_cast<std::size_t>(n_max + 1) >
            max_dimension)
            break;
        schedule.push_back(n_max);
        cutoff = std::ceil(1.25 * cutoff / 10.0) * 10.0;
    }
    return schedule;
}

LevelSequence converged_levels(const ModelParams& params, std::size_t k,
                               std::span<const int> cutoff_schedule,
                               const ConvergenceOptions& options) {
    if (cutoff_schedule.size() < 2)
        throw ArgumentError("cutoff schedule needs at least two entries");
    if (!std::is_sorted(cutoff_schedule.begin(), cutoff_schedule.end()) ||
        std::adjacent_find(cutoff_schedule.begin(), cutoff_schedule.end()) != cutoff_schedule.end())
        throw ArgumentError("cutoff schedule must be strictly increasing");
    if (k == 0) throw ArgumentError("k must be positive");
    if (!(options.tolerance > 0.0)) throw ArgumentError("convergence tolerance must be > 0");

    LevelSequence seq;
    seq.sector = options.sector;
    seq.label_rule = options.label_rule;
    seq.label_filter = options.label_filter;

    ModelParams p = params;
    std::vector<double> previous;
    std::vector<int> plan(cutoff_schedule.begin(), cutoff_schedule.end());
    for (std::size_t idx = 0; idx < plan.size(); ++idx) {
        const int cutoff = plan[idx];
        const bool last = idx + 1 == plan.size();
        p.n_max = cutoff;
        p.validate(options.max_dimension);
        const BandedHamiltonian h = build_banded_hamiltonian(p, options.sector, options.max_dimension);
        if (h.dim() < k) {
            if (last)
                throw ArgumentError(fmt::format(
                    "k = {} exceeds the sector dimension {} at the final cutoff {}", k, h.dim(), cutoff));
            continue;
        }
        seq.cutoffs_tried.push_back(cutoff);

        Solved solved = options.label_filter ? solve_filtered(h, k, p.n_atoms, options)
                                             : solve_sector(h, k, p.n_atoms, options, false);
        if (solved.energies.size() < k) {
            if (last)
                throw ArgumentError(fmt::format("only {} levels carry label 2m = {} at cutoff {}",
                                                solved.energies.size(), *options.label_filter, cutoff));
            previous.clear();
            continue;
        }

        bool converged = false;
        if (previous.size() == k) {
            const double slack = 1e-12 * std::max(1.0, max_abs_entry(h));
            double shift = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                shift = std::max(shift, std::abs(solved.energies[i] - previous[i]));
                if (!options.label_filter && solved.energies[i] > previous[i] + slack)
                    seq.interlacing_ok = false;
            }
            seq.last_shift = shift;
            converged = shift < options.tolerance;
        }
        previous = solved.energies;

        // Jump ahead when the k-th level clearly needs more photons than the
        // next scheduled cutoff, then confirm between 0.9x and 1x the estimate.
        if (!converged && !last && options.adaptive) {
            const int target = turning_point_cutoff(p, solved.energies.back() - solved.energies.front());
            const int before = std::max(round_up_10(0.9 * target), cutoff + 10);
            const bool fits = static_cast<std::size_t>(p.n_atoms + 1) * static_cast<std::size_t>(target + 1) <=
                              options.max_dimension;
            if (fits && before > plan[idx + 1] && target > before) {
                std::vector<int> next(plan.begin(), plan.begin() + static_cast<std::ptrdiff_t>(idx) + 1);
                next.push_back(before);
                next.push_back(target);
                for (std::size_t r = idx + 1; r < plan.size(); ++r)
                    if (plan[r] > target) next.push_back(plan[r]);
                plan = std::move(next);
            }
        }

        if (converged || last) {
            if (!options.label_filter && options.with_labels) {
                Solved labelled = solve_sector(h, k, p.n_atoms, options, true);
                solved.labels = std::move(labelled.labels);
                solved.parities = std::move(labelled.parities);
            }
            seq.energies = std::move(solved.energies);
            seq.two_m_labels = std::move(solved.labels);
            seq.parities = std::move(solved.parities);
            seq.params = p;
            seq.converged = converged;
            return seq;
        }
    }
    throw ArgumentError("cutoff schedule produced no usable diagonalization");
}

LevelSequence converged_levels(const ScalingConstants& consts, int n_atoms, double n_photon_mean,
                               std::size_t k, std::span<const int> cutoff_schedule,
                               const ConvergenceOptions& options) {
    return converged_levels(derive_scaled_params(consts, n_atoms, n_photon_mean), k, cutoff_schedule,
                            options);
}

}  // namespace dickestat::model

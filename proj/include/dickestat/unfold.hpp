#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dickestat::unfold {

/// (E_i, N(E_i)) pairs of the level-counting staircase.
struct StaircasePoints {
    std::vector<double> energies;
    std::vector<double> counts;
    std::size_t ties_split = 0;
};

/// Smooth part of the staircase as a Legendre series in the scaled variable
/// x = (2E - E_min - E_max) / (E_max - E_min) on [-1, 1].
struct SmoothModel {
    int degree = 6;
    std::vector<double> coefficients;  // Legendre coefficients, P_0 first
    double e_min = 0.0;
    double e_max = 1.0;
    double residual_norm = 0.0;  // sqrt(sum (N_i - p(E_i))^2)

    double operator()(double energy) const;
};

struct UnfoldedSequence {
    std::vector<double> levels;
    std::vector<double> spacings;
    std::size_t trimmed_per_side = 0;

    double mean_spacing() const;
};

struct UnfoldOptions {
    int degree = 6;
    double trim_fraction = 0.05;
};

inline constexpr std::size_t kMinSpacingsAfterTrim = 50;

/// N(E_i) = i (1-based). Exact ties are split by 1e-12 * scale and counted.
StaircasePoints staircase(std::span<const double> levels);

/// Least-squares fit of the staircase. Throws UnfoldingError if the fitted
/// curve is not strictly increasing on a 10x oversampled grid.
SmoothModel fit_smooth(const StaircasePoints& points, int degree = 6);

/// Maps each level through the smooth staircase and takes nearest-neighbor spacings.
UnfoldedSequence unfold(std::span<const double> levels, const SmoothModel& model);

/// Drops ceil(fraction * n) spacings from each end.
UnfoldedSequence trim_edges(const UnfoldedSequence& seq, double fraction);

/// staircase -> fit_smooth -> unfold -> trim_edges.
UnfoldedSequence unfold_levels(std::span<const double> levels, const UnfoldOptions& options = {},
                               SmoothModel* model_out = nullptr);

}  // namespace dickestat::unfold

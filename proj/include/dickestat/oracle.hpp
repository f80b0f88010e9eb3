#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dickestat/stats.hpp"

// Reference generators and brute-force checkers. Every sampler is a pure
// function of its arguments and seed; parallel callers must pass distinct seeds.
namespace dickestat::oracle {

struct RngSeed {
    std::uint64_t value = 0;
};

/// Real symmetric GOE matrix: diagonal ~ N(0, 2), off-diagonal ~ N(0, 1).
Eigen::MatrixXd sample_goe(int dim, RngSeed seed);

/// Sorted eigenvalues of a GOE draw, central `keep_fraction` of the spectrum.
std::vector<double> goe_central_levels(int dim, double keep_fraction, RngSeed seed);

/// Cumulative sums of i.i.d. unit-exponential gaps.
std::vector<double> sample_poisson_levels(int n, RngSeed seed);

/// Inverse CDF of the Berry-Robnik spacing law at uniform u in [0, 1).
double berry_robnik_quantile(double u, double q);

/// n Berry-Robnik spacings by inverse-CDF sampling.
std::vector<double> sample_berry_robnik(double q, int n, RngSeed seed);

/// Argmax of the log likelihood over q in {0, 1e-4, ..., 1}.
double grid_mle(const stats::SpacingSample& sample);

/// sup |F_empirical - F_berry_robnik(q)|.
double ks_statistic(std::span<const double> spacings, double q);

}  // namespace dickestat::oracle

#include "dickestat/oracle.hpp"

#include "dickestat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <fmt/format.h>

namespace dickestat::oracle {

Eigen::MatrixXd sample_goe(int dim, RngSeed seed) {
    if (dim < 2) throw ArgumentError(fmt::format("GOE dimension must be >= 2 (got {})", dim));
    std::mt19937_64 rng(seed.value);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        m(i, i) = std::sqrt(2.0) * normal(rng);
        for (int j = i + 1; j < dim; ++j) {
            m(i, j) = normal(rng);
            m(j, i) = m(i, j);
        }
    }
    return m;
}

std::vector<double> goe_central_levels(int dim, double keep_fraction, RngSeed seed) {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw ArgumentError("keep_fraction must lie in (0, 1]");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sample_goe(dim, seed), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    const auto keep = static_cast<int>(std::lround(keep_fraction * dim));
    const int first = (dim - keep) / 2;
    return {ev.data() + first, ev.data() + first + keep};
}

std::vector<double> sample_poisson_levels(int n, RngSeed seed) {
    if (n < 2) throw ArgumentError(fmt::format("need at least two levels (got {})", n));
    std::mt19937_64 rng(seed.value);
    std::exponential_distribution<double> gap(1.0);
    std::vector<double> levels(static_cast<std::size_t>(n));
    double e = 0.0;
    for (auto& level : levels) {
        double g = 0.0;
        while (g <= 0.0) g = gap(rng);  // keep levels strictly ascending
        e += g;
        level = e;
    }
    return levels;
}

double berry_robnik_quantile(double u, double q) {
    if (!(u >= 0.0 && u < 1.0)) throw DomainError(fmt::format("u = {} outside [0, 1)", u));
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError(fmt::format("q = {} outside [0, 1]", q));
    // (pi/4)(1-q) s^2 + q s + ln(1-u) = 0; positive root in the cancellation-free form.
    const double a = 0.25 * std::numbers::pi * (1.0 - q);
    const double minus_c = -std::log1p(-u);
    if (minus_c == 0.0) return 0.0;
    return 2.0 * minus_c / (q + std::sqrt(q * q + 4.0 * a * minus_c));
}

std::vector<double> sample_berry_robnik(double q, int n, RngSeed seed) {
    if (n < 1) throw ArgumentError("n must be >= 1");
    std::mt19937_64 rng(seed.value);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& s : out) {
        double u = 1.0;
        while (u >= 1.0) u = std::generate_canonical<double, 64>(rng);  // libstdc++ can return 1.0
        s = berry_robnik_quantile(u, q);
    }
    return out;
}

double grid_mle(const stats::SpacingSample& sample) {
    constexpr int kSteps = 10000;
    int best = 0;
    double best_ll = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kSteps; ++i) {
        const double ll = stats::log_likelihood(sample, i / static_cast<double>(kSteps));
        if (ll > best_ll) {
            best_ll = ll;
            best = i;
        }
    }
    return best / static_cast<double>(kSteps);
}

double ks_statistic(std::span<const double> spacings, double q) {
    if (spacings.empty()) throw ArgumentError("KS statistic of an empty sample");
    std::vector<double> sorted(spacings.begin(), spacings.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = stats::berry_robnik_cdf(sorted[i], q);
        d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return d;
}

}  // namespace dickestat::oracle

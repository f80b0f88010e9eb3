#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "dickestat/oracle.hpp"
#include "dickestat/unfold.hpp"

using namespace dickestat;
using namespace dickestat::oracle;

TEST_CASE("GOE sampler") {
    const auto a = sample_goe(2, {5});
    CHECK(a(0, 1) == a(1, 0));
    CHECK(sample_goe(50, {5}) == sample_goe(50, {5}));
    CHECK(sample_goe(50, {5}) != sample_goe(50, {6}));

    // Entry variances: off-diagonal 1, diagonal 2.
    const auto m = sample_goe(400, {8});
    double off = 0.0, diag = 0.0;
    for (int i = 0; i < 400; ++i) {
        diag += m(i, i) * m(i, i);
        for (int j = i + 1; j < 400; ++j) off += m(i, j) * m(i, j);
    }
    CHECK(off / (400.0 * 399 / 2) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(diag / 400 == doctest::Approx(2.0).epsilon(0.3));

    const auto levels = goe_central_levels(1000, 0.5, {3});
    CHECK(levels.size() == 500);
    CHECK(std::is_sorted(levels.begin(), levels.end()));
}

TEST_CASE("GOE spacings follow the Wigner surmise") {
    const auto seq = unfold::unfold_levels(goe_central_levels(1000, 0.5, {17}));
    const stats::SpacingSample s(seq.spacings);
    const auto h = stats::spacing_histogram(s, 12);
    double chi2 = 0.0;
    int dof = 0;
    for (std::size_t b = 0; b < h.centers.size(); ++b) {
        const double expected = stats::wigner_pdf(h.centers[b]) * h.width * s.size();
        if (expected < 5) continue;
        const double observed = h.densities[b] * h.width * s.size();
        chi2 += (observed - expected) * (observed - expected) / expected;
        ++dof;
    }
    CHECK(chi2 / (dof - 1) < 2.0);
}

TEST_CASE("Poisson levels") {
    const auto levels = sample_poisson_levels(5000, {1});
    for (std::size_t i = 1; i < levels.size(); ++i) CHECK(levels[i] > levels[i - 1]);
    const double mean_gap = (levels.back() - levels.front()) / (levels.size() - 1);
    CHECK(mean_gap == doctest::Approx(1.0).epsilon(0.03));
    CHECK(sample_poisson_levels(100, {4}) == sample_poisson_levels(100, {4}));
}

TEST_CASE("Berry-Robnik quantile limits") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double u = u01(rng);
        CHECK(std::abs(berry_robnik_quantile(u, 1.0) - (-std::log1p(-u))) <= 1e-12);
        CHECK(std::abs(berry_robnik_quantile(u, 0.0) - std::sqrt(-(4 / M_PI) * std::log1p(-u))) <= 1e-12);
        for (double q : {0.2, 0.5, 0.8})
            CHECK(stats::berry_robnik_cdf(berry_robnik_quantile(u, q), q) == doctest::Approx(u).epsilon(1e-12));
    }
    CHECK(berry_robnik_quantile(0.0, 0.5) == 0.0);
}

TEST_CASE("Berry-Robnik sampler") {
    CHECK(sample_berry_robnik(0.4, 100, {9}) == sample_berry_robnik(0.4, 100, {9}));
    CHECK(ks_statistic(sample_berry_robnik(0.5, 100000, {10}), 0.5) < 0.01);
    const auto exp = sample_berry_robnik(1.0, 20000, {11});
    CHECK(std::accumulate(exp.begin(), exp.end(), 0.0) / exp.size() == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("grid oracle") {
    CHECK(grid_mle(stats::SpacingSample(sample_berry_robnik(1.0, 5000, {12}))) >= 0.95);
    for (double q : {0.1, 0.5, 0.9}) {
        std::vector<double> smooth;
        // Spacings at the 1/(2n), 3/(2n), ... quantiles.
        for (int i = 0; i < 4000; ++i) smooth.push_back(berry_robnik_quantile((i + 0.5) / 4000, q));
        CHECK(std::abs(grid_mle(stats::SpacingSample(smooth)) - q) <= 2e-3);
    }
}

#include "dickestat/validate.hpp"

#include "dickestat/model.hpp"
#include "dickestat/oracle.hpp"
#include "dickestat/stats.hpp"
#include "dickestat/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

namespace dickestat::oracle {

namespace {

Check at_least(std::string name, double value, double threshold) {
    return {std::move(name), value >= threshold, value, threshold, ">="};
}

Check at_most(std::string name, double value, double threshold) {
    return {std::move(name), value <= threshold, value, threshold, "<="};
}

double pipeline_q(const std::vector<double>& levels) {
    const auto seq = unfold::unfold_levels(levels);
    return stats::mle_q(stats::SpacingSample(seq.spacings)).q_hat;
}

}  // namespace

template <class Scalar>
double spin_commutator_error(std::initializer_list<int> atom_counts) {
    using Complex = std::complex<Scalar>;
    using CMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
    Scalar worst = 0;
    for (int n_atoms : atom_counts) {
        const auto s = model::collective_spin<Scalar>(n_atoms);
        const CMatrix sx = s.sx.template cast<Complex>();
        const CMatrix sy = (s.sp - s.sp.transpose()).template cast<Complex>() / Complex(0, 2);
        const CMatrix diff = sx * sy - sy * sx - Complex(0, 1) * s.sz.template cast<Complex>();
        worst = std::max(worst, diff.cwiseAbs().maxCoeff());
    }
    return static_cast<double>(worst);
}

template double spin_commutator_error<double>(std::initializer_list<int>);
template double spin_commutator_error<long double>(std::initializer_list<int>);

std::vector<Check> run_validation(std::uint64_t seed) {
    std::vector<Check> checks;

    checks.push_back(at_least("poisson_pipeline_q", pipeline_q(sample_poisson_levels(5000, {seed})), 0.95));
    checks.push_back(at_most("goe_pipeline_q", pipeline_q(goe_central_levels(1000, 0.5, {seed + 1})), 0.10));

    {
        const stats::SpacingSample s(sample_berry_robnik(0.5, 5000, {seed + 2}));
        checks.push_back(at_most("berry_robnik_roundtrip_abs_error", std::abs(stats::mle_q(s).q_hat - 0.5), 0.05));
    }
    checks.push_back(at_most("berry_robnik_ks_q0.5", ks_statistic(sample_berry_robnik(0.5, 100000, {seed + 3}), 0.5), 0.01));

    {
        double worst_grid = 0.0;
        double worst_fd = 0.0;
        std::uint64_t s = seed + 10;
        for (double q_true : {0.1, 0.5, 0.9}) {
            for (int t = 0; t < 4; ++t) {
                const stats::SpacingSample sample(sample_berry_robnik(q_true, 2000, {s++}));
                worst_grid = std::max(worst_grid, std::abs(stats::mle_q(sample).q_hat - grid_mle(sample)));
                for (double q : {0.2, 0.45, 0.8}) {
                    constexpr double h = 1e-5;
                    const double fd = (stats::log_likelihood(sample, q + h) - stats::log_likelihood(sample, q - h)) / (2 * h);
                    worst_fd = std::max(worst_fd, std::abs(stats::score(sample, q) - fd));
                }
            }
        }
        checks.push_back(at_most("newton_vs_grid_max_diff", worst_grid, 1e-4));
        checks.push_back(at_most("score_vs_finite_difference", worst_fd, 1e-6));
    }

    {
        double worst = 0.0;
        for (int i = 0; i <= 10; ++i) {
            const double q = i / 10.0;
            const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                [q](double x) { return stats::berry_robnik_pdf(x, q); }, 0.0, 40.0, 15, 1e-14);
            worst = std::max(worst, std::abs(mass - 1.0));
        }
        checks.push_back(at_most("berry_robnik_normalization", worst, 1e-9));
    }

    {
        model::ModelParams p{0.37, 1.0, 0.0, 21, 400};
        const auto h = model::build_banded_hamiltonian(p, model::Sector::both);
        const auto ev = model::lowest_eigenvalues(h, 250);
        std::vector<double> exact;
        for (const auto& s : model::enumerate_basis(p)) exact.push_back(p.omega_field * s.n + p.omega_atom * s.m());
        std::sort(exact.begin(), exact.end());
        double worst = 0.0;
        for (std::size_t i = 0; i < ev.size(); ++i) worst = std::max(worst, std::abs(ev[i] - exact[i]));
        checks.push_back(at_most("decoupled_limit_max_error", worst, 1e-10));
    }

    checks.push_back(at_most("spin_commutator_max_error", spin_commutator_error<long double>(), 1e-12));
    return checks;
}

nlohmann::ordered_json validation_report(const std::vector<Check>& checks, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    bool all = true;
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        all = all && c.passed;
        list.push_back({{"name", c.name},
                        {"passed", c.passed},
                        {"value", c.value},
                        {"threshold", c.threshold},
                        {"comparison", c.detail}});
    }
    j["checks"] = list;
    j["all_passed"] = all;
    return j;
}

}  // namespace dickestat::oracle

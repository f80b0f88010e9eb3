#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>

#include "dickestat/errors.hpp"
#include "dickestat/model.hpp"
#include "dickestat/validate.hpp"

using namespace dickestat;
using namespace dickestat::model;

TEST_CASE("basis ordering and size") {
    const auto b = enumerate_basis({1, 1, 0, 1, 1});
    REQUIRE(b.size() == 4);
    CHECK(b[0] == BasisState{-1, 0});
    CHECK(b[1] == BasisState{-1, 1});
    CHECK(b[2] == BasisState{1, 0});
    CHECK(b[3] == BasisState{1, 1});

    const auto c = enumerate_basis({1, 1, 0, 2, 0});
    REQUIRE(c.size() == 3);
    CHECK(c[0].two_m == -2);
    CHECK(c[1].two_m == 0);
    CHECK(c[2].two_m == 2);

    ModelParams big{1, 1, 0.2, 21, 499};
    CHECK(big.dimension() == 11000);
    const auto basis = enumerate_basis(big);
    for (std::size_t i = 0; i < basis.size(); i += 997) CHECK(basis_index(basis[i], big) == i);

    CHECK_THROWS_AS(enumerate_basis(big, 100), SizeError);
    CHECK_THROWS_AS(basis_index({3, 0}, {1, 1, 0, 1, 1}), ArgumentError);
}

TEST_CASE("spin matrices") {
    const auto s1 = spin_matrices(1);
    CHECK(s1.sz(0, 0) == -0.5);
    CHECK(s1.sz(1, 1) == 0.5);
    CHECK(s1.sx(0, 1) == 0.5);
    CHECK(s1.sx(1, 0) == 0.5);

    // Triplet block of two spin-1/2: Sx = (sx x 1 + 1 x sx) on |dd>, (|du> + |ud>)/sqrt2, |uu>.
    Eigen::Matrix2d sx;
    sx << 0, 0.5, 0.5, 0;
    Eigen::Matrix4d sx2 = Eigen::Matrix4d::Zero();
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c) {
                sx2(2 * a + c, 2 * b + c) += sx(a, b);
                sx2(2 * c + a, 2 * c + b) += sx(a, b);
            }
    Eigen::Matrix<double, 4, 3> triplet = Eigen::Matrix<double, 4, 3>::Zero();
    triplet(0, 0) = 1;
    triplet(1, 1) = triplet(2, 1) = 1 / std::sqrt(2.0);
    triplet(3, 2) = 1;
    const Eigen::Matrix3d projected = triplet.transpose() * sx2 * triplet;
    const auto s2 = spin_matrices(2);
    CHECK((projected - s2.sx).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(s2.sx(0, 1) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(s2.sx(1, 2) == doctest::Approx(std::sqrt(2.0) / 2).epsilon(1e-15));

    CHECK_THROWS_AS(spin_matrices(0), DomainError);
}

TEST_CASE("spin algebra") {
    CHECK(oracle::spin_commutator_error<long double>() <= 1e-12);
    // Double storage is checked relative to the largest entry.
    for (int n : {1, 2, 21, 200}) {
        const double scale = 0.25 * (n + 1.0) * (n + 1.0);
        CHECK(oracle::spin_commutator_error<double>({n}) <= 1e-14 * scale);
    }
}

TEST_CASE("boson algebra under truncation") {
    const int n_max = 12;
    const Eigen::MatrixXd a = annihilation(n_max);
    const Eigen::MatrixXd comm = a * a.transpose() - a.transpose() * a;
    for (int i = 0; i <= n_max; ++i) {
        for (int j = 0; j <= n_max; ++j) {
            if (i == n_max) continue;
            CHECK(std::abs(comm(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-14);
        }
    }
    CHECK(comm(n_max, n_max) == doctest::Approx(-n_max).epsilon(1e-14));
}

TEST_CASE("smallest Hamiltonian") {
    const double W = 1.3, w = 0.7, G = 0.25;
    const auto h = build_hamiltonian({W, w, G, 1, 1});
    Eigen::Matrix4d expected;
    expected << -w / 2, 0, 0, G, 0, W - w / 2, G, 0, 0, G, w / 2, 0, G, 0, 0, W + w / 2;
    CHECK((h - expected).cwiseAbs().maxCoeff() < 1e-15);

    // The {|-1/2,0>, |+1/2,1>} block against its closed form.
    const double mid = W / 2, half = std::sqrt((W / 2 + w / 2) * (W / 2 + w / 2) + G * G);
    const auto ev = lowest_eigenvalues(h, 4);
    CHECK(std::count_if(ev.begin(), ev.end(), [&](double e) { return std::abs(e - (mid - half)) < 1e-12; }) == 1);
    CHECK(std::count_if(ev.begin(), ev.end(), [&](double e) { return std::abs(e - (mid + half)) < 1e-12; }) == 1);
}

TEST_CASE("eigenvalue basics") {
    Eigen::MatrixXd d = Eigen::Vector3d(3, 1, 2).asDiagonal();
    const auto ev = lowest_eigenvalues(d, 2);
    REQUIRE(ev.size() == 2);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(lowest_eigenvalues(d, 4), ArgumentError);
}

TEST_CASE("decoupled limit is diagonal") {
    ModelParams p{0.9, 1.1, 0.0, 3, 5};
    const auto h = build_hamiltonian(p);
    const auto basis = enumerate_basis(p);
    for (std::size_t i = 0; i < basis.size(); ++i) {
        CHECK(h(i, i) == doctest::Approx(p.omega_field * basis[i].n + p.omega_atom * basis[i].m()));
        for (std::size_t j = 0; j < basis.size(); ++j)
            if (i != j) CHECK(h(i, j) == 0.0);
    }
}

TEST_CASE("Hamiltonian symmetry is exact") {
    const auto consts = constants_from_ratios(1.0, 0.2, 21, 40);
    auto p = derive_scaled_params(consts, 21, 40);
    p.n_max = 60;
    const auto h = build_hamiltonian(p);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("banded sectors match the dense matrix") {
    ModelParams p{1.0, 1.0, 0.4, 5, 30};
    const auto dense = build_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense);
    const auto full = build_banded_hamiltonian(p, Sector::both);
    CHECK((full.to_dense() - full.to_dense().transpose()).cwiseAbs().maxCoeff() == 0.0);
    const auto banded = lowest_eigenvalues(full, 40);
    for (int i = 0; i < 40; ++i) CHECK(banded[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-12));

    std::vector<double> merged;
    for (auto s : {Sector::even, Sector::odd}) {
        const auto h = build_banded_hamiltonian(p, s);
        for (const auto& b : h.basis) CHECK(parity_of(b, p.n_atoms) == (s == Sector::even ? Parity::even : Parity::odd));
        const auto ev = lowest_eigenvalues(h, h.dim());
        merged.insert(merged.end(), ev.begin(), ev.end());
    }
    std::sort(merged.begin(), merged.end());
    REQUIRE(merged.size() == dense.rows());
    for (Eigen::Index i = 0; i < dense.rows(); ++i) CHECK(merged[i] == doctest::Approx(es.eigenvalues()(i)).epsilon(1e-11));
}

TEST_CASE("eigenpairs satisfy H v = E v") {
    ModelParams p{1.0, 1.0, 0.3, 21, 200};
    const auto h = build_banded_hamiltonian(p, Sector::even);
    const auto pairs = lowest_eigenpairs(h, 60);
    const Eigen::MatrixXd dense = h.to_dense();
    for (int i = 0; i < 60; ++i) {
        const Eigen::VectorXd v = pairs.vectors.col(i);
        CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((dense * v - pairs.values[i] * v).norm() < 1e-9);
    }
    const Eigen::MatrixXd gram = pairs.vectors.transpose() * pairs.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("scaling map") {
    auto p = derive_scaled_params({1, 1, 1}, 1, 1.0);
    CHECK(p.omega_field == 1.0);
    CHECK(p.omega_atom == 1.0);
    CHECK(p.coupling == 0.5);
    p = derive_scaled_params({1, 1, 1}, 1, 4.0);
    CHECK(p.omega_field == 0.25);
    CHECK(p.omega_atom == 1.0);
    CHECK(p.coupling == 0.25);
    CHECK_THROWS_AS(derive_scaled_params({1, 1, 1}, 1, 0.0), DomainError);
    CHECK_THROWS_AS(derive_scaled_params({1, 1, 1}, 1, -2.0), DomainError);

    const auto c = constants_from_ratios(1.0, 0.2, 21, 40);
    const auto ref = derive_scaled_params(c, 21, 40);
    CHECK(ref.omega_field / ref.omega_atom == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ref.coupling / std::sqrt(ref.omega_field * ref.omega_atom) == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(ref.omega_atom == doctest::Approx(1.0).epsilon(1e-14));

    for (double nf : {1.0, 7.5, 40.0, 1200.0}) {
        for (int na : {1, 21, 200}) {
            const auto q = derive_scaled_params(c, na, nf);
            CHECK(nf * q.omega_field == doctest::Approx(c.c_field).epsilon(1e-14));
            CHECK(na * q.omega_atom == doctest::Approx(c.c_atom).epsilon(1e-14));
            CHECK(2 * q.coupling * na * std::sqrt(nf) == doctest::Approx(c.c_int).epsilon(1e-14));
        }
    }
}

TEST_CASE("m labels at zero coupling are exact") {
    ModelParams p{1.0, 0.37, 0.0, 6, 40};
    const auto h = build_banded_hamiltonian(p, Sector::even);
    const auto pairs = lowest_eigenpairs(h, 30);
    for (auto rule : {LabelRule::dominant_component, LabelRule::mean_sz}) {
        const auto labels = assign_m_labels(pairs.vectors, h.basis, rule);
        for (int i = 0; i < 30; ++i) {
            Eigen::Index k;
            pairs.vectors.col(i).cwiseAbs().maxCoeff(&k);
            CHECK(labels[i] == h.basis[k].two_m);
        }
    }

    // Weak coupling keeps the parent label.
    ModelParams weak = p;
    weak.coupling = 1e-4;
    const auto hw = build_banded_hamiltonian(weak, Sector::even);
    const auto pw = lowest_eigenpairs(hw, 30);
    const auto l0 = assign_m_labels(pairs.vectors, h.basis);
    const auto l1 = assign_m_labels(pw.vectors, hw.basis);
    CHECK(l0 == l1);
}

TEST_CASE("dominant-component ties go to smaller |m|") {
    std::vector<BasisState> basis{{-3, 0}, {1, 2}};
    Eigen::MatrixXd v(2, 1);
    v << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    CHECK(assign_m_labels(v, basis)[0] == 1);
}

TEST_CASE("cutoff convergence") {
    SUBCASE("decoupled converges at the first cutoffs") {
        ModelParams p{1.0, 1.0, 0.0, 3, 1};
        const std::vector<int> schedule{300, 350, 400};
        const auto seq = converged_levels(p, 100, schedule);
        CHECK(seq.converged);
        CHECK(seq.cutoffs_tried.size() == 2);
        CHECK(seq.energies.size() == 100);
        CHECK(seq.two_m_labels.size() == 100);
        CHECK(std::is_sorted(seq.energies.begin(), seq.energies.end()));
    }
    SUBCASE("schedule errors") {
        ModelParams p{1.0, 1.0, 0.2, 3, 1};
        const std::vector<int> one{50};
        CHECK_THROWS_AS(converged_levels(p, 10, one), ArgumentError);
        const std::vector<int> small{5, 6};
        CHECK_THROWS_AS(converged_levels(p, 500, small), ArgumentError);
    }
    SUBCASE("an exhausted schedule is flagged") {
        ModelParams p{1.0, 1.0, 0.5, 21, 1};
        const std::vector<int> schedule{20, 22};
        ConvergenceOptions fixed;
        fixed.adaptive = false;
        const auto seq = converged_levels(p, 50, schedule, fixed);
        CHECK_FALSE(seq.converged);
        CHECK(seq.last_shift > 1e-8);
        CHECK(seq.cutoffs_tried == schedule);

        const auto grown = converged_levels(p, 50, schedule);
        CHECK(grown.converged);
        CHECK(grown.cutoffs_tried.back() > 22);
    }
    SUBCASE("eigenvalues never rise with the cutoff") {
        ModelParams p{1.0, 1.0, 0.3, 5, 1};
        std::vector<double> prev;
        for (int n = 30; n <= 90; n += 15) {
            p.n_max = n;
            const auto ev = lowest_eigenvalues(build_banded_hamiltonian(p, Sector::even), 40);
            if (!prev.empty())
                for (int i = 0; i < 40; ++i) CHECK(ev[i] <= prev[i] + 1e-12);
            prev = ev;
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelParams({0.0, 1, 0, 1, 1}).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams({1, -1, 0, 1, 1}).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams({1, 1, 0, 0, 1}).validate(), DomainError);
    CHECK_THROWS_AS(ModelParams({1, 1, 0, 1, 10}).validate(5), SizeError);
    CHECK_THROWS_AS(ScalingConstants({0, 1, 1}).validate(), DomainError);
}

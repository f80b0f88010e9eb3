#include "dickestat/errors.hpp"
#include "dickestat/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>
#include <lapacke.h>

namespace dickestat::model {

std::vector<double> lowest_eigenvalues(const Eigen::MatrixXd& h, std::size_t k) {
    if (h.rows() != h.cols()) throw ArgumentError("matrix must be square");
    if (k == 0 || k > static_cast<std::size_t>(h.rows()))
        throw ArgumentError(fmt::format("requested {} eigenvalues of a {}x{} matrix", k, h.rows(),
                                        h.cols()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError(fmt::format("dense eigensolver failed on {}x{} matrix", h.rows(), h.cols()));
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + k};
}

namespace {

std::vector<double> band_eigenvalues(const BandedHamiltonian& h, std::size_t k) {
    const auto n = static_cast<lapack_int>(h.dim());
    const auto kd = static_cast<lapack_int>(h.bandwidth);
    std::vector<double> ab = h.band;  // dsbevx overwrites the band
    std::vector<double> w(h.dim());
    std::vector<lapack_int> ifail(h.dim());
    double q_dummy = 0.0;
    double z_dummy = 0.0;
    lapack_int found = 0;
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    const lapack_int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', 'I', 'U', n, kd, ab.data(), kd + 1,
                                           &q_dummy, 1, 0.0, 0.0, 1, static_cast<lapack_int>(k),
                                           abstol, &found, w.data(), &z_dummy, 1, ifail.data());
    if (info != 0 || found != static_cast<lapack_int>(k))
        throw NumericError(fmt::format("dsbevx failed (info={}, found {} of {} eigenvalues, n={}, kd={})",
                                       info, found, k, n, kd));
    w.resize(k);
    return w;
}

}  // namespace

std::vector<double> lowest_eigenvalues(const BandedHamiltonian& h, std::size_t k) {
    if (k == 0 || k > h.dim())
        throw ArgumentError(fmt::format("requested {} eigenvalues of a dimension-{} matrix", k, h.dim()));
    return band_eigenvalues(h, k);
}

Eigenpairs lowest_eigenpairs(const BandedHamiltonian& h, std::size_t k) {
    if (k == 0 || k > h.dim())
        throw ArgumentError(fmt::format("requested {} eigenpairs of a dimension-{} matrix", k, h.dim()));

    Eigenpairs out;
    out.values = band_eigenvalues(h, k);

    const std::size_t dim = h.dim();
    const std::size_t kd = h.bandwidth;
    const auto n = static_cast<lapack_int>(dim);
    const std::size_t ldab = 2 * kd + kd + 1;  // general band layout for dgbtrf

    double scale = 0.0;
    for (double v : h.band) scale = std::max(scale, std::abs(v));
    scale = std::max(scale, 1.0);
    const double cluster_gap = 1e-7 * scale;

    out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(k));
    std::vector<double> lu(ldab * dim);
    std::vector<lapack_int> ipiv(dim);
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);

    std::size_t cluster_start = 0;
    for (std::size_t e = 0; e < k; ++e) {
        if (e > 0 && out.values[e] - out.values[e - 1] > cluster_gap) cluster_start = e;

        // Shifted copy of H in general band storage: A(i,j) -> lu[(2kd + i - j) + j*ldab].
        double shift = out.values[e];
        lapack_int info = 0;
        for (int attempt = 0; attempt < 3; ++attempt) {
            std::fill(lu.begin(), lu.end(), 0.0);
            for (std::size_t j = 0; j < dim; ++j) {
                const std::size_t lo = j > kd ? j - kd : 0;
                const std::size_t hi = std::min(dim - 1, j + kd);
                for (std::size_t i = lo; i <= hi; ++i) {
                    double v = h.at(i, j);
                    if (i == j) v -= shift;
                    lu[(2 * kd + i - j) + j * ldab] = v;
                }
            }
            info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, n, n, static_cast<lapack_int>(kd),
                                  static_cast<lapack_int>(kd), lu.data(),
                                  static_cast<lapack_int>(ldab), ipiv.data());
            if (info == 0) break;
            shift += 1e-12 * scale * (attempt + 1);  // exactly singular: nudge off the eigenvalue
        }
        if (info != 0)
            throw NumericError(fmt::format("inverse iteration factorization failed (info={})", info));

        Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
        for (auto& x : v) x = uni(rng);
        for (int iter = 0; iter < 3; ++iter) {
            v.normalize();
            for (std::size_t c = cluster_start; c < e; ++c) {
                const auto col = out.vectors.col(static_cast<Eigen::Index>(c));
                v -= col.dot(v) * col;
            }
            v.normalize();
            const lapack_int solve =
                LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', n, static_cast<lapack_int>(kd),
                               static_cast<lapack_int>(kd), 1, lu.data(),
                               static_cast<lapack_int>(ldab), ipiv.data(), v.data(), n);
            if (solve != 0) throw NumericError("inverse iteration solve failed");
        }
        for (std::size_t c = cluster_start; c < e; ++c) {
            const auto col = out.vectors.col(static_cast<Eigen::Index>(c));
            v -= col.dot(v) * col;
        }
        v.normalize();
        out.vectors.col(static_cast<Eigen::Index>(e)) = v;
    }
    return out;
}

std::vector<int> assign_m_labels(const Eigen::MatrixXd& eigenvectors,
                                 std::span<const BasisState> basis, LabelRule rule) {
    if (static_cast<std::size_t>(eigenvectors.rows()) != basis.size())
        throw ArgumentError("eigenvector length does not match basis size");
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(eigenvectors.cols()));

    for (Eigen::Index c = 0; c < eigenvectors.cols(); ++c) {
        const auto v = eigenvectors.col(c);
        if (rule == LabelRule::dominant_component) {
            int best_two_m = 0;
            double best = -1.0;
            constexpr double tie = 1e-12;
            for (std::size_t r = 0; r < basis.size(); ++r) {
                const double w = v(static_cast<Eigen::Index>(r)) * v(static_cast<Eigen::Index>(r));
                const int two_m = basis[r].two_m;
                if (w > best + tie ||
                    (std::abs(w - best) <= tie && std::abs(two_m) < std::abs(best_two_m))) {
                    best = std::max(w, best);
                    best_two_m = two_m;
                }
            }
            labels.push_back(best_two_m);
        } else {
            double mean = 0.0;
            double norm = 0.0;
            int lo = basis.empty() ? 0 : basis.front().two_m;
            int hi = lo;
            for (std::size_t r = 0; r < basis.size(); ++r) {
                const double w = v(static_cast<Eigen::Index>(r)) * v(static_cast<Eigen::Index>(r));
                mean += w * basis[r].m();
                norm += w;
                lo = std::min(lo, basis[r].two_m);
                hi = std::max(hi, basis[r].two_m);
            }
            mean /= norm;
            // Allowed labels are lo/2 + integer.
            const int two_m = lo + 2 * static_cast<int>(std::lround(mean - 0.5 * lo));
            labels.push_back(std::clamp(two_m, lo, hi));
        }
    }
    return labels;
}

}  // namespace dickestat::model

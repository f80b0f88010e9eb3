#include "dickestat/errors.hpp"
#include "dickestat/model.hpp"

#include <cmath>

#include <fmt/format.h>

namespace dickestat::model {

Eigen::MatrixXd build_hamiltonian(const ModelParams& params, std::size_t max_dimension) {
    params.validate(max_dimension);
    const auto dim = static_cast<Eigen::Index>(params.dimension());
    const int photons = params.n_max + 1;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);

    for (int mi = 0; mi <= params.n_atoms; ++mi) {
        const int two_m = -params.n_atoms + 2 * mi;
        const double sx_up = sx_ladder_element(params.n_atoms, two_m);  // <m+1|Sx|m>
        for (int n = 0; n <= params.n_max; ++n) {
            const Eigen::Index row = mi * photons + n;
            h(row, row) = params.omega_field * n + params.omega_atom * 0.5 * two_m;
            if (mi == params.n_atoms) continue;
            // (m, n) <-> (m+1, n+1) and (m, n+1) <-> (m+1, n); both carry sqrt(n+1).
            if (n < params.n_max) {
                const double v = 2.0 * params.coupling * sx_up * std::sqrt(n + 1.0);
                const Eigen::Index up_up = (mi + 1) * photons + n + 1;
                const Eigen::Index up_same = (mi + 1) * photons + n;
                const Eigen::Index same_up = mi * photons + n + 1;
                h(row, up_up) = v;
                h(up_up, row) = v;
                h(same_up, up_same) = v;
                h(up_same, same_up) = v;
            }
        }
    }
    return h;
}

double BandedHamiltonian::at(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    if (j >= dim()) throw ArgumentError("band index out of range");
    if (j - i > bandwidth) return 0.0;
    return band[(bandwidth + i - j) + j * (bandwidth + 1)];
}

Eigen::MatrixXd BandedHamiltonian::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < dim(); ++j) {
        const std::size_t lo = j > bandwidth ? j - bandwidth : 0;
        for (std::size_t i = lo; i <= j; ++i) {
            const double v = band[(bandwidth + i - j) + j * (bandwidth + 1)];
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return out;
}

namespace {

bool in_sector(const BasisState& s, int n_atoms, Sector sector) {
    if (sector == Sector::both) return true;
    const Parity p = parity_of(s, n_atoms);
    return (sector == Sector::even) == (p == Parity::even);
}

}  // namespace

BandedHamiltonian build_banded_hamiltonian(const ModelParams& params, Sector sector,
                                           std::size_t max_dimension) {
    params.validate(max_dimension);
    const int spins = params.n_atoms + 1;

    BandedHamiltonian out;
    std::vector<long> index(params.dimension(), -1);  // photon-major full index -> sector index
    for (int n = 0; n <= params.n_max; ++n)
        for (int mi = 0; mi < spins; ++mi) {
            const BasisState s{-params.n_atoms + 2 * mi, n};
            if (!in_sector(s, params.n_atoms, sector)) continue;
            index[static_cast<std::size_t>(n) * spins + mi] = static_cast<long>(out.basis.size());
            out.basis.push_back(s);
        }

    struct Entry {
        std::size_t i, j;
        double v;
    };
    std::vector<Entry> couplings;
    std::size_t bandwidth = 0;
    for (std::size_t col = 0; col < out.basis.size(); ++col) {
        const auto [two_m, n] = out.basis[col];
        if (n == params.n_max) continue;
        const int mi = (two_m + params.n_atoms) / 2;
        const double root = std::sqrt(n + 1.0);
        for (int dm : {-1, +1}) {
            const int mj = mi + dm;
            if (mj < 0 || mj >= spins) continue;
            const double sx = sx_ladder_element(params.n_atoms, two_m + (dm < 0 ? -2 : 0));
            const long target = index[static_cast<std::size_t>(n + 1) * spins + mj];
            if (target < 0) throw NumericError("coupling leaves the parity sector");
            const auto row = static_cast<std::size_t>(target);
            couplings.push_back({std::min(col, row), std::max(col, row),
                                 2.0 * params.coupling * sx * root});
            bandwidth = std::max(bandwidth, row > col ? row - col : col - row);
        }
    }

    out.bandwidth = bandwidth;
    out.band.assign((bandwidth + 1) * out.basis.size(), 0.0);
    for (std::size_t k = 0; k < out.basis.size(); ++k) {
        const auto& s = out.basis[k];
        out.band[bandwidth + k * (bandwidth + 1)] =
            params.omega_field * s.n + params.omega_atom * s.m();
    }
    for (const auto& e : couplings) out.band[(bandwidth + e.i - e.j) + e.j * (bandwidth + 1)] = e.v;
    return out;
}

}  // namespace dickestat::model

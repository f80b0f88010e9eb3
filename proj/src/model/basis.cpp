#include "dickestat/errors.hpp"
#include "dickestat/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace dickestat::model {

void ModelParams::validate(std::size_t max_dimension) const {
    if (!(omega_field > 0.0) || !std::isfinite(omega_field))
        throw DomainError(fmt::format("omega_field must be > 0 (got {})", omega_field));
    if (!(omega_atom > 0.0) || !std::isfinite(omega_atom))
        throw DomainError(fmt::format("omega_atom must be > 0 (got {})", omega_atom));
    if (!(coupling >= 0.0) || !std::isfinite(coupling))
        throw DomainError(fmt::format("coupling must be >= 0 (got {})", coupling));
    if (n_atoms < 1) throw DomainError(fmt::format("n_atoms must be >= 1 (got {})", n_atoms));
    if (n_max < 1) throw DomainError(fmt::format("n_max must be >= 1 (got {})", n_max));
    if (dimension() > max_dimension)
        throw SizeError(fmt::format("basis dimension {} x {} = {} exceeds limit {}", n_atoms + 1,
                                    n_max + 1, dimension(), max_dimension));
}

std::size_t ModelParams::dimension() const {
    if (n_atoms < 0 || n_max < 0) return 0;
    return static_cast<std::size_t>(n_atoms + 1) * static_cast<std::size_t>(n_max + 1);
}

void ScalingConstants::validate() const {
    if (!(c_field > 0.0) || !(c_atom > 0.0) || !(c_int > 0.0))
        throw DomainError(fmt::format("scaling constants must be > 0 (got {}, {}, {})", c_field,
                                      c_atom, c_int));
}

Parity parity_of(const BasisState& state, int n_atoms) {
    // m + j is an integer in [0, N_A].
    const int m_plus_j = (state.two_m + n_atoms) / 2;
    return ((state.n + m_plus_j) % 2 == 0) ? Parity::even : Parity::odd;
}

std::string to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

std::string to_string(Sector s) {
    switch (s) {
        case Sector::both: return "both";
        case Sector::even: return "even";
        case Sector::odd: return "odd";
    }
    return "both";
}

std::string to_string(LabelRule r) {
    return r == LabelRule::dominant_component ? "dominant_component" : "mean_sz";
}

Sector sector_from_string(const std::string& s) {
    if (s == "both") return Sector::both;
    if (s == "even") return Sector::even;
    if (s == "odd") return Sector::odd;
    throw ArgumentError("unknown parity sector '" + s + "' (expected both|even|odd)");
}

LabelRule label_rule_from_string(const std::string& s) {
    if (s == "dominant_component") return LabelRule::dominant_component;
    if (s == "mean_sz") return LabelRule::mean_sz;
    throw ArgumentError("unknown label rule '" + s + "' (expected dominant_component|mean_sz)");
}

std::vector<BasisState> enumerate_basis(const ModelParams& params, std::size_t max_dimension) {
    // n_max = 0 (spin states only) is accepted here; Hamiltonians still need n_max >= 1.
    if (params.n_max < 0) throw DomainError(fmt::format("n_max must be >= 0 (got {})", params.n_max));
    ModelParams checked = params;
    checked.n_max = std::max(params.n_max, 1);
    checked.validate();
    if (params.dimension() > max_dimension)
        throw SizeError(fmt::format("basis dimension {} exceeds limit {}", params.dimension(), max_dimension));
    std::vector<BasisState> states;
    states.reserve(params.dimension());
    for (int two_m = -params.n_atoms; two_m <= params.n_atoms; two_m += 2)
        for (int n = 0; n <= params.n_max; ++n) states.push_back({two_m, n});
    return states;
}

std::size_t basis_index(const BasisState& state, const ModelParams& params) {
    const int shifted = state.two_m + params.n_atoms;
    if (shifted < 0 || shifted > 2 * params.n_atoms || shifted % 2 != 0 || state.n < 0 ||
        state.n > params.n_max)
        throw ArgumentError(
            fmt::format("state (2m={}, n={}) is outside the basis", state.two_m, state.n));
    return static_cast<std::size_t>(shifted / 2) * static_cast<std::size_t>(params.n_max + 1) +
           static_cast<std::size_t>(state.n);
}

double sx_ladder_element(int n_atoms, int two_m) {
    const long radicand4 = static_cast<long>(n_atoms - two_m) * (n_atoms + two_m + 2);
    return radicand4 > 0 ? 0.25 * std::sqrt(static_cast<double>(radicand4)) : 0.0;
}

SpinMatrices spin_matrices(int n_atoms) {
    if (n_atoms < 1) throw DomainError("n_atoms must be >= 1");
    auto s = collective_spin<double>(n_atoms);
    return {std::move(s.sz), std::move(s.sx)};
}

Eigen::MatrixXd spin_raising(int n_atoms) {
    if (n_atoms < 1) throw DomainError("n_atoms must be >= 1");
    return collective_spin<double>(n_atoms).sp;
}

Eigen::MatrixXd annihilation(int n_max) {
    if (n_max < 1) throw DomainError("n_max must be >= 1");
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

ModelParams derive_scaled_params(const ScalingConstants& consts, int n_atoms, double n_photon_mean,
                                 int n_max) {
    if (!(n_photon_mean > 0.0) || !std::isfinite(n_photon_mean))
        throw DomainError(fmt::format("mean photon number must be > 0 (got {})", n_photon_mean));
    if (n_atoms < 1) throw DomainError(fmt::format("n_atoms must be >= 1 (got {})", n_atoms));
    consts.validate();
    ModelParams p;
    p.omega_field = consts.c_field / n_photon_mean;
    p.omega_atom = consts.c_atom / n_atoms;
    p.coupling = consts.c_int / (2.0 * n_atoms * std::sqrt(n_photon_mean));
    p.n_atoms = n_atoms;
    p.n_max = n_max;
    return p;
}

ScalingConstants constants_from_ratios(double field_ratio, double coupling_ratio, int n_atoms_ref,
                                       double photon_mean_ref, double omega_atom_ref) {
    if (!(field_ratio > 0.0) || !(coupling_ratio > 0.0) || !(omega_atom_ref > 0.0))
        throw DomainError("ratios and omega_atom_ref must be > 0");
    if (n_atoms_ref < 1 || !(photon_mean_ref > 0.0))
        throw DomainError("reference point needs n_atoms >= 1 and mean photon number > 0");
    const double omega_field = field_ratio * omega_atom_ref;
    const double coupling = coupling_ratio * std::sqrt(omega_field * omega_atom_ref);
    ScalingConstants c;
    c.c_field = photon_mean_ref * omega_field;
    c.c_atom = n_atoms_ref * omega_atom_ref;
    c.c_int = 2.0 * coupling * n_atoms_ref * std::sqrt(photon_mean_ref);
    return c;
}

}  // namespace dickestat::model

#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dickestat::model {

/// Upper bound on the number of basis states any construction may request.
inline constexpr std::size_t kDefaultMaxDimension = 2'000'000;

/// Dense matrices are only assembled up to this dimension (8 bytes * dim^2).
inline constexpr std::size_t kDefaultMaxDenseDimension = 8192;

/**
 * Physical constants of H = Omega a^+a + omega S_z + 2G (a^+ + a) S_x in the
 * symmetric (j = N_A/2) spin sector, plus the photon cutoff that makes the
 * matrix finite.
 */
struct ModelParams {
    double omega_field = 1.0;  // Omega
    double omega_atom = 1.0;   // omega
    double coupling = 0.0;     // G
    int n_atoms = 1;           // N_A
    int n_max = 1;             // photon cutoff

    /// Throws DomainError on invalid constants, SizeError if the basis is too large.
    void validate(std::size_t max_dimension = kDefaultMaxDimension) const;

    std::size_t dimension() const;
};

/// Products held fixed while the mean photon number and atom count vary.
struct ScalingConstants {
    double c_field = 1.0;  // N_F * Omega
    double c_atom = 1.0;   // N_A * omega
    double c_int = 1.0;    // 2 G N_A sqrt(N_F)

    void validate() const;
};

/// |m, n> with the spin projection stored as 2m so half-integers stay exact.
struct BasisState {
    int two_m = 0;
    int n = 0;

    double m() const { return 0.5 * two_m; }

    auto operator<=>(const BasisState&) const = default;
};

/// Eigenvalue of the conserved parity exp(i pi (n + m + j)).
enum class Parity { even, odd };

/// Which parity block(s) a diagonalization runs on.
enum class Sector { both, even, odd };

enum class LabelRule {
    dominant_component,  // m of the largest |amplitude|^2 basis state
    mean_sz,             // <S_z> rounded to the nearest allowed m
};

Parity parity_of(const BasisState& state, int n_atoms);

std::string to_string(Parity p);
std::string to_string(Sector s);
std::string to_string(LabelRule r);
Sector sector_from_string(const std::string& s);
LabelRule label_rule_from_string(const std::string& s);

/// States ordered m-major (m ascending from -N_A/2), then n ascending.
std::vector<BasisState> enumerate_basis(const ModelParams& params,
                                        std::size_t max_dimension = kDefaultMaxDimension);

/// Position of `state` in enumerate_basis order. Throws ArgumentError if out of range.
std::size_t basis_index(const BasisState& state, const ModelParams& params);

/// <m+1| S_x |m> in the spin-j = N_A/2 representation.
double sx_ladder_element(int n_atoms, int two_m);

struct SpinMatrices {
    Eigen::MatrixXd sz;
    Eigen::MatrixXd sx;
};

/// S_z, S_x and S_+ on the N_A + 1 collective states (m ascending) in any
/// floating type. Entries are (1/2) sqrt((j - m)(j + m + 1)) with an exact
/// integer radicand, so a wider Scalar checks the algebra below double rounding.
template <class Scalar>
struct CollectiveSpin {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix sz;
    Matrix sx;
    Matrix sp;
};

template <class Scalar>
CollectiveSpin<Scalar> collective_spin(int n_atoms) {
    using std::sqrt;
    const int dim = n_atoms + 1;
    CollectiveSpin<Scalar> out{CollectiveSpin<Scalar>::Matrix::Zero(dim, dim),
                               CollectiveSpin<Scalar>::Matrix::Zero(dim, dim),
                               CollectiveSpin<Scalar>::Matrix::Zero(dim, dim)};
    for (int i = 0; i < dim; ++i) {
        const int two_m = -n_atoms + 2 * i;
        out.sz(i, i) = Scalar(two_m) / 2;
        if (i + 1 == dim) continue;
        // (j - m)(j + m + 1) with 2j = n_atoms: (n_atoms - two_m)(n_atoms + two_m + 2) / 4.
        const long radicand4 = static_cast<long>(n_atoms - two_m) * (n_atoms + two_m + 2);
        const Scalar e = sqrt(Scalar(radicand4)) / 4;
        out.sx(i + 1, i) = e;
        out.sx(i, i + 1) = e;
        out.sp(i + 1, i) = 2 * e;
    }
    return out;
}

/// Collective S_z, S_x on the N_A + 1 states, m ascending.
SpinMatrices spin_matrices(int n_atoms);

/// Collective raising operator S_+ on the same basis as spin_matrices.
Eigen::MatrixXd spin_raising(int n_atoms);

/// Truncated annihilation operator on {0, ..., n_max}.
Eigen::MatrixXd annihilation(int n_max);

/// Dense Hamiltonian in enumerate_basis order. Exactly symmetric.
Eigen::MatrixXd build_hamiltonian(const ModelParams& params,
                                  std::size_t max_dimension = kDefaultMaxDenseDimension);

/**
 * Hamiltonian restricted to one parity sector (or both), in photon-major
 * ordering so that the coupling is confined to a narrow band. Storage follows
 * LAPACK's upper band layout: element (i, j), i <= j, lives at
 * band[(bandwidth + i - j) + j * (bandwidth + 1)].
 */
struct BandedHamiltonian {
    std::vector<BasisState> basis;
    std::size_t bandwidth = 0;
    std::vector<double> band;

    std::size_t dim() const { return basis.size(); }
    double at(std::size_t i, std::size_t j) const;
    Eigen::MatrixXd to_dense() const;
};

BandedHamiltonian build_banded_hamiltonian(const ModelParams& params, Sector sector,
                                           std::size_t max_dimension = kDefaultMaxDimension);

/// Omega = c_field / N_F, omega = c_atom / N_A, G = c_int / (2 N_A sqrt(N_F)).
ModelParams derive_scaled_params(const ScalingConstants& consts, int n_atoms,
                                 double n_photon_mean, int n_max = 1);

/**
 * Products that realize Omega/omega = field_ratio and G/sqrt(Omega omega) =
 * coupling_ratio at the reference point (n_atoms_ref, photon_mean_ref), with
 * omega fixed to omega_atom_ref there.
 */
ScalingConstants constants_from_ratios(double field_ratio, double coupling_ratio,
                                       int n_atoms_ref, double photon_mean_ref,
                                       double omega_atom_ref = 1.0);

/// k smallest eigenvalues, ascending. Throws ArgumentError if k > dim.
std::vector<double> lowest_eigenvalues(const Eigen::MatrixXd& h, std::size_t k);
std::vector<double> lowest_eigenvalues(const BandedHamiltonian& h, std::size_t k);

struct Eigenpairs {
    std::vector<double> values;
    Eigen::MatrixXd vectors;  // one normalized eigenvector per column
};

/// Eigenvalues by band reduction, eigenvectors by shifted inverse iteration.
Eigenpairs lowest_eigenpairs(const BandedHamiltonian& h, std::size_t k);

/// Per-eigenvector 2m labels. Ties in the dominant rule go to the smaller |m|.
std::vector<int> assign_m_labels(const Eigen::MatrixXd& eigenvectors,
                                 std::span<const BasisState> basis,
                                 LabelRule rule = LabelRule::dominant_component);

struct LevelSequence {
    std::vector<double> energies;
    std::vector<int> two_m_labels;
    std::vector<Parity> parities;
    ModelParams params;  // n_max holds the cutoff the energies came from
    bool converged = false;
    bool interlacing_ok = true;
    double last_shift = 0.0;  // max |delta E| between the last two cutoffs
    std::vector<int> cutoffs_tried;
    Sector sector = Sector::even;
    LabelRule label_rule = LabelRule::dominant_component;
    std::optional<int> label_filter;  // 2m, when levels were selected by label
};

struct ConvergenceOptions {
    double tolerance = 1e-8;
    Sector sector = Sector::even;
    LabelRule label_rule = LabelRule::dominant_component;
    std::optional<int> label_filter;  // keep only levels with this 2m label
    std::size_t max_dimension = kDefaultMaxDimension;
    bool with_labels = true;  // false leaves two_m_labels and parities empty unless filtering
    bool adaptive = true;     // may insert cutoffs beyond the schedule's next entry
};

/// Photon displacement of the mean-field ground state (0 below the critical coupling).
double mean_field_displacement(const ModelParams& params);

/// Increasing cutoffs starting near the photon number the coupled ground
/// state needs, growing by ~25% per step, capped by the dimension budget.
std::vector<int> default_cutoff_schedule(const ModelParams& params, std::size_t k,
                                         std::size_t max_dimension = kDefaultMaxDimension);

/**
 * Diagonalizes at successive cutoffs until the k target levels move by less
 * than the tolerance between consecutive entries. Returns the last attempt
 * with converged = false if the schedule runs out. With options.adaptive,
 * cutoffs estimated from the k-th level's excitation energy may be inserted;
 * cutoffs_tried lists what was actually used.
 */
LevelSequence converged_levels(const ModelParams& params, std::size_t k,
                               std::span<const int> cutoff_schedule,
                               const ConvergenceOptions& options = {});

LevelSequence converged_levels(const ScalingConstants& consts, int n_atoms, double n_photon_mean,
                               std::size_t k, std::span<const int> cutoff_schedule,
                               const ConvergenceOptions& options = {});

}  // namespace dickestat::model

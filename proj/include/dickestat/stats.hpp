#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dickestat::stats {

inline constexpr std::size_t kMinFitSamples = 50;

/// Nearest-neighbor spacings of an unfolded sequence.
class SpacingSample {
public:
    /// Throws DomainError on negative or non-finite spacings.
    explicit SpacingSample(std::vector<double> spacings);

    std::span<const double> values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    bool has_zero() const { return has_zero_; }

private:
    std::vector<double> values_;
    bool has_zero_ = false;
};

double poisson_pdf(double s);
double wigner_pdf(double s);

/// [q + (pi/2)(1-q)s] exp(-q s - (pi/4)(1-q) s^2); q = 1 is Poisson, q = 0 Wigner.
double berry_robnik_pdf(double s, double q);

/// 1 - exp(-q s - (pi/4)(1-q) s^2).
double berry_robnik_cdf(double s, double q);

/// Sum of log densities. Returns -infinity when some density vanishes.
double log_likelihood(const SpacingSample& sample, double q);

/// d log L / dq.
double score(const SpacingSample& sample, double q);

/// d^2 log L / dq^2 (never positive: the log likelihood is concave in q).
double score_derivative(const SpacingSample& sample, double q);

struct FitResult {
    double q_hat = 0.0;
    double std_err = 0.0;  // 1 / sqrt(observed Fisher information)
    double log_likelihood = 0.0;
    int iterations = 0;
    double initializer = 0.0;
    bool converged = false;
    bool clamped = false;
    std::optional<double> unclamped_root;  // root of the score outside [0, 1], if any
    bool used_fallback = false;            // Newton left the bracket and bisection took over
    std::size_t n = 0;
};

struct NewtonOptions {
    double step_tolerance = 1e-10;
    double score_tolerance = 1e-8;
    int max_iterations = 100;
};

/// Least-squares q against a histogram: dense scan of [0, 1] at 1e-3 then
/// golden-section refinement. bins = 0 selects ceil(sqrt(n)) capped at 40.
double ls_fit_q(const SpacingSample& sample, int bins = 0);

/// Same objective on an explicit histogram (bin centers and densities).
double ls_fit_q(std::span<const double> bin_centers, std::span<const double> densities);

struct Histogram {
    std::vector<double> centers;
    std::vector<double> densities;
    double width = 0.0;
};

/// Density-normalized histogram on [0, max s]. bins = 0 selects the default rule.
Histogram spacing_histogram(const SpacingSample& sample, int bins = 0);

/// Newton-Raphson on the score from q0 (default: ls_fit_q), safeguarded by a
/// bisection bracket. Throws SampleSizeError for n < 50.
FitResult mle_q(const SpacingSample& sample, std::optional<double> q0 = std::nullopt,
                const NewtonOptions& options = {});

}  // namespace dickestat::stats

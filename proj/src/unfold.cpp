#include "dickestat/unfold.hpp"

#include "dickestat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

namespace dickestat::unfold {

namespace {

// P_0(x) ... P_degree(x) into out.
void legendre(double x, int degree, double* out) {
    out[0] = 1.0;
    if (degree >= 1) out[1] = x;
    for (int k = 1; k < degree; ++k)
        out[k + 1] = ((2.0 * k + 1.0) * x * out[k] - k * out[k - 1]) / (k + 1.0);
}

double scaled(double e, double lo, double hi) { return (2.0 * e - lo - hi) / (hi - lo); }

}  // namespace

double SmoothModel::operator()(double energy) const {
    std::vector<double> p(static_cast<std::size_t>(degree) + 1);
    legendre(scaled(energy, e_min, e_max), degree, p.data());
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) sum += coefficients[k] * p[k];
    return sum;
}

double UnfoldedSequence::mean_spacing() const {
    if (spacings.empty()) return 0.0;
    return std::accumulate(spacings.begin(), spacings.end(), 0.0) / static_cast<double>(spacings.size());
}

StaircasePoints staircase(std::span<const double> levels) {
    if (levels.size() < 2) throw ArgumentError("staircase needs at least two levels");
    for (double e : levels)
        if (!std::isfinite(e)) throw ArgumentError("levels must be finite");

    double scale = 0.0;
    for (double e : levels) scale = std::max(scale, std::abs(e));
    scale = std::max(scale, levels.back() - levels.front());
    if (scale == 0.0) scale = 1.0;
    const double jitter = 1e-12 * scale;

    StaircasePoints pts;
    pts.energies.reserve(levels.size());
    pts.counts.reserve(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) {
        double e = levels[i];
        if (i > 0) {
            if (levels[i] < levels[i - 1])
                throw ArgumentError(fmt::format("levels are not sorted at index {} ({} < {})", i,
                                                levels[i], levels[i - 1]));
            if (e <= pts.energies.back()) {
                e = pts.energies.back() + jitter;
                ++pts.ties_split;
            }
        }
        pts.energies.push_back(e);
        pts.counts.push_back(static_cast<double>(i + 1));
    }
    return pts;
}

SmoothModel fit_smooth(const StaircasePoints& points, int degree) {
    const std::size_t n = points.energies.size();
    if (degree < 1) throw ArgumentError("polynomial degree must be >= 1");
    if (n <= static_cast<std::size_t>(degree) + 1)
        throw ArgumentError(fmt::format("{} points cannot determine a degree-{} fit", n, degree));

    SmoothModel model;
    model.degree = degree;
    model.e_min = points.energies.front();
    model.e_max = points.energies.back();
    if (!(model.e_max > model.e_min)) throw ArgumentError("staircase spans a zero-width energy range");

    const auto rows = static_cast<Eigen::Index>(n);
    const Eigen::Index cols = degree + 1;
    Eigen::MatrixXd design(rows, cols);
    Eigen::VectorXd rhs(rows);
    std::vector<double> p(static_cast<std::size_t>(cols));
    for (Eigen::Index i = 0; i < rows; ++i) {
        legendre(scaled(points.energies[static_cast<std::size_t>(i)], model.e_min, model.e_max),
                 degree, p.data());
        for (Eigen::Index k = 0; k < cols; ++k) design(i, k) = p[static_cast<std::size_t>(k)];
        rhs(i) = points.counts[static_cast<std::size_t>(i)];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < cols)
        throw NumericError(fmt::format("staircase design matrix is rank deficient ({} < {})",
                                       qr.rank(), cols));
    const Eigen::VectorXd coef = qr.solve(rhs);
    model.coefficients.assign(coef.data(), coef.data() + cols);
    model.residual_norm = (design * coef - rhs).norm();

    // Strict monotonicity on a grid ten times denser than the data.
    const std::size_t grid = 10 * n;
    const double step = (model.e_max - model.e_min) / static_cast<double>(grid - 1);
    double prev = model(model.e_min);
    for (std::size_t g = 1; g < grid; ++g) {
        const double e = (g + 1 == grid) ? model.e_max : model.e_min + step * static_cast<double>(g);
        const double cur = model(e);
        if (!(cur > prev)) {
            // Extend to the end of the non-increasing stretch for the message.
            const double start = e - step;
            double end = e;
            double last = cur;
            for (std::size_t h = g + 1; h < grid; ++h) {
                const double eh = model.e_min + step * static_cast<double>(h);
                const double vh = model(eh);
                if (vh > last) break;
                end = eh;
                last = vh;
            }
            throw UnfoldingError(fmt::format(
                "degree-{} staircase fit is not increasing on [{:.10g}, {:.10g}]", degree, start, end));
        }
        prev = cur;
    }
    return model;
}

UnfoldedSequence unfold(std::span<const double> levels, const SmoothModel& model) {
    if (levels.size() < 2) throw ArgumentError("unfolding needs at least two levels");
    const double slack = 1e-9 * (model.e_max - model.e_min);
    UnfoldedSequence out;
    out.levels.reserve(levels.size());
    for (double e : levels) {
        if (e < model.e_min - slack || e > model.e_max + slack)
            throw ArgumentError(fmt::format("level {} lies outside the fit domain [{}, {}]", e,
                                            model.e_min, model.e_max));
        out.levels.push_back(model(e));
    }
    out.spacings.reserve(levels.size() - 1);
    for (std::size_t i = 0; i + 1 < out.levels.size(); ++i)
        out.spacings.push_back(out.levels[i + 1] - out.levels[i]);
    return out;
}

UnfoldedSequence trim_edges(const UnfoldedSequence& seq, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 0.2))
        throw ArgumentError(fmt::format("trim fraction {} outside [0, 0.2]", fraction));
    const std::size_t n = seq.spacings.size();
    const auto cut = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
    if (n < 2 * cut + kMinSpacingsAfterTrim)
        throw ArgumentError(fmt::format("trimming {} of {} spacings per side leaves fewer than {}", cut,
                                        n, kMinSpacingsAfterTrim));
    UnfoldedSequence out;
    out.trimmed_per_side = seq.trimmed_per_side + cut;
    out.spacings.assign(seq.spacings.begin() + static_cast<std::ptrdiff_t>(cut),
                        seq.spacings.end() - static_cast<std::ptrdiff_t>(cut));
    out.levels.assign(seq.levels.begin() + static_cast<std::ptrdiff_t>(cut),
                      seq.levels.end() - static_cast<std::ptrdiff_t>(cut));
    return out;
}

UnfoldedSequence unfold_levels(std::span<const double> levels, const UnfoldOptions& options,
                               SmoothModel* model_out) {
    const StaircasePoints pts = staircase(levels);
    SmoothModel model = fit_smooth(pts, options.degree);
    UnfoldedSequence seq = unfold(pts.energies, model);
    if (model_out != nullptr) *model_out = std::move(model);
    return trim_edges(seq, options.trim_fraction);
}

}  // namespace dickestat::unfold

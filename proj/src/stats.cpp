#include "dickestat/stats.hpp"

#include "dickestat/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

namespace dickestat::stats {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = 0.5 * kPi;
constexpr double kQuarterPi = 0.25 * kPi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_q(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError(fmt::format("q = {} outside [0, 1]", q));
}

void check_s(double s) {
    if (!(s >= 0.0)) throw DomainError(fmt::format("spacing s = {} must be >= 0", s));
}

// Score and its derivative without the [0, 1] restriction; used to locate
// the root beyond a boundary. Returns false once a density bracket turns
// non-positive.
bool extended_score(const SpacingSample& sample, double q, double& f, double& fp) {
    f = 0.0;
    fp = 0.0;
    for (double s : sample.values()) {
        const double bracket = q + kHalfPi * (1.0 - q) * s;
        if (!(bracket > 0.0)) return false;
        const double num = 1.0 - kHalfPi * s;
        f += num / bracket - (s - kQuarterPi * s * s);
        fp -= (num * num) / (bracket * bracket);
    }
    return true;
}

std::optional<double> root_outside(const SpacingSample& sample, double from) {
    double q = from;
    for (int it = 0; it < 100; ++it) {
        double f = 0.0;
        double fp = 0.0;
        if (!extended_score(sample, q, f, fp) || fp == 0.0) return std::nullopt;
        const double step = f / fp;
        q -= step;
        if (std::abs(step) < 1e-12) {
            double f2 = 0.0;
            double fp2 = 0.0;
            if (!extended_score(sample, q, f2, fp2)) return std::nullopt;
            return q;
        }
    }
    return std::nullopt;
}

double ls_objective(std::span<const double> centers, std::span<const double> densities, double q) {
    double sum = 0.0;
    for (std::size_t b = 0; b < centers.size(); ++b) {
        const double d = densities[b] - berry_robnik_pdf(centers[b], q);
        sum += d * d;
    }
    return sum;
}

}  // namespace

SpacingSample::SpacingSample(std::vector<double> spacings) : values_(std::move(spacings)) {
    for (double s : values_) {
        if (!std::isfinite(s) || s < 0.0)
            throw DomainError(fmt::format("spacing {} is not a finite non-negative number", s));
        if (s == 0.0) has_zero_ = true;
    }
}

double poisson_pdf(double s) {
    check_s(s);
    return std::exp(-s);
}

double wigner_pdf(double s) {
    check_s(s);
    return kHalfPi * s * std::exp(-kQuarterPi * s * s);
}

double berry_robnik_pdf(double s, double q) {
    check_s(s);
    check_q(q);
    return (q + kHalfPi * (1.0 - q) * s) * std::exp(-q * s - kQuarterPi * (1.0 - q) * s * s);
}

double berry_robnik_cdf(double s, double q) {
    check_s(s);
    check_q(q);
    return -std::expm1(-q * s - kQuarterPi * (1.0 - q) * s * s);
}

double log_likelihood(const SpacingSample& sample, double q) {
    check_q(q);
    double sum = 0.0;
    for (double s : sample.values()) {
        const double bracket = q + kHalfPi * (1.0 - q) * s;
        if (bracket < 0.0) throw NumericError("negative density bracket for q in [0, 1]");
        if (bracket == 0.0) return -kInf;
        sum += std::log(bracket) - q * s - kQuarterPi * (1.0 - q) * s * s;
    }
    return sum;
}

double score(const SpacingSample& sample, double q) {
    check_q(q);
    double sum = 0.0;
    for (double s : sample.values()) {
        const double bracket = q + kHalfPi * (1.0 - q) * s;
        const double num = 1.0 - kHalfPi * s;
        if (bracket == 0.0) return kInf;  // s = 0 at q = 0: increasing q gains an infinite amount
        sum += num / bracket - (s - kQuarterPi * s * s);
    }
    return sum;
}

double score_derivative(const SpacingSample& sample, double q) {
    check_q(q);
    double sum = 0.0;
    for (double s : sample.values()) {
        const double bracket = q + kHalfPi * (1.0 - q) * s;
        const double num = 1.0 - kHalfPi * s;
        if (bracket == 0.0) return -kInf;
        sum -= (num * num) / (bracket * bracket);
    }
    return sum;
}

Histogram spacing_histogram(const SpacingSample& sample, int bins) {
    if (sample.size() == 0) throw ArgumentError("histogram of an empty sample");
    if (bins == 0)
        bins = std::clamp(static_cast<int>(std::ceil(std::sqrt(static_cast<double>(sample.size())))), 5, 40);
    if (bins < 5) throw ArgumentError(fmt::format("at least 5 bins required (got {})", bins));
    const double top = *std::max_element(sample.values().begin(), sample.values().end());
    if (!(top > 0.0)) throw ArgumentError("all spacings are zero; histogram is empty");

    Histogram h;
    h.width = top / bins;
    h.centers.resize(static_cast<std::size_t>(bins));
    h.densities.assign(static_cast<std::size_t>(bins), 0.0);
    for (int b = 0; b < bins; ++b) h.centers[static_cast<std::size_t>(b)] = (b + 0.5) * h.width;
    for (double s : sample.values()) {
        auto b = static_cast<std::size_t>(s / h.width);
        if (b >= h.densities.size()) b = h.densities.size() - 1;
        h.densities[b] += 1.0;
    }
    const double norm = static_cast<double>(sample.size()) * h.width;
    for (double& d : h.densities) d /= norm;
    return h;
}

double ls_fit_q(std::span<const double> bin_centers, std::span<const double> densities) {
    if (bin_centers.empty() || bin_centers.size() != densities.size())
        throw ArgumentError("histogram centers and densities must be non-empty and equal length");

    constexpr int kSteps = 1000;
    int best = 0;
    double best_val = kInf;
    for (int i = 0; i <= kSteps; ++i) {
        const double v = ls_objective(bin_centers, densities, i / static_cast<double>(kSteps));
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }

    // Golden-section search on the neighbouring grid cells.
    double a = std::max(0.0, (best - 1) / static_cast<double>(kSteps));
    double b = std::min(1.0, (best + 1) / static_cast<double>(kSteps));
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = ls_objective(bin_centers, densities, c);
    double fd = ls_objective(bin_centers, densities, d);
    while (b - a > 1e-9) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = ls_objective(bin_centers, densities, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = ls_objective(bin_centers, densities, d);
        }
    }
    const double refined = 0.5 * (a + b);
    return ls_objective(bin_centers, densities, refined) <= best_val ? refined
                                                                     : best / static_cast<double>(kSteps);
}

double ls_fit_q(const SpacingSample& sample, int bins) {
    const Histogram h = spacing_histogram(sample, bins);
    return ls_fit_q(h.centers, h.densities);
}

FitResult mle_q(const SpacingSample& sample, std::optional<double> q0, const NewtonOptions& options) {
    if (sample.size() < kMinFitSamples)
        throw SampleSizeError(fmt::format("{} spacings is below the minimum of {} for fitting",
                                          sample.size(), kMinFitSamples));
    FitResult r;
    r.n = sample.size();
    r.initializer = q0 ? *q0 : ls_fit_q(sample);
    check_q(r.initializer);

    const auto finish = [&](double q) {
        r.q_hat = q;
        r.log_likelihood = log_likelihood(sample, q);
        const double info = -score_derivative(sample, q);
        r.std_err = info > 0.0 ? 1.0 / std::sqrt(info) : kInf;
        return r;
    };

    // The log likelihood is concave in q, so the sign of the score at the
    // ends decides whether the maximum sits on a boundary.
    const double f_low = score(sample, 0.0);
    if (f_low <= 0.0) {
        r.clamped = true;
        r.converged = true;
        r.unclamped_root = root_outside(sample, 0.0);
        return finish(0.0);
    }
    const double f_high = score(sample, 1.0);
    if (f_high >= 0.0) {
        r.clamped = true;
        r.converged = true;
        r.unclamped_root = root_outside(sample, 1.0);
        return finish(1.0);
    }

    double lo = 0.0;  // score > 0
    double hi = 1.0;  // score < 0
    double q = std::clamp(r.initializer, 0.0, 1.0);
    if (q == 0.0 || q == 1.0) q = 0.5;
    for (int it = 1; it <= options.max_iterations; ++it) {
        r.iterations = it;
        const double f = score(sample, q);
        if (std::abs(f) < options.score_tolerance) {
            r.converged = true;
            break;
        }
        if (f > 0.0)
            lo = q;
        else
            hi = q;
        const double fp = score_derivative(sample, q);
        double next = (fp < 0.0 && std::isfinite(fp)) ? q - f / fp : lo - 1.0;
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
            r.used_fallback = true;
        }
        const double step = next - q;
        q = next;
        if (std::abs(step) < options.step_tolerance) {
            r.converged = true;
            break;
        }
    }
    if (!r.converged)
        throw FitError(fmt::format("Newton-Raphson did not converge in {} iterations (q = {}, bracket "
                                   "[{}, {}], score {})",
                                   options.max_iterations, q, lo, hi, score(sample, q)));
    return finish(q);
}

}  // namespace dickestat::stats

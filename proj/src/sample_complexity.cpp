#include "coac/sample_complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "coac/error.hpp"
#include "coac/parallel.hpp"

namespace coac {

namespace {

constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

double sigma_for_fixed_order(const Dataset& dataset, const NestedFit& nested, std::size_t m,
                             const CurveSettings& settings)
{
    if (settings.sigma_policy == SigmaPolicy::oracle) {
        if (!dataset.noise_var()) {
            throw Error(ErrorCode::invalid_argument, "oracle sigma policy needs a known noise variance");
        }
        return *dataset.noise_var();
    }
    return validate_noise_variance(nested.r_ms(m), m, nested.n(), settings.params.alpha).midpoint();
}

double oracle_d2nmse(const Dataset& dataset, const FitResult& fitted)
{
    if (!dataset.y_bar() || !dataset.noise_var()) {
        throw Error(ErrorCode::invalid_argument, "oracle d2NMSE needs y_bar and noise_var");
    }
    return oracle_nmse(fitted, *dataset.y_bar()) / (2.0 * *dataset.noise_var());
}

double evaluate(const Dataset& dataset, const CurveSettings& settings)
{
    const std::size_t n = dataset.size();
    if (settings.policy.kind == OrderPolicy::Kind::fixed_order) {
        const std::size_t m = settings.policy.order;
        if (m >= n) {
            return kUndefined;
        }
        const NestedFit nested(dataset, m, settings.kernel);
        if (!nested.full_rank(m)) {
            return kUndefined;
        }
        if (settings.quantity == RiskQuantity::oracle_d2nmse) {
            return oracle_d2nmse(dataset, nested.fit(m));
        }
        if (settings.quantity == RiskQuantity::known_order_bound) {
            return rn_bounds_via_mse_known_order(nested.r_ms(m), m, n, settings.params).r_2n_high;
        }
        const double sigma_sq = sigma_for_fixed_order(dataset, nested, m, settings);
        return d2nmse_upper(nested.r_ms(m), m, n, sigma_sq, settings.params, settings.convention);
    }
    if (settings.quantity == RiskQuantity::known_order_bound) {
        throw Error(ErrorCode::invalid_argument, "the known-order bound needs a fixed order");
    }
    const std::size_t cap = std::min(settings.policy.order, n - 1);
    const NestedFit nested(dataset, cap, settings.kernel);
    const SelectionReport report = select_order(nested, dataset, settings.params, settings.sigma_policy,
                                                settings.convention);
    if (settings.quantity == RiskQuantity::oracle_d2nmse) {
        return oracle_d2nmse(dataset, nested.fit(report.m_star_hat));
    }
    return report.epsilon_min;
}

double evaluate_or_undefined(const Dataset& dataset, const CurveSettings& settings)
{
    try {
        return evaluate(dataset, settings);
    } catch (const Error& e) {
        switch (e.code()) {
        case ErrorCode::rank_deficient:
        case ErrorCode::insufficient_samples:
        case ErrorCode::kappa_domain:
        case ErrorCode::bad_shape:
            return kUndefined;
        default:
            throw;
        }
    }
}

} // namespace

CurveSummary trial_curve_summary(const DatasetStream& stream, std::span<const std::size_t> n_grid,
                                 const CurveSettings& settings, int threads)
{
    if (!stream.draw || stream.trials == 0) {
        throw Error(ErrorCode::invalid_argument, "dataset stream needs a generator and at least one trial");
    }
    if (n_grid.empty()) {
        throw Error(ErrorCode::invalid_argument, "n grid is empty");
    }
    validate(settings.params);

    const std::size_t width = n_grid.size();
    std::vector<double> values(stream.trials * width, kUndefined);
    for_each_index(stream.trials, threads, [&](std::size_t trial) {
        for (std::size_t j = 0; j < width; ++j) {
            values[trial * width + j] = evaluate_or_undefined(stream.draw(n_grid[j], trial), settings);
        }
    });

    CurveSummary summary;
    summary.mean.assign(width, kUndefined);
    summary.valid_trials.assign(width, 0);
    for (std::size_t j = 0; j < width; ++j) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t t = 0; t < stream.trials; ++t) {
            const double v = values[t * width + j];
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        }
        summary.valid_trials[j] = count;
        if (count > 0) {
            summary.mean[j] = sum / static_cast<double>(count);
        }
    }
    return summary;
}

std::vector<double> trial_mean_curve(const DatasetStream& stream, std::span<const std::size_t> n_grid,
                                     const CurveSettings& settings, int threads)
{
    return trial_curve_summary(stream, n_grid, settings, threads).mean;
}

std::optional<Crossing> first_crossing(std::span<const std::size_t> n_grid, std::span<const double> curve,
                                       double epsilon)
{
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::nonpositive_epsilon, "epsilon must be positive");
    }
    if (n_grid.size() != curve.size()) {
        throw Error(ErrorCode::length_mismatch, "grid and curve lengths differ");
    }
    for (std::size_t j = 0; j < curve.size(); ++j) {
        if (std::isnan(curve[j]) || !(curve[j] < epsilon)) {
            continue;
        }
        double interpolated = static_cast<double>(n_grid[j]);
        if (j > 0 && !std::isnan(curve[j - 1]) && curve[j - 1] > curve[j]) {
            const double frac = (curve[j - 1] - epsilon) / (curve[j - 1] - curve[j]);
            interpolated = static_cast<double>(n_grid[j - 1]) +
                           frac * (static_cast<double>(n_grid[j]) - static_cast<double>(n_grid[j - 1]));
        }
        return Crossing{n_grid[j], interpolated};
    }
    return std::nullopt;
}

SampleComplexityResult sample_complexity_empirical(const DatasetStream& stream, std::span<const std::size_t> n_grid,
                                                   const CurveSettings& settings, double epsilon, int threads)
{
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::nonpositive_epsilon, "epsilon must be positive");
    }
    std::vector<double> curve = trial_mean_curve(stream, n_grid, settings, threads);
    const auto crossing = first_crossing(n_grid, curve, epsilon);
    if (!crossing) {
        throw Error(ErrorCode::not_reached, "trial-averaged quantity never falls below epsilon = " +
                                                std::to_string(epsilon) + " on the n grid");
    }
    return {*crossing, std::move(curve)};
}

} // namespace coac

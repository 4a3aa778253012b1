#include "coac/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coac/error.hpp"

namespace coac {

namespace {

double chebyshev_probability(double multiplier)
{
    if (multiplier <= 0.0) {
        return 0.0;
    }
    return std::max(0.0, 1.0 - 1.0 / (multiplier * multiplier));
}

void require_positive_variance(double sigma_sq)
{
    if (!(sigma_sq > 0.0) || !std::isfinite(sigma_sq)) {
        throw Error(ErrorCode::nonpositive_variance, "noise variance must be positive and finite");
    }
}

void require_r_ms(double r_ms)
{
    if (!(r_ms >= 0.0) || !std::isfinite(r_ms)) {
        throw Error(ErrorCode::invalid_argument, "r_ms must be finite and non-negative");
    }
}

void require_order_below(std::size_t m, std::size_t n)
{
    if (m >= n) {
        throw Error(ErrorCode::bad_shape, "order " + std::to_string(m) + " must be below n = " + std::to_string(n));
    }
}

void require_samples_for_alpha(std::size_t m, std::size_t n, double alpha)
{
    const double dof = static_cast<double>(n) - static_cast<double>(m);
    const double need = 2.0 * alpha * alpha;
    if (n <= m || !(dof > need)) {
        const auto min_n = static_cast<std::size_t>(std::floor(static_cast<double>(m) + need)) + 1;
        throw Error(ErrorCode::insufficient_samples,
                    "need n - m > 2*alpha^2 (n = " + std::to_string(n) + ", m = " + std::to_string(m) +
                        ", alpha = " + std::to_string(alpha) + "); minimal n is " + std::to_string(min_n));
    }
}

} // namespace

double ConfidenceParams::p_alpha() const noexcept { return chebyshev_probability(alpha); }
double ConfidenceParams::p_beta() const noexcept { return chebyshev_probability(beta); }

void validate(const ConfidenceParams& params)
{
    if (!(params.alpha >= 0.0) || !std::isfinite(params.alpha) || !(params.beta >= 0.0) ||
        !std::isfinite(params.beta)) {
        throw Error(ErrorCode::invalid_argument, "alpha and beta must be finite and non-negative");
    }
}

std::string_view to_string(BoundMode mode)
{
    return mode == BoundMode::known_order ? "known_order" : "general";
}

std::string_view to_string(Convention convention)
{
    return convention == Convention::canonical_half ? "canonical" : "eq85";
}

Convention convention_from_string(std::string_view name)
{
    if (name == "canonical" || name == "canonical_half") {
        return Convention::canonical_half;
    }
    if (name == "eq85" || name == "paper_eq85") {
        return Convention::paper_eq85;
    }
    throw Error(ErrorCode::invalid_argument, "unknown convention '" + std::string(name) + "'");
}

Moments chisq_moments_rn(std::size_t m, std::size_t n, double sigma_sq)
{
    if (m < 1 || m > n) {
        throw Error(ErrorCode::bad_shape, "need 1 <= m <= n");
    }
    require_positive_variance(sigma_sq);
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    return {md / nd * sigma_sq, 2.0 * md / (nd * nd) * sigma_sq * sigma_sq};
}

Moments chisq_moments_rms(std::size_t m, std::size_t n, double sigma_sq, double unmodeled_energy)
{
    require_order_below(m, n);
    require_positive_variance(sigma_sq);
    if (!(unmodeled_energy >= 0.0) || !std::isfinite(unmodeled_energy)) {
        throw Error(ErrorCode::invalid_argument, "unmodeled energy must be finite and non-negative");
    }
    const double nd = static_cast<double>(n);
    const double kept = 1.0 - static_cast<double>(m) / nd;
    return {kept * sigma_sq + unmodeled_energy,
            2.0 / nd * kept * sigma_sq * sigma_sq + 4.0 * sigma_sq / (nd * nd) * (nd * unmodeled_energy)};
}

RiskBounds rn_bounds_known_order(std::size_t m, std::size_t n, double sigma_sq, double beta)
{
    if (m < 1 || m > n) {
        throw Error(ErrorCode::bad_shape, "need 1 <= m <= n");
    }
    require_positive_variance(sigma_sq);
    const ConfidenceParams params{0.0, beta};
    validate(params);
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double spread = beta * std::sqrt(2.0 * md);
    const double low = std::max(0.0, (md - spread) * sigma_sq / nd);
    const double high = (md + spread) * sigma_sq / nd;
    return {m, n, low, high, low / (2.0 * sigma_sq), high / (2.0 * sigma_sq), params, sigma_sq, BoundMode::known_order};
}

std::size_t sample_complexity_known_order(std::size_t m, double epsilon, double beta)
{
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw Error(ErrorCode::nonpositive_epsilon, "epsilon must be positive");
    }
    if (m < 1) {
        throw Error(ErrorCode::bad_shape, "order must be at least 1");
    }
    validate(ConfidenceParams{0.0, beta});
    const double md = static_cast<double>(m);
    const double threshold = (md + beta * std::sqrt(2.0 * md)) / (2.0 * epsilon);
    // Decimal epsilons (0.05, 0.1) are inexact in binary; shave rounding noise
    // before taking the ceiling so that 5 / (2·0.05) gives 50, not 51.
    const double n = std::ceil(threshold * (1.0 - 1e-12));
    return std::max<std::size_t>(1, static_cast<std::size_t>(n));
}

NoiseVarianceRange validate_noise_variance(double r_ms, std::size_t m, std::size_t n, double alpha)
{
    if (!(r_ms > 0.0) || !std::isfinite(r_ms)) {
        throw Error(ErrorCode::invalid_argument, "r_ms must be positive to validate a noise variance");
    }
    validate(ConfidenceParams{alpha, 0.0});
    require_samples_for_alpha(m, n, alpha);
    const double dof = static_cast<double>(n) - static_cast<double>(m);
    const double spread = alpha * std::sqrt(2.0 * dof);
    const double scaled = static_cast<double>(n) * r_ms;
    return {scaled / (dof + spread), scaled / (dof - spread), ConfidenceParams{alpha, 0.0}.p_alpha(), r_ms, m, n};
}

RiskBounds rn_bounds_via_mse_known_order(double r_ms, std::size_t m, std::size_t n, const ConfidenceParams& params)
{
    validate(params);
    const NoiseVarianceRange range = validate_noise_variance(r_ms, m, n, params.alpha);
    const double md = static_cast<double>(m);
    const double dof = static_cast<double>(n) - md;
    const double validation = params.alpha * std::sqrt(2.0 * dof);
    const double confidence = params.beta * std::sqrt(2.0 * md);
    const double low = std::max(0.0, (md - confidence) * r_ms / (dof - validation));
    const double high = (md + confidence) * r_ms / (dof + validation);
    const double sigma_sq = range.high;
    return {m, n, low, high, low / (2.0 * sigma_sq), high / (2.0 * sigma_sq), params, sigma_sq, BoundMode::known_order};
}

RiskBounds general_rn_bounds(double r_ms, std::size_t m, std::size_t n, double sigma_sq,
                             const ConfidenceParams& params)
{
    validate(params);
    require_r_ms(r_ms);
    require_positive_variance(sigma_sq);
    if (m < 1) {
        throw Error(ErrorCode::bad_shape, "order must be at least 1");
    }
    require_order_below(m, n);
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double alpha = params.alpha;
    const double eta = (1.0 - md / nd) * sigma_sq;
    const double radicand = alpha * alpha * sigma_sq / nd + r_ms - eta / 2.0;
    if (radicand < 0.0) {
        throw Error(ErrorCode::kappa_domain, "r_ms = " + std::to_string(r_ms) +
                                                 " is too small for sigma^2 = " + std::to_string(sigma_sq) +
                                                 " at m = " + std::to_string(m) + ", n = " + std::to_string(n));
    }
    const double kappa = 2.0 * alpha * std::sqrt(sigma_sq) / nd * std::sqrt(radicand);
    const double centre = r_ms + 2.0 * alpha * alpha * sigma_sq / nd - eta + md / nd * sigma_sq;
    const double confidence = params.beta * std::sqrt(2.0 * md) * sigma_sq / nd;
    const double high = centre + kappa + confidence;
    const double low = std::max(0.0, centre - kappa - confidence);
    return {m, n, low, high, low / (2.0 * sigma_sq), high / (2.0 * sigma_sq), params, sigma_sq, BoundMode::general};
}

double d2nmse_upper(double r_ms, std::size_t m, std::size_t n, double sigma_sq, const ConfidenceParams& params,
                    Convention convention)
{
    if (convention == Convention::canonical_half) {
        return general_rn_bounds(r_ms, m, n, sigma_sq, params).r_2n_high;
    }
    // Closed form in normalised MSE, evaluated as written rather than as 2× the canonical value.
    validate(params);
    require_r_ms(r_ms);
    require_positive_variance(sigma_sq);
    if (m < 1) {
        throw Error(ErrorCode::bad_shape, "order must be at least 1");
    }
    require_order_below(m, n);
    const double md = static_cast<double>(m);
    const double nd = static_cast<double>(n);
    const double alpha = params.alpha;
    const double nr_ms = r_ms / sigma_sq;
    const double radicand = alpha * alpha / nd + nr_ms - 0.5 * (1.0 - md / nd);
    if (radicand < 0.0) {
        throw Error(ErrorCode::kappa_domain, "normalised r_ms too small for the validation term");
    }
    return nr_ms + 2.0 * alpha / nd * std::sqrt(radicand) +
           (2.0 * alpha * alpha + 2.0 * md + params.beta * std::sqrt(2.0 * md) - nd) / nd;
}

bool is_learnable(double r_2n_high, double epsilon)
{
    if (!(epsilon > 0.0)) {
        throw Error(ErrorCode::nonpositive_epsilon, "epsilon must be positive");
    }
    return r_2n_high <= epsilon;
}

} // namespace coac

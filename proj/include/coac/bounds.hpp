#pragma once

// Chebyshev-validated bounds on the noise-free risk of a least-squares fit.
//
// Notation used throughout:
//   r_ms   empirical MSE of the order-m fit against the noisy targets
//   r_n    noise-free risk (1/n)‖ŷ − ȳ‖², not observable outside simulation
//   r_2n   r_n / (2σ²), the per-sample KL divergence between N(ȳ, σ²I) and N(ŷ, σ²I)
//
// alpha is the validation multiplier (P_α = 1 − 1/α²) applied to r_ms,
// beta the confidence multiplier (P_β = 1 − 1/β²) applied to r_n.

#include <cstddef>
#include <string_view>

namespace coac {

struct ConfidenceParams {
    double alpha = 2.0;
    double beta = 2.0;

    /// Chebyshev probabilities, clamped at zero for multipliers below 1.
    double p_alpha() const noexcept;
    double p_beta() const noexcept;

    bool operator==(const ConfidenceParams&) const = default;
};

/// Throws InvalidArgument unless alpha and beta are finite and ≥ 0.
void validate(const ConfidenceParams& params);

struct Moments {
    double mean;
    double variance;
};

struct NoiseVarianceRange {
    double low;
    double high;
    double p_alpha;
    double source_r_ms;
    std::size_t m;
    std::size_t n;

    double midpoint() const noexcept { return 0.5 * (low + high); }
};

enum class BoundMode { known_order, general };

/// r_2n bounds are r_n bounds divided by 2·sigma_sq_used.
struct RiskBounds {
    std::size_t m;
    std::size_t n;
    double r_n_low;
    double r_n_high;
    double r_2n_low;
    double r_2n_high;
    ConfidenceParams params;
    double sigma_sq_used;
    BoundMode mode;
};

/// Which normalisation the d2NMSE upper bound is reported in.
/// canonical_half divides r̄_n by 2σ²; paper_eq85 is the closed form
/// expressed through r_ms/σ², which works out to exactly twice that.
enum class Convention { canonical_half, paper_eq85 };

std::string_view to_string(BoundMode mode);
std::string_view to_string(Convention convention);
Convention convention_from_string(std::string_view name);

/// Mean and variance of r_n when the true model lies inside the class:
/// (m/n)σ² and (2m/n²)σ⁴.
Moments chisq_moments_rn(std::size_t m, std::size_t n, double sigma_sq);

/// Mean and variance of r_ms with unmodeled energy u = (1/n)‖G_m B_m Δ_m‖²:
/// (1 − m/n)σ² + u and (2/n)(1 − m/n)σ⁴ + (4σ²/n²)·n·u. m = 0 is accepted.
Moments chisq_moments_rms(std::size_t m, std::size_t n, double sigma_sq, double unmodeled_energy);

/// [(m ∓ β√(2m))σ²/n], lower end clamped at 0.
RiskBounds rn_bounds_known_order(std::size_t m, std::size_t n, double sigma_sq, double beta);

/// Smallest integer n with n ≥ (m + β√(2m)) / (2ε).
std::size_t sample_complexity_known_order(std::size_t m, double epsilon, double beta);

/// σ² interval validated by r_ms at multiplier alpha:
/// n·r_ms / (n − m ± α√(2n − 2m)). Requires n − m > 2α².
NoiseVarianceRange validate_noise_variance(double r_ms, std::size_t m, std::size_t n, double alpha);

/// Known-order bounds on r_n with σ² replaced by its validated range.
/// r_2n is normalised by the high end of that range.
RiskBounds rn_bounds_via_mse_known_order(double r_ms, std::size_t m, std::size_t n, const ConfidenceParams& params);

/// Bounds on r_n that absorb unmodeled dynamics through r_ms:
///   η = (1 − m/n)σ²
///   κ = (2ασ/n)·√(α²σ²/n + r_ms − η/2)
///   r̄_n = r_ms + κ + 2α²σ²/n − η + (m/n)σ² + β√(2m)σ²/n
///   r̲_n = r_ms − κ + 2α²σ²/n − η + (m/n)σ² − β√(2m)σ²/n, clamped at 0
/// Throws KappaDomain if the κ radicand is negative.
RiskBounds general_rn_bounds(double r_ms, std::size_t m, std::size_t n, double sigma_sq,
                             const ConfidenceParams& params);

double d2nmse_upper(double r_ms, std::size_t m, std::size_t n, double sigma_sq, const ConfidenceParams& params,
                    Convention convention);

/// Closed inequality: learnable iff r_2n_high ≤ epsilon.
bool is_learnable(double r_2n_high, double epsilon);

} // namespace coac

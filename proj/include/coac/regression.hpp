#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "coac/linalg.hpp"

namespace coac {

enum class KernelFamily {
    polynomial_no_intercept,    // row i = [x, x², …, x^m]
    polynomial_with_intercept,  // row i = [1, x, …, x^{m-1}]
    custom_column_functions,
};

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

/// Nested hypothesis classes: order m uses the first m kernel columns.
struct KernelSpec {
    KernelFamily family = KernelFamily::polynomial_no_intercept;
    std::size_t max_order = 10;
    /// Only read for custom_column_functions; max_order must equal its size.
    std::vector<std::function<double(double)>> columns;

    static KernelSpec polynomial(std::size_t max_order) { return {KernelFamily::polynomial_no_intercept, max_order, {}}; }
    static KernelSpec polynomial_intercept(std::size_t max_order)
    {
        return {KernelFamily::polynomial_with_intercept, max_order, {}};
    }
    static KernelSpec custom(std::vector<std::function<double(double)>> columns);
};

/// Training data. y_bar and noise_var are simulation ground truth and are
/// only consulted by oracle computations or when the caller asks for the
/// oracle noise variance explicitly.
class Dataset {
public:
    Dataset(Vector x, Vector y, std::optional<Vector> y_bar = std::nullopt,
            std::optional<double> noise_var = std::nullopt);

    std::size_t size() const noexcept { return x_.size(); }
    const Vector& x() const noexcept { return x_; }
    const Vector& y() const noexcept { return y_; }
    const std::optional<Vector>& y_bar() const noexcept { return y_bar_; }
    const std::optional<double>& noise_var() const noexcept { return noise_var_; }

    /// Same samples with noise_var replaced (or cleared).
    Dataset with_noise_var(std::optional<double> noise_var) const;
    /// Rows selected by index, ground truth carried along.
    Dataset subset(std::span<const std::size_t> rows) const;

    bool operator==(const Dataset&) const = default;

private:
    Vector x_;
    Vector y_;
    std::optional<Vector> y_bar_;
    std::optional<double> noise_var_;
};

struct FitResult {
    std::size_t order = 0;
    Vector theta_hat;
    Vector y_hat;
    double r_ms = 0.0;
    std::size_t n = 0;
};

/// Throws OrderExceedsKernel if m > max_order and OrderExceedsData if m > x.len.
Matrix build_design_matrix(std::span<const double> x, std::size_t m, const KernelSpec& kernel);

/// Least-squares fit of order m; throws RankDeficient when A_m is not full column rank.
FitResult fit(const Dataset& dataset, std::size_t m, const KernelSpec& kernel);

/// Predictions of a fitted order-m model at new inputs.
Vector predict(std::span<const double> theta, std::span<const double> x, const KernelSpec& kernel);

/// (1/n)‖ŷ − y‖².
double empirical_mse(const FitResult& fit, std::span<const double> y);

/// Noise-free risk r^N = (1/n)‖ŷ − ȳ‖², available only in simulation.
double oracle_nmse(const FitResult& fit, std::span<const double> y_bar);

/// KL divergence between N(mu1, σ²I) and N(mu2, σ²I), normalised per sample:
/// ‖mu1 − mu2‖² / (2nσ²).
double kl_gaussian_equal_var(std::span<const double> mu1, std::span<const double> mu2, double noise_var,
                             std::size_t n);

/// One Householder factorization of A_M shared by every order m ≤ M.
///
/// z = Qᵀy is formed once; r^MS_m is then the tail energy Σ_{k≥m} z_k² / n,
/// so the whole scan over m costs O(n·M²) for the factorization plus O(n·M)
/// for the residuals.
class NestedFit {
public:
    NestedFit(const Dataset& dataset, std::size_t max_order, const KernelSpec& kernel);

    std::size_t max_order() const noexcept { return max_order_; }
    std::size_t n() const noexcept { return n_; }
    bool full_rank(std::size_t m) const noexcept { return m >= 1 && m <= qr_.leading_rank(); }

    double r_ms(std::size_t m) const;
    FitResult fit(std::size_t m) const;

private:
    std::size_t n_;
    std::size_t max_order_;
    Vector y_;
    HouseholderQr qr_;
    Vector qty_;
    Vector tail_energy_;  // tail_energy_[m] = Σ_{k≥m} z_k²
};

} // namespace coac

#include "coac/regression.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coac/error.hpp"

namespace coac {

std::string_view to_string(KernelFamily family)
{
    switch (family) {
    case KernelFamily::polynomial_no_intercept: return "poly";
    case KernelFamily::polynomial_with_intercept: return "poly-intercept";
    case KernelFamily::custom_column_functions: return "custom";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name)
{
    if (name == "poly" || name == "polynomial_no_intercept") {
        return KernelFamily::polynomial_no_intercept;
    }
    if (name == "poly-intercept" || name == "polynomial_with_intercept") {
        return KernelFamily::polynomial_with_intercept;
    }
    throw Error(ErrorCode::invalid_argument, "unknown kernel '" + std::string(name) + "'");
}

KernelSpec KernelSpec::custom(std::vector<std::function<double(double)>> columns)
{
    if (columns.empty()) {
        throw Error(ErrorCode::invalid_argument, "custom kernel needs at least one column");
    }
    const std::size_t order = columns.size();
    return {KernelFamily::custom_column_functions, order, std::move(columns)};
}

Dataset::Dataset(Vector x, Vector y, std::optional<Vector> y_bar, std::optional<double> noise_var)
    : x_(std::move(x)), y_(std::move(y)), y_bar_(std::move(y_bar)), noise_var_(noise_var)
{
    if (x_.size() != y_.size()) {
        throw Error(ErrorCode::length_mismatch,
                    "x has " + std::to_string(x_.size()) + " samples, y has " + std::to_string(y_.size()));
    }
    if (x_.size() < 2) {
        throw Error(ErrorCode::bad_shape, "a dataset needs at least 2 samples");
    }
    require_finite(x_, "x");
    require_finite(y_, "y");
    if (y_bar_) {
        if (y_bar_->size() != x_.size()) {
            throw Error(ErrorCode::length_mismatch, "y_bar length differs from x");
        }
        require_finite(*y_bar_, "y_bar");
    }
    if (noise_var_ && !(*noise_var_ > 0.0 && std::isfinite(*noise_var_))) {
        throw Error(ErrorCode::nonpositive_variance, "noise variance must be positive and finite");
    }
}

Dataset Dataset::with_noise_var(std::optional<double> noise_var) const
{
    return Dataset(x_, y_, y_bar_, noise_var);
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const
{
    Vector x;
    Vector y;
    std::optional<Vector> y_bar;
    x.reserve(rows.size());
    y.reserve(rows.size());
    if (y_bar_) {
        y_bar.emplace();
        y_bar->reserve(rows.size());
    }
    for (std::size_t r : rows) {
        if (r >= x_.size()) {
            throw Error(ErrorCode::bad_shape, "subset row out of range");
        }
        x.push_back(x_[r]);
        y.push_back(y_[r]);
        if (y_bar) {
            y_bar->push_back((*y_bar_)[r]);
        }
    }
    return Dataset(std::move(x), std::move(y), std::move(y_bar), noise_var_);
}

Matrix build_design_matrix(std::span<const double> x, std::size_t m, const KernelSpec& kernel)
{
    if (m < 1) {
        throw Error(ErrorCode::bad_shape, "order must be at least 1");
    }
    if (m > kernel.max_order) {
        throw Error(ErrorCode::order_exceeds_kernel,
                    "order " + std::to_string(m) + " > kernel max order " + std::to_string(kernel.max_order));
    }
    if (m > x.size()) {
        throw Error(ErrorCode::order_exceeds_data,
                    "order " + std::to_string(m) + " > sample count " + std::to_string(x.size()));
    }
    require_finite(x, "x");
    Matrix a(x.size(), m);
    for (std::size_t i = 0; i < x.size(); ++i) {
        switch (kernel.family) {
        case KernelFamily::polynomial_no_intercept: {
            double p = x[i];
            for (std::size_t j = 0; j < m; ++j) {
                a(i, j) = p;
                p *= x[i];
            }
            break;
        }
        case KernelFamily::polynomial_with_intercept: {
            double p = 1.0;
            for (std::size_t j = 0; j < m; ++j) {
                a(i, j) = p;
                p *= x[i];
            }
            break;
        }
        case KernelFamily::custom_column_functions:
            if (kernel.columns.size() < m) {
                throw Error(ErrorCode::order_exceeds_kernel, "custom kernel has too few columns");
            }
            for (std::size_t j = 0; j < m; ++j) {
                a(i, j) = kernel.columns[j](x[i]);
            }
            break;
        }
    }
    require_finite(a.entries(), "design matrix");
    return a;
}

FitResult fit(const Dataset& dataset, std::size_t m, const KernelSpec& kernel)
{
    return NestedFit(dataset, m, kernel).fit(m);
}

Vector predict(std::span<const double> theta, std::span<const double> x, const KernelSpec& kernel)
{
    if (theta.empty()) {
        throw Error(ErrorCode::bad_shape, "empty coefficient vector");
    }
    Vector out(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        double acc = 0.0;
        switch (kernel.family) {
        case KernelFamily::polynomial_no_intercept: {
            double p = x[i];
            for (double t : theta) {
                acc += t * p;
                p *= x[i];
            }
            break;
        }
        case KernelFamily::polynomial_with_intercept: {
            double p = 1.0;
            for (double t : theta) {
                acc += t * p;
                p *= x[i];
            }
            break;
        }
        case KernelFamily::custom_column_functions:
            for (std::size_t j = 0; j < theta.size(); ++j) {
                acc += theta[j] * kernel.columns.at(j)(x[i]);
            }
            break;
        }
        out[i] = acc;
    }
    return out;
}

double empirical_mse(const FitResult& fit, std::span<const double> y)
{
    if (fit.y_hat.size() != y.size()) {
        throw Error(ErrorCode::length_mismatch, "y_hat and y lengths differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = fit.y_hat[i] - y[i];
        acc += d * d;
    }
    return acc / static_cast<double>(y.size());
}

double oracle_nmse(const FitResult& fit, std::span<const double> y_bar)
{
    if (fit.y_hat.size() != y_bar.size()) {
        throw Error(ErrorCode::length_mismatch, "y_hat and y_bar lengths differ");
    }
    return empirical_mse(fit, y_bar);
}

double kl_gaussian_equal_var(std::span<const double> mu1, std::span<const double> mu2, double noise_var,
                             std::size_t n)
{
    if (mu1.size() != n || mu2.size() != n) {
        throw Error(ErrorCode::length_mismatch, "mean vectors must both have length n");
    }
    if (!(noise_var > 0.0)) {
        throw Error(ErrorCode::nonpositive_variance, "noise variance must be positive");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = mu1[i] - mu2[i];
        acc += d * d;
    }
    // Same operation order as oracle_nmse(...) / (2σ²) so typical-set tests agree bit for bit.
    return (acc / static_cast<double>(n)) / (2.0 * noise_var);
}

NestedFit::NestedFit(const Dataset& dataset, std::size_t max_order, const KernelSpec& kernel)
    : n_(dataset.size()),
      max_order_(max_order),
      y_(dataset.y()),
      qr_(build_design_matrix(dataset.x(), max_order, kernel), true),
      qty_(dataset.y()),
      tail_energy_(max_order + 1, 0.0)
{
    qr_.apply_qt(qty_, max_order_);
    double acc = 0.0;
    for (std::size_t k = n_; k-- > 0;) {
        acc += qty_[k] * qty_[k];
        if (k <= max_order_) {
            tail_energy_[k] = acc;
        }
    }
}

double NestedFit::r_ms(std::size_t m) const
{
    if (m < 1 || m > max_order_) {
        throw Error(ErrorCode::bad_shape, "order outside the factored range");
    }
    if (!full_rank(m)) {
        throw Error(ErrorCode::rank_deficient, "order " + std::to_string(m) + " design is rank deficient");
    }
    return tail_energy_[m] / static_cast<double>(n_);
}

FitResult NestedFit::fit(std::size_t m) const
{
    if (m < 1 || m > max_order_) {
        throw Error(ErrorCode::bad_shape, "order outside the factored range");
    }
    FitResult out;
    out.order = m;
    out.n = n_;
    out.theta_hat = qr_.solve_from_qty(qty_, m);
    out.y_hat.assign(n_, 0.0);
    std::copy(qty_.begin(), qty_.begin() + static_cast<std::ptrdiff_t>(m), out.y_hat.begin());
    qr_.apply_q(out.y_hat, m);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double d = out.y_hat[i] - y_[i];
        acc += d * d;
    }
    out.r_ms = acc / static_cast<double>(n_);
    return out;
}

} // namespace coac

#include <functional>
#include <doctest.h>

#include <cmath>

#include "coac/error.hpp"
#include "coac/regression.hpp"
#include "coac/rng.hpp"

using namespace coac;

namespace {

ErrorCode code_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return ErrorCode::invalid_argument;
}

Dataset noisy_cubic(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    Vector x(n), y(n), y_bar(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform(-2.0, 2.0);
        y_bar[i] = 0.5 * x[i] - x[i] * x[i] + 0.25 * x[i] * x[i] * x[i];
        y[i] = y_bar[i] + 0.1 * rng.normal();
    }
    return Dataset(x, y, y_bar, 0.01);
}

} // namespace

TEST_CASE("dataset validation")
{
    CHECK(code_of([] { Dataset({1.0, 2.0}, {1.0}); }) == ErrorCode::length_mismatch);
    CHECK(code_of([] { Dataset({1.0}, {1.0}); }) == ErrorCode::bad_shape);
    CHECK(code_of([] { Dataset({1.0, 2.0}, {1.0, INFINITY}); }) == ErrorCode::invalid_argument);
    CHECK(code_of([] { Dataset({1.0, 2.0}, {1.0, 2.0}, std::nullopt, 0.0); }) == ErrorCode::nonpositive_variance);
    const Dataset ds({1.0, 2.0, 3.0}, {2.0, 4.0, 6.0}, Vector{2.0, 4.0, 6.0}, 0.5);
    const std::vector<std::size_t> rows{2, 0};
    const Dataset sub = ds.subset(rows);
    CHECK(sub.x() == Vector{3.0, 1.0});
    CHECK(*sub.y_bar() == Vector{6.0, 2.0});
    CHECK(!ds.with_noise_var(std::nullopt).noise_var());
}

TEST_CASE("design matrix columns")
{
    const Vector x{2.0, 3.0, 5.0};
    const Matrix plain = build_design_matrix(x, 3, KernelSpec::polynomial(3));
    CHECK(plain(0, 0) == 2.0);
    CHECK(plain(0, 2) == 8.0);
    CHECK(plain(1, 1) == 9.0);
    const Matrix intercept = build_design_matrix(x, 2, KernelSpec::polynomial_intercept(3));
    CHECK(intercept(0, 0) == 1.0);
    CHECK(intercept(1, 1) == 3.0);
    const KernelSpec custom = KernelSpec::custom({[](double v) { return std::sin(v); }, [](double) { return 1.0; }});
    CHECK(build_design_matrix(x, 2, custom)(1, 0) == std::sin(3.0));
    CHECK(code_of([&] { build_design_matrix(x, 4, KernelSpec::polynomial(3)); }) == ErrorCode::order_exceeds_kernel);
    CHECK(code_of([&] { build_design_matrix(x, 4, KernelSpec::polynomial(4)); }) == ErrorCode::order_exceeds_data);
}

TEST_CASE("exact line through collinear points")
{
    const Dataset ds({1.0, 2.0, 3.0}, {3.0, 5.0, 7.0});
    const FitResult f = fit(ds, 2, KernelSpec::polynomial_intercept(2));
    CHECK(f.theta_hat[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.theta_hat[1] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.r_ms < 1e-24);
    CHECK(empirical_mse(f, ds.y()) == doctest::Approx(f.r_ms));
}

TEST_CASE("repeated inputs make higher orders rank deficient")
{
    const Dataset ds({1.0, 1.0, 2.0, 2.0}, {1.0, 1.1, 2.0, 2.1});
    CHECK(code_of([&] { fit(ds, 3, KernelSpec::polynomial(3)); }) == ErrorCode::rank_deficient);
    const NestedFit nested(ds, 3, KernelSpec::polynomial(3));
    CHECK(nested.full_rank(2));
    CHECK(!nested.full_rank(3));
}

TEST_CASE("nested scan agrees with independent fits")
{
    const Dataset ds = noisy_cubic(60, 3);
    const KernelSpec kernel = KernelSpec::polynomial(6);
    const NestedFit nested(ds, 6, kernel);
    double previous = INFINITY;
    for (std::size_t m = 1; m <= 6; ++m) {
        const FitResult direct = fit(ds, m, kernel);
        CHECK(nested.r_ms(m) == doctest::Approx(direct.r_ms).epsilon(1e-10));
        CHECK(nested.r_ms(m) <= previous * (1.0 + 1e-12));
        previous = nested.r_ms(m);
        const Vector pred = predict(direct.theta_hat, ds.x(), kernel);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(pred[i] == doctest::Approx(direct.y_hat[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("KL divergence is the normalised oracle risk")
{
    const Dataset ds = noisy_cubic(40, 4);
    const FitResult f = fit(ds, 2, KernelSpec::polynomial(2));
    const double kl = kl_gaussian_equal_var(f.y_hat, *ds.y_bar(), 0.01, ds.size());
    CHECK(kl == oracle_nmse(f, *ds.y_bar()) / (2.0 * 0.01));
    CHECK(kl_gaussian_equal_var(ds.y(), ds.y(), 1.0, ds.size()) == 0.0);
}

#include "coac/cv.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "coac/error.hpp"
#include "coac/rng.hpp"

namespace coac {

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed)
{
    if (k < 2 || k > n) {
        throw Error(ErrorCode::bad_shape, "need 2 <= k <= n (k = " + std::to_string(k) + ", n = " +
                                              std::to_string(n) + ")");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        std::swap(order[i - 1], order[j]);
    }
    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                        order.begin() + static_cast<std::ptrdiff_t>(cursor + size));
        cursor += size;
    }
    return folds;
}

CvReport kfold_select_order(const Dataset& dataset, std::size_t max_order, std::size_t k, const KernelSpec& kernel,
                            std::uint64_t seed)
{
    const auto start = std::chrono::steady_clock::now();
    const std::size_t n = dataset.size();
    if (max_order < 1) {
        throw Error(ErrorCode::bad_shape, "max order must be at least 1");
    }
    const auto folds = make_folds(n, k, seed);
    const std::size_t smallest_train = n - folds.front().size();
    if (smallest_train < max_order) {
        throw Error(ErrorCode::fold_too_small, "training folds have " + std::to_string(smallest_train) +
                                                   " rows, fewer than M = " + std::to_string(max_order));
    }

    // Training row lists are the complement of each held-out fold.
    std::vector<char> held(n);
    std::vector<Dataset> train_sets;
    train_sets.reserve(k);
    for (const auto& fold : folds) {
        std::fill(held.begin(), held.end(), 0);
        for (std::size_t i : fold) {
            held[i] = 1;
        }
        std::vector<std::size_t> rows;
        rows.reserve(n - fold.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!held[i]) {
                rows.push_back(i);
            }
        }
        train_sets.push_back(dataset.subset(rows));
    }

    CvReport report;
    report.k = k;
    report.n = n;
    report.seed = seed;
    report.m_grid.resize(max_order);
    std::iota(report.m_grid.begin(), report.m_grid.end(), std::size_t{1});
    report.cv_error_curve.assign(max_order, 0.0);

    Vector held_x;
    for (std::size_t m = 1; m <= max_order; ++m) {
        double total = 0.0;
        for (std::size_t f = 0; f < k; ++f) {
            FitResult trained;
            try {
                trained = fit(train_sets[f], m, kernel);
            } catch (const Error& e) {
                if (e.code() != ErrorCode::rank_deficient) {
                    throw;
                }
                total = std::numeric_limits<double>::infinity();
                break;
            }
            held_x.clear();
            for (std::size_t i : folds[f]) {
                held_x.push_back(dataset.x()[i]);
            }
            const Vector predicted = predict(trained.theta_hat, held_x, kernel);
            double sq = 0.0;
            for (std::size_t j = 0; j < folds[f].size(); ++j) {
                const double d = predicted[j] - dataset.y()[folds[f][j]];
                sq += d * d;
            }
            total += sq / static_cast<double>(folds[f].size());
        }
        report.cv_error_curve[m - 1] = total / static_cast<double>(k);
    }

    // Tie tolerance relative to mean y².
    const double tie = 1e-12 * squared_norm(dataset.y()) / static_cast<double>(n);
    std::size_t best = 0;
    for (std::size_t i = 1; i < max_order; ++i) {
        if (report.cv_error_curve[i] < report.cv_error_curve[best] - tie) {
            best = i;
        }
    }
    if (!std::isfinite(report.cv_error_curve[best])) {
        throw Error(ErrorCode::rank_deficient, "every order was rank deficient in some training fold");
    }
    report.m_star_hat = best + 1;
    report.refit = fit(dataset, report.m_star_hat, kernel);
    report.wall_time_ns =
        std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace coac

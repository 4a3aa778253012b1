#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "coac/regression.hpp"

namespace coac {

struct CvReport {
    std::size_t k = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> m_grid;     // 1..M
    std::vector<double> cv_error_curve;  // mean held-out MSE; +inf where an order was rank deficient in some fold
    std::size_t m_star_hat = 0;
    std::int64_t wall_time_ns = 0;
    FitResult refit;  // m_star_hat refit on all n samples
};

/// Shuffled partition of 0..n-1 into k folds whose sizes differ by at most one.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed);

/// k-fold cross-validation over orders 1..M with one independent
/// least-squares fit per (order, fold).
CvReport kfold_select_order(const Dataset& dataset, std::size_t max_order, std::size_t k, const KernelSpec& kernel,
                            std::uint64_t seed);

} // namespace coac

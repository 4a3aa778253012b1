#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "coac/bounds.hpp"
#include "coac/error.hpp"
#include "coac/regression.hpp"

namespace coac {

/// Where σ² comes from when evaluating bounds.
///   oracle     Dataset::noise_var (simulation ground truth or a user-supplied value)
///   estimated  midpoint of the validated σ² range at the largest evaluated order
enum class SigmaPolicy { oracle, estimated };

enum class BoundaryVerdict { interior_minimum, at_cap_extend_M };

std::string_view to_string(SigmaPolicy policy);
std::string_view to_string(BoundaryVerdict verdict);
SigmaPolicy sigma_policy_from_string(std::string_view name);

struct ExcludedOrder {
    std::size_t order;
    ErrorCode reason;
};

struct SelectionReport {
    std::size_t n = 0;
    std::size_t max_order = 0;
    std::vector<std::size_t> m_grid;  // evaluated orders, ascending
    std::vector<double> bound_curve;  // d2NMSE upper bound per entry of m_grid
    std::vector<double> r_ms_curve;
    std::size_t m_star_hat = 0;
    double epsilon_min = 0.0;
    ConfidenceParams params;
    SigmaPolicy sigma_policy = SigmaPolicy::oracle;
    Convention convention = Convention::canonical_half;
    double sigma_sq_used = 0.0;
    std::optional<NoiseVarianceRange> noise_range;  // set for the estimated policy
    BoundaryVerdict boundary_verdict = BoundaryVerdict::interior_minimum;
    std::vector<ExcludedOrder> excluded;
    Vector theta_hat;  // refit coefficients at m_star_hat
};

/// Fits every order 1..M and returns the order minimising the d2NMSE upper
/// bound (ties go to the smaller order). Orders whose design is rank
/// deficient, or whose bound is undefined, are listed in `excluded` instead
/// of failing the scan.
///
/// Only the oracle policy reads Dataset::noise_var; y_bar is never read.
SelectionReport select_order(const Dataset& dataset, std::size_t max_order, const KernelSpec& kernel,
                             const ConfidenceParams& params, SigmaPolicy sigma_policy, Convention convention);

/// Same scan over an existing factorization (max_order = nested.max_order()).
SelectionReport select_order(const NestedFit& nested, const Dataset& dataset, const ConfidenceParams& params,
                             SigmaPolicy sigma_policy, Convention convention);

double epsilon_min(const SelectionReport& report);

/// Re-runs the scan with a growing cap while the minimum sits on the cap:
/// M doubles (clamped to M_max) until the minimum is interior, the bound at
/// the cap already meets epsilon, or M_max is reached.
SelectionReport validate_order_cap(const Dataset& dataset, std::size_t initial_max_order, std::size_t max_max_order,
                                   const KernelSpec& kernel, const ConfidenceParams& params,
                                   SigmaPolicy sigma_policy, Convention convention,
                                   std::optional<double> epsilon = std::nullopt);

} // namespace coac

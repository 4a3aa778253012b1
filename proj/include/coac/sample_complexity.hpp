#pragma once

// Empirical sample complexity: the smallest n on a grid at which a
// trial-averaged risk quantity falls below epsilon.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "coac/bounds.hpp"
#include "coac/regression.hpp"
#include "coac/selection.hpp"

namespace coac {

/// Supplies dataset (n, trial). Datasets for the same trial should be
/// nested in n (prefixes of one sample stream) so curves are comparable.
struct DatasetStream {
    std::function<Dataset(std::size_t n, std::size_t trial)> draw;
    std::size_t trials = 0;
};

/// Which order the bound is evaluated at for each dataset.
struct OrderPolicy {
    enum class Kind { fixed_order, selected_order };
    Kind kind = Kind::fixed_order;
    std::size_t order = 1;  // the fixed order, or the cap M for selection

    static OrderPolicy fixed(std::size_t m) { return {Kind::fixed_order, m}; }
    static OrderPolicy selected(std::size_t max_order) { return {Kind::selected_order, max_order}; }
};

enum class RiskQuantity {
    oracle_d2nmse,        // r_n / (2σ²) against ground truth
    general_bound,        // d2nmse_upper
    known_order_bound,    // r_2n_high of rn_bounds_via_mse_known_order, fixed order only
};

struct CurveSettings {
    OrderPolicy policy;
    RiskQuantity quantity = RiskQuantity::general_bound;
    KernelSpec kernel = KernelSpec::polynomial(10);
    ConfidenceParams params;
    SigmaPolicy sigma_policy = SigmaPolicy::oracle;
    Convention convention = Convention::canonical_half;
};

/// Per grid point: mean over the trials where the quantity is defined, and
/// how many trials that was.
struct CurveSummary {
    std::vector<double> mean;
    std::vector<std::size_t> valid_trials;
};

/// Trials where the quantity is undefined (rank deficiency, too few samples
/// for alpha, κ domain) are left out of that n's mean; an n with no valid
/// trial is NaN. With the estimated sigma policy a fixed order m uses the
/// validated range at m itself.
CurveSummary trial_curve_summary(const DatasetStream& stream, std::span<const std::size_t> n_grid,
                                 const CurveSettings& settings, int threads = 1);

/// trial_curve_summary(...).mean
std::vector<double> trial_mean_curve(const DatasetStream& stream, std::span<const std::size_t> n_grid,
                                     const CurveSettings& settings, int threads = 1);

struct Crossing {
    std::size_t n;        // first grid point with mean < epsilon
    double interpolated;  // linear interpolation against the previous grid point
};

std::optional<Crossing> first_crossing(std::span<const std::size_t> n_grid, std::span<const double> curve,
                                       double epsilon);

struct SampleComplexityResult {
    Crossing crossing;
    std::vector<double> mean_curve;
};

/// Throws NotReached if the curve never drops below epsilon on the grid.
SampleComplexityResult sample_complexity_empirical(const DatasetStream& stream, std::span<const std::size_t> n_grid,
                                                   const CurveSettings& settings, double epsilon, int threads = 1);

} // namespace coac

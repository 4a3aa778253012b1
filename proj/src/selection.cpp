#include "coac/selection.hpp"

#include <algorithm>
#include <string>

namespace coac {

std::string_view to_string(SigmaPolicy policy)
{
    return policy == SigmaPolicy::oracle ? "oracle" : "estimated";
}

std::string_view to_string(BoundaryVerdict verdict)
{
    return verdict == BoundaryVerdict::interior_minimum ? "interior_minimum" : "at_cap_extend_M";
}

SigmaPolicy sigma_policy_from_string(std::string_view name)
{
    if (name == "oracle") {
        return SigmaPolicy::oracle;
    }
    if (name == "estimated") {
        return SigmaPolicy::estimated;
    }
    throw Error(ErrorCode::invalid_argument, "unknown sigma policy '" + std::string(name) + "'");
}

SelectionReport select_order(const Dataset& dataset, std::size_t max_order, const KernelSpec& kernel,
                             const ConfidenceParams& params, SigmaPolicy sigma_policy, Convention convention)
{
    if (max_order < 1) {
        throw Error(ErrorCode::bad_shape, "max order must be at least 1");
    }
    if (max_order > dataset.size()) {
        throw Error(ErrorCode::order_exceeds_data, "max order " + std::to_string(max_order) + " > n = " +
                                                       std::to_string(dataset.size()));
    }
    const NestedFit nested(dataset, max_order, kernel);
    return select_order(nested, dataset, params, sigma_policy, convention);
}

SelectionReport select_order(const NestedFit& nested, const Dataset& dataset, const ConfidenceParams& params,
                             SigmaPolicy sigma_policy, Convention convention)
{
    validate(params);
    const std::size_t n = nested.n();
    const std::size_t max_order = nested.max_order();
    if (dataset.size() != n) {
        throw Error(ErrorCode::length_mismatch, "dataset does not match the factorization");
    }

    SelectionReport report;
    report.n = n;
    report.max_order = max_order;
    report.params = params;
    report.sigma_policy = sigma_policy;
    report.convention = convention;

    // Orders that can carry a bound: full rank and strictly below n.
    std::vector<std::size_t> usable;
    for (std::size_t m = 1; m <= max_order; ++m) {
        if (!nested.full_rank(m)) {
            report.excluded.push_back({m, ErrorCode::rank_deficient});
        } else if (m >= n) {
            report.excluded.push_back({m, ErrorCode::bad_shape});
        } else {
            usable.push_back(m);
        }
    }
    if (usable.empty()) {
        throw Error(ErrorCode::rank_deficient, "no order in 1.." + std::to_string(max_order) + " can be evaluated");
    }

    if (sigma_policy == SigmaPolicy::oracle) {
        if (!dataset.noise_var()) {
            throw Error(ErrorCode::invalid_argument, "oracle sigma policy needs a known noise variance");
        }
        report.sigma_sq_used = *dataset.noise_var();
    } else {
        // The largest class carries the least unmodeled energy.
        const std::size_t top = usable.back();
        report.noise_range = validate_noise_variance(nested.r_ms(top), top, n, params.alpha);
        report.sigma_sq_used = report.noise_range->midpoint();
    }

    for (std::size_t m : usable) {
        const double r_ms = nested.r_ms(m);
        try {
            const double bound = d2nmse_upper(r_ms, m, n, report.sigma_sq_used, params, convention);
            report.m_grid.push_back(m);
            report.bound_curve.push_back(bound);
            report.r_ms_curve.push_back(r_ms);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::kappa_domain) {
                throw;
            }
            report.excluded.push_back({m, e.code()});
        }
    }
    std::sort(report.excluded.begin(), report.excluded.end(),
              [](const ExcludedOrder& a, const ExcludedOrder& b) { return a.order < b.order; });
    if (report.m_grid.empty()) {
        throw Error(ErrorCode::kappa_domain, "the bound is undefined at every order");
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < report.bound_curve.size(); ++i) {
        if (report.bound_curve[i] < report.bound_curve[best]) {
            best = i;
        }
    }
    report.m_star_hat = report.m_grid[best];
    report.epsilon_min = report.bound_curve[best];
    report.boundary_verdict =
        report.m_star_hat == max_order ? BoundaryVerdict::at_cap_extend_M : BoundaryVerdict::interior_minimum;
    report.theta_hat = nested.fit(report.m_star_hat).theta_hat;
    return report;
}

double epsilon_min(const SelectionReport& report)
{
    const auto it = std::find(report.m_grid.begin(), report.m_grid.end(), report.m_star_hat);
    if (it == report.m_grid.end()) {
        throw Error(ErrorCode::invalid_argument, "report does not contain its selected order");
    }
    return report.bound_curve[static_cast<std::size_t>(it - report.m_grid.begin())];
}

SelectionReport validate_order_cap(const Dataset& dataset, std::size_t initial_max_order, std::size_t max_max_order,
                                   const KernelSpec& kernel, const ConfidenceParams& params,
                                   SigmaPolicy sigma_policy, Convention convention, std::optional<double> epsilon)
{
    if (initial_max_order < 1 || initial_max_order > max_max_order) {
        throw Error(ErrorCode::invalid_argument, "need 1 <= M_init <= M_max");
    }
    if (max_max_order + 1 > dataset.size()) {
        throw Error(ErrorCode::order_exceeds_data, "M_max must be at most n - 1");
    }
    if (epsilon && !(*epsilon > 0.0)) {
        throw Error(ErrorCode::nonpositive_epsilon, "epsilon must be positive");
    }
    KernelSpec grown = kernel;
    grown.max_order = std::max(kernel.max_order, max_max_order);
    if (kernel.family == KernelFamily::custom_column_functions && max_max_order > kernel.columns.size()) {
        throw Error(ErrorCode::order_exceeds_kernel, "custom kernel has fewer than M_max columns");
    }

    std::size_t cap = initial_max_order;
    while (true) {
        SelectionReport report = select_order(dataset, cap, grown, params, sigma_policy, convention);
        if (report.boundary_verdict == BoundaryVerdict::interior_minimum) {
            return report;
        }
        if (epsilon && report.epsilon_min <= *epsilon) {
            return report;  // learnable at the cap, nothing to gain from growing it
        }
        if (cap >= max_max_order) {
            return report;
        }
        cap = std::min(2 * cap, max_max_order);
    }
}

} // namespace coac

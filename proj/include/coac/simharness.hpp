#pragma once

// Monte Carlo experiments on a polynomial ground truth.
//
// Data model: x ~ Uniform(low, high) i.i.d., ȳ = Σ_k θ_k x^k (k = 1..m*),
// y = ȳ + ω with ω ~ N(0, σ²). Trial t draws (x_i, z_i) pairs in order from
// Rng::for_stream(master_seed, t) and sets ω_i = σ·z_i, so
//   * the dataset of size n is a prefix of the dataset of size n' > n, and
//   * every noise level reuses the same x and z (common random numbers).
// Each table is therefore a pure function of the config.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "coac/bounds.hpp"
#include "coac/regression.hpp"
#include "coac/sample_complexity.hpp"
#include "coac/selection.hpp"

namespace coac {

enum class TableKind { table1, table2, table3, figs };

std::string_view to_string(TableKind kind);
/// Accepts "1", "2", "3", "figs" and the "table1".. spellings.
TableKind table_kind_from_string(std::string_view name);

struct ExperimentConfig {
    Vector truth_theta{2.3348, -2.3403, 0.6988, -0.0809, 0.0032};
    double x_low = 0.0;
    double x_high = 10.0;
    KernelSpec kernel = KernelSpec::polynomial(10);
    std::vector<double> noise_var_grid{0.2};
    std::vector<std::size_t> n_grid{300};
    std::size_t trials = 1000;
    ConfidenceParams params;
    std::vector<double> epsilon_grid{0.1, 0.05, 0.02};
    std::uint64_t master_seed = 2024;
    Convention convention = Convention::canonical_half;
    SigmaPolicy sigma_policy = SigmaPolicy::oracle;
    std::size_t cv_folds = 5;
    std::size_t curve_n = 300;                    // fixed n of the per-order curves
    std::vector<ConfidenceParams> curve_params{};  // extra (alpha, beta) pairs for the curves

    std::size_t true_order() const noexcept { return truth_theta.size(); }
};

/// One message per offending field, empty when the config is usable.
std::vector<std::string> validation_errors(const ExperimentConfig& config);
/// Throws InvalidArgument listing every validation error.
void validate(const ExperimentConfig& config);

/// Paper-scale defaults for each experiment.
ExperimentConfig default_config(TableKind kind);

/// ȳ(x) for the configured truth.
double truth_value(const ExperimentConfig& config, double x);

/// noise_var is omitted when sigma_sq is 0 (it could not be used as a σ²).
Dataset generate_dataset(const ExperimentConfig& config, std::size_t n, double sigma_sq, std::uint64_t trial_id);

DatasetStream dataset_stream(const ExperimentConfig& config, double sigma_sq);

/// Seed of the fold shuffle used for trial_id.
std::uint64_t cv_seed(const ExperimentConfig& config, std::uint64_t trial_id);

struct TrialRecord {
    std::uint64_t trial_id = 0;
    std::size_t n = 0;
    double sigma_sq = 0.0;
    std::vector<std::size_t> m_grid;  // 1..M_eff
    std::vector<double> r_ms;
    std::vector<double> oracle_r_n;
    std::vector<double> r_n_high;  // general bound; NaN where undefined
    std::size_t m_star_hat = 0;
    std::size_t m_star_hat_cv = 0;
    double refit_mse = 0.0;  // oracle r_n of the selected model
    double refit_mse_cv = 0.0;
    double signal_var = 0.0;  // population variance of ȳ over the sampled x
    std::int64_t proposed_time_ns = 0;
    std::int64_t cv_time_ns = 0;
};

/// Both selectors on one generated dataset. The proposed selector sees only
/// (x, y), plus noise_var when the sigma policy is oracle.
TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, double sigma_sq, std::uint64_t trial_id);

struct Table {
    std::string name;  // file stem
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    bool deterministic = true;  // false for wall-clock tables

    std::string to_csv() const;
};

/// Per (σ², ε): (a) crossing of the trial-mean oracle d2NMSE at the true
/// order, (b) the known-order closed form, (c) crossing of the trial-mean
/// ε_min with the order unknown.
Table run_sample_complexity_table(const ExperimentConfig& config, int threads = 1);

/// Per (σ², n): mean refit MSE and mean/SD of the selected order for the
/// proposed selector and k-fold CV.
Table run_selection_table(const ExperimentConfig& config, int threads = 1);

struct CvComparison {
    Table accuracy;  // deterministic
    Table timing;    // wall clock, measured serially
};

CvComparison run_cv_comparison(const ExperimentConfig& config, int threads = 1);

/// Trial-averaged curves over n (at the true order) and over m (at curve_n),
/// for config.params followed by each entry of curve_params.
Table run_bound_curves(const ExperimentConfig& config, int threads = 1);

/// All tables of one experiment kind.
std::vector<Table> run_experiment(const ExperimentConfig& config, TableKind kind, int threads = 1);

} // namespace coac

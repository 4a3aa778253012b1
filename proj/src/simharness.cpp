#include "coac/simharness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "coac/cv.hpp"
#include "coac/dataset_io.hpp"
#include "coac/error.hpp"
#include "coac/parallel.hpp"
#include "coac/rng.hpp"

namespace coac {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kCvStreamBit = std::uint64_t{1} << 63;

std::string cell(double value)
{
    return std::isnan(value) ? std::string() : format_double(value);
}

std::string cell(std::size_t value)
{
    return std::to_string(value);
}

std::int64_t elapsed_ns(Clock::time_point start)
{
    return std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start).count();
}

Dataset visible_to_selector(const Dataset& dataset, SigmaPolicy policy)
{
    if (policy == SigmaPolicy::oracle) {
        return Dataset(dataset.x(), dataset.y(), std::nullopt, dataset.noise_var());
    }
    return Dataset(dataset.x(), dataset.y());
}

std::size_t cv_max_order(const ExperimentConfig& config, std::size_t n)
{
    const std::size_t largest_fold = (n + config.cv_folds - 1) / config.cv_folds;
    return std::min(config.kernel.max_order, n - largest_fold);
}

double population_variance(const Vector& values)
{
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) {
        acc += (v - mean) * (v - mean);
    }
    return acc / static_cast<double>(values.size());
}

double mean_of(const std::vector<double>& values)
{
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

// Sample standard deviation; 0 for a single value.
double sd_of(const std::vector<double>& values)
{
    if (values.size() < 2) {
        return 0.0;
    }
    const double mean = mean_of(values);
    double acc = 0.0;
    for (double v : values) {
        acc += (v - mean) * (v - mean);
    }
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

double convention_factor(Convention convention)
{
    return convention == Convention::paper_eq85 ? 2.0 : 1.0;
}

struct SelectionAggregate {
    double snr_db;
    double proposed_mse;
    double cv_mse;
    double proposed_m_mean;
    double cv_m_mean;
    double proposed_m_sd;
    double cv_m_sd;
};

SelectionAggregate aggregate_selection(const ExperimentConfig& config, double sigma_sq, std::size_t n, int threads)
{
    std::vector<TrialRecord> records(config.trials);
    for_each_index(config.trials, threads,
                   [&](std::size_t t) { records[t] = run_trial(config, n, sigma_sq, t); });

    std::vector<double> proposed_mse, cv_mse, proposed_m, cv_m, signal;
    for (const TrialRecord& r : records) {
        proposed_mse.push_back(r.refit_mse);
        cv_mse.push_back(r.refit_mse_cv);
        proposed_m.push_back(static_cast<double>(r.m_star_hat));
        cv_m.push_back(static_cast<double>(r.m_star_hat_cv));
        signal.push_back(r.signal_var);
    }
    return {10.0 * std::log10(mean_of(signal) / sigma_sq),
            mean_of(proposed_mse),
            mean_of(cv_mse),
            mean_of(proposed_m),
            mean_of(cv_m),
            sd_of(proposed_m),
            sd_of(cv_m)};
}

} // namespace

std::string_view to_string(TableKind kind)
{
    switch (kind) {
    case TableKind::table1: return "table1";
    case TableKind::table2: return "table2";
    case TableKind::table3: return "table3";
    case TableKind::figs: return "figs";
    }
    return "unknown";
}

TableKind table_kind_from_string(std::string_view name)
{
    if (name == "1" || name == "table1") {
        return TableKind::table1;
    }
    if (name == "2" || name == "table2") {
        return TableKind::table2;
    }
    if (name == "3" || name == "table3") {
        return TableKind::table3;
    }
    if (name == "figs") {
        return TableKind::figs;
    }
    throw Error(ErrorCode::invalid_argument, "unknown table '" + std::string(name) + "' (expected 1, 2, 3 or figs)");
}

std::vector<std::string> validation_errors(const ExperimentConfig& config)
{
    std::vector<std::string> errors;
    const auto finite = [](double v) { return std::isfinite(v); };

    if (config.truth_theta.empty()) {
        errors.emplace_back("truth_theta: must not be empty");
    } else if (!std::all_of(config.truth_theta.begin(), config.truth_theta.end(), finite)) {
        errors.emplace_back("truth_theta: entries must be finite");
    }
    if (!finite(config.x_low) || !finite(config.x_high) || !(config.x_low < config.x_high)) {
        errors.emplace_back("x_interval: need finite low < high");
    }
    if (config.kernel.family == KernelFamily::custom_column_functions) {
        errors.emplace_back("kernel.family: custom kernels cannot be used in experiments");
    }
    if (config.kernel.max_order < 1) {
        errors.emplace_back("kernel.max_order: must be at least 1");
    } else if (config.true_order() > config.kernel.max_order) {
        errors.emplace_back("kernel.max_order: must be at least the true order " +
                            std::to_string(config.true_order()));
    }
    if (config.noise_var_grid.empty()) {
        errors.emplace_back("noise_var_grid: must not be empty");
    }
    for (double v : config.noise_var_grid) {
        if (!finite(v) || v <= 0.0) {
            errors.emplace_back("noise_var_grid: entries must be finite and > 0 (got " + format_double(v) + ")");
            break;
        }
    }
    if (config.n_grid.empty()) {
        errors.emplace_back("n_grid: must not be empty");
    }
    for (std::size_t i = 0; i < config.n_grid.size(); ++i) {
        if (config.n_grid[i] < 2 || config.n_grid[i] < config.cv_folds) {
            errors.emplace_back("n_grid: entries must be at least max(2, cv_folds) (got " +
                                std::to_string(config.n_grid[i]) + ")");
            break;
        }
        if (i > 0 && config.n_grid[i] <= config.n_grid[i - 1]) {
            errors.emplace_back("n_grid: must be strictly increasing");
            break;
        }
    }
    if (config.trials < 1) {
        errors.emplace_back("trials: must be at least 1");
    }
    const auto check_params = [&](const ConfidenceParams& p, const std::string& field) {
        if (!finite(p.alpha) || p.alpha < 0.0 || !finite(p.beta) || p.beta < 0.0) {
            errors.emplace_back(field + ": alpha and beta must be finite and >= 0");
        }
    };
    check_params(config.params, "params");
    for (std::size_t i = 0; i < config.curve_params.size(); ++i) {
        check_params(config.curve_params[i], "curve_params[" + std::to_string(i) + "]");
    }
    if (config.epsilon_grid.empty()) {
        errors.emplace_back("epsilon_grid: must not be empty");
    }
    for (double e : config.epsilon_grid) {
        if (!finite(e) || e <= 0.0) {
            errors.emplace_back("epsilon_grid: entries must be finite and > 0 (got " + format_double(e) + ")");
            break;
        }
    }
    if (config.cv_folds < 2) {
        errors.emplace_back("cv_folds: must be at least 2");
    }
    if (config.curve_n < 2 || config.curve_n < config.cv_folds) {
        errors.emplace_back("curve_n: must be at least max(2, cv_folds)");
    }
    return errors;
}

void validate(const ExperimentConfig& config)
{
    const auto errors = validation_errors(config);
    if (errors.empty()) {
        return;
    }
    std::string message = "invalid experiment config";
    for (const auto& e : errors) {
        message += "\n  " + e;
    }
    throw Error(ErrorCode::invalid_argument, message);
}

ExperimentConfig default_config(TableKind kind)
{
    ExperimentConfig config;
    const std::vector<double> descending{0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1};
    const auto range = [](std::size_t low, std::size_t high) {
        std::vector<std::size_t> grid(high - low + 1);
        std::iota(grid.begin(), grid.end(), low);
        return grid;
    };
    switch (kind) {
    case TableKind::table1:
        config.noise_var_grid = {0.2, 0.4};
        config.n_grid = range(10, 400);
        config.epsilon_grid = {0.1, 0.09, 0.08, 0.07, 0.06, 0.05, 0.04, 0.03, 0.02};
        break;
    case TableKind::table2:
        config.noise_var_grid = descending;
        config.n_grid = {100, 300};
        config.params = {3.0, 3.0};
        break;
    case TableKind::table3:
        config.noise_var_grid = descending;
        config.n_grid = {50};
        config.params = {3.0, 3.0};
        break;
    case TableKind::figs:
        config.noise_var_grid = {0.2, 0.5};
        config.n_grid = range(10, 300);
        config.curve_params = {{3.0, 3.0}};
        break;
    }
    return config;
}

double truth_value(const ExperimentConfig& config, double x)
{
    double acc = 0.0;
    for (auto it = config.truth_theta.rbegin(); it != config.truth_theta.rend(); ++it) {
        acc = (acc + *it) * x;
    }
    return acc;
}

Dataset generate_dataset(const ExperimentConfig& config, std::size_t n, double sigma_sq, std::uint64_t trial_id)
{
    if (!std::isfinite(sigma_sq) || sigma_sq < 0.0) {
        throw Error(ErrorCode::nonpositive_variance, "noise variance must be finite and >= 0");
    }
    Rng rng = Rng::for_stream(config.master_seed, trial_id);
    const double sigma = std::sqrt(sigma_sq);
    Vector x(n), y(n), y_bar(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = rng.uniform(config.x_low, config.x_high);
        const double z = rng.normal();
        y_bar[i] = truth_value(config, x[i]);
        y[i] = y_bar[i] + sigma * z;
    }
    std::optional<double> noise_var;
    if (sigma_sq > 0.0) {
        noise_var = sigma_sq;
    }
    return Dataset(std::move(x), std::move(y), std::move(y_bar), noise_var);
}

DatasetStream dataset_stream(const ExperimentConfig& config, double sigma_sq)
{
    return {[config, sigma_sq](std::size_t n, std::size_t trial) {
                return generate_dataset(config, n, sigma_sq, trial);
            },
            config.trials};
}

std::uint64_t cv_seed(const ExperimentConfig& config, std::uint64_t trial_id)
{
    return Rng::for_stream(config.master_seed, trial_id | kCvStreamBit).next_u64();
}

TrialRecord run_trial(const ExperimentConfig& config, std::size_t n, double sigma_sq, std::uint64_t trial_id)
{
    const Dataset dataset = generate_dataset(config, n, sigma_sq, trial_id);
    const Vector& y_bar = *dataset.y_bar();
    const Dataset visible = visible_to_selector(dataset, config.sigma_policy);
    const std::size_t max_order = std::min(config.kernel.max_order, n - 1);

    TrialRecord record;
    record.trial_id = trial_id;
    record.n = n;
    record.sigma_sq = sigma_sq;
    record.signal_var = population_variance(y_bar);

    auto start = Clock::now();
    const SelectionReport report =
        select_order(visible, max_order, config.kernel, config.params, config.sigma_policy, config.convention);
    record.proposed_time_ns = elapsed_ns(start);

    const NestedFit nested(visible, max_order, config.kernel);
    for (std::size_t m = 1; m <= max_order; ++m) {
        record.m_grid.push_back(m);
        if (!nested.full_rank(m)) {
            record.r_ms.push_back(std::nan(""));
            record.oracle_r_n.push_back(std::nan(""));
            record.r_n_high.push_back(std::nan(""));
            continue;
        }
        record.r_ms.push_back(nested.r_ms(m));
        record.oracle_r_n.push_back(oracle_nmse(nested.fit(m), y_bar));
        double high = std::nan("");
        if (m < n) {
            try {
                high = general_rn_bounds(nested.r_ms(m), m, n, report.sigma_sq_used, config.params).r_n_high;
            } catch (const Error& e) {
                if (e.code() != ErrorCode::kappa_domain) {
                    throw;
                }
            }
        }
        record.r_n_high.push_back(high);
    }
    record.m_star_hat = report.m_star_hat;
    record.refit_mse = record.oracle_r_n[report.m_star_hat - 1];

    start = Clock::now();
    const CvReport cv = kfold_select_order(Dataset(dataset.x(), dataset.y()), cv_max_order(config, n),
                                           config.cv_folds, config.kernel, cv_seed(config, trial_id));
    record.cv_time_ns = elapsed_ns(start);
    record.m_star_hat_cv = cv.m_star_hat;
    record.refit_mse_cv = oracle_nmse(cv.refit, y_bar);
    return record;
}

std::string Table::to_csv() const
{
    std::ostringstream out;
    const auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << row[i];
        }
        out << '\n';
    };
    write_row(header);
    for (const auto& row : rows) {
        write_row(row);
    }
    return out.str();
}

Table run_sample_complexity_table(const ExperimentConfig& config, int threads)
{
    validate(config);
    Table table;
    table.name = "table1";
    table.header = {"sigma_sq",        "epsilon",   "n_oracle",         "n_oracle_interp",
                    "n_known_order",   "n_general", "n_general_interp", "status"};

    const std::size_t m_true = config.true_order();
    CurveSettings oracle_settings{OrderPolicy::fixed(m_true), RiskQuantity::oracle_d2nmse, config.kernel,
                                  config.params, config.sigma_policy, config.convention};
    CurveSettings general_settings{OrderPolicy::selected(config.kernel.max_order), RiskQuantity::general_bound,
                                   config.kernel, config.params, config.sigma_policy, config.convention};

    for (double sigma_sq : config.noise_var_grid) {
        const DatasetStream stream = dataset_stream(config, sigma_sq);
        const auto oracle_curve = trial_mean_curve(stream, config.n_grid, oracle_settings, threads);
        const auto general_curve = trial_mean_curve(stream, config.n_grid, general_settings, threads);
        for (double epsilon : config.epsilon_grid) {
            const auto a = first_crossing(config.n_grid, oracle_curve, epsilon);
            const auto c = first_crossing(config.n_grid, general_curve, epsilon);
            const std::size_t b = sample_complexity_known_order(m_true, epsilon, config.params.beta);
            std::string status = "ok";
            if (!a && !c) {
                status = "not_reached:oracle+general";
            } else if (!a) {
                status = "not_reached:oracle";
            } else if (!c) {
                status = "not_reached:general";
            }
            table.rows.push_back({cell(sigma_sq), cell(epsilon), a ? cell(a->n) : "",
                                  a ? cell(a->interpolated) : "", cell(b), c ? cell(c->n) : "",
                                  c ? cell(c->interpolated) : "", status});
        }
    }
    return table;
}

Table run_selection_table(const ExperimentConfig& config, int threads)
{
    validate(config);
    Table table;
    table.name = "table3";
    table.header = {"sigma_sq",        "snr_db",    "n",           "trials",      "proposed_mse", "cv_mse",
                    "proposed_m_mean", "cv_m_mean", "proposed_m_sd", "cv_m_sd"};
    for (double sigma_sq : config.noise_var_grid) {
        for (std::size_t n : config.n_grid) {
            const SelectionAggregate agg = aggregate_selection(config, sigma_sq, n, threads);
            table.rows.push_back({cell(sigma_sq), cell(agg.snr_db), cell(n), cell(config.trials),
                                  cell(agg.proposed_mse), cell(agg.cv_mse), cell(agg.proposed_m_mean),
                                  cell(agg.cv_m_mean), cell(agg.proposed_m_sd), cell(agg.cv_m_sd)});
        }
    }
    return table;
}

CvComparison run_cv_comparison(const ExperimentConfig& config, int threads)
{
    validate(config);
    CvComparison result;
    result.accuracy.name = "table2";
    result.accuracy.header = {"sigma_sq",     "snr_db", "n",         "trials",
                              "proposed_mse", "cv_mse", "proposed_m_mean", "cv_m_mean"};
    result.timing.name = "table2_timing";
    result.timing.deterministic = false;
    result.timing.header = {"sigma_sq", "n", "trials", "proposed_time_s", "cv_time_s", "cv_to_proposed_ratio"};

    for (double sigma_sq : config.noise_var_grid) {
        for (std::size_t n : config.n_grid) {
            const SelectionAggregate agg = aggregate_selection(config, sigma_sq, n, threads);
            result.accuracy.rows.push_back({cell(sigma_sq), cell(agg.snr_db), cell(n), cell(config.trials),
                                            cell(agg.proposed_mse), cell(agg.cv_mse), cell(agg.proposed_m_mean),
                                            cell(agg.cv_m_mean)});

            // Timing on one worker so neither method benefits from the pool.
            std::int64_t proposed_ns = 0;
            std::int64_t cv_ns = 0;
            const std::size_t max_order = std::min(config.kernel.max_order, n - 1);
            for (std::size_t t = 0; t < config.trials; ++t) {
                const Dataset dataset = generate_dataset(config, n, sigma_sq, t);
                const Dataset visible = visible_to_selector(dataset, config.sigma_policy);
                const Dataset plain(dataset.x(), dataset.y());
                auto start = Clock::now();
                select_order(visible, max_order, config.kernel, config.params, config.sigma_policy,
                             config.convention);
                proposed_ns += elapsed_ns(start);
                start = Clock::now();
                kfold_select_order(plain, cv_max_order(config, n), config.cv_folds, config.kernel,
                                   cv_seed(config, t));
                cv_ns += elapsed_ns(start);
            }
            const double proposed_s = static_cast<double>(proposed_ns) * 1e-9;
            const double cv_s = static_cast<double>(cv_ns) * 1e-9;
            result.timing.rows.push_back({cell(sigma_sq), cell(n), cell(config.trials), cell(proposed_s),
                                          cell(cv_s), cell(proposed_s > 0.0 ? cv_s / proposed_s : std::nan(""))});
        }
    }
    return result;
}

Table run_bound_curves(const ExperimentConfig& config, int threads)
{
    validate(config);
    Table table;
    table.name = "figs";
    table.header = {"curve",  "sigma_sq",      "alpha",         "beta",       "sweep_var",
                    "oracle", "bound_known",   "bound_general", "convention", "valid_trials"};

    std::vector<ConfidenceParams> param_sets{config.params};
    param_sets.insert(param_sets.end(), config.curve_params.begin(), config.curve_params.end());
    const std::size_t m_true = config.true_order();
    const std::size_t max_order = config.kernel.max_order;
    const double factor = convention_factor(config.convention);
    const std::string convention(to_string(config.convention));
    const std::vector<std::size_t> curve_grid{config.curve_n};

    for (double sigma_sq : config.noise_var_grid) {
        const DatasetStream stream = dataset_stream(config, sigma_sq);
        CurveSettings settings{OrderPolicy::fixed(m_true), RiskQuantity::oracle_d2nmse, config.kernel,
                               config.params, config.sigma_policy, config.convention};
        const auto oracle_n = trial_mean_curve(stream, config.n_grid, settings, threads);
        std::vector<double> oracle_m(max_order);
        for (std::size_t m = 1; m <= max_order; ++m) {
            settings.policy = OrderPolicy::fixed(m);
            oracle_m[m - 1] = trial_mean_curve(stream, curve_grid, settings, threads).front();
        }

        for (const ConfidenceParams& params : param_sets) {
            settings.params = params;
            const std::string alpha = cell(params.alpha);
            const std::string beta = cell(params.beta);

            settings.policy = OrderPolicy::selected(max_order);
            settings.quantity = RiskQuantity::general_bound;
            const CurveSummary general_n = trial_curve_summary(stream, config.n_grid, settings, threads);
            for (std::size_t j = 0; j < config.n_grid.size(); ++j) {
                const std::size_t n = config.n_grid[j];
                double known = std::nan("");
                if (m_true <= n) {
                    known = factor * rn_bounds_known_order(m_true, n, sigma_sq, params.beta).r_2n_high;
                }
                table.rows.push_back({"n", cell(sigma_sq), alpha, beta, cell(n), cell(oracle_n[j]), cell(known),
                                      cell(general_n.mean[j]), convention, cell(general_n.valid_trials[j])});
            }

            for (std::size_t m = 1; m <= max_order; ++m) {
                settings.policy = OrderPolicy::fixed(m);
                settings.quantity = RiskQuantity::known_order_bound;
                const double known = trial_mean_curve(stream, curve_grid, settings, threads).front();
                settings.quantity = RiskQuantity::general_bound;
                const CurveSummary general = trial_curve_summary(stream, curve_grid, settings, threads);
                table.rows.push_back({"m", cell(sigma_sq), alpha, beta, cell(m), cell(oracle_m[m - 1]),
                                      cell(factor * known), cell(general.mean.front()), convention,
                                      cell(general.valid_trials.front())});
            }
            settings.quantity = RiskQuantity::oracle_d2nmse;
        }
    }
    return table;
}

std::vector<Table> run_experiment(const ExperimentConfig& config, TableKind kind, int threads)
{
    switch (kind) {
    case TableKind::table1: return {run_sample_complexity_table(config, threads)};
    case TableKind::table2: {
        CvComparison cmp = run_cv_comparison(config, threads);
        return {std::move(cmp.accuracy), std::move(cmp.timing)};
    }
    case TableKind::table3: return {run_selection_table(config, threads)};
    case TableKind::figs: return {run_bound_curves(config, threads)};
    }
    throw Error(ErrorCode::invalid_argument, "unknown table kind");
}

} // namespace coac

// Serial reference vs OpenMP trial loop on the same Monte Carlo workload.
// Prints wall times and fails (exit 1) if the two curves differ in any bit.

#include <chrono>
#include <cstring>
#include <iostream>
#include <numeric>
#include <vector>

#include <CLI11.hpp>

#include "coac/parallel.hpp"
#include "coac/sample_complexity.hpp"
#include "coac/simharness.hpp"

using namespace coac;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Trial-loop throughput: serial reference vs OpenMP"};
    std::size_t trials = 200;
    int threads = default_worker_count();
    std::size_t n_low = 20, n_high = 300, n_step = 10;
    app.add_option("--trials", trials, "Monte Carlo trials")->check(CLI::PositiveNumber);
    app.add_option("--threads,-j", threads, "OpenMP workers")->check(CLI::PositiveNumber);
    app.add_option("--n-step", n_step, "Grid spacing in n")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    threads = capped_worker_count(threads);

    ExperimentConfig config = default_config(TableKind::figs);
    config.trials = trials;
    std::vector<std::size_t> n_grid;
    for (std::size_t n = n_low; n <= n_high; n += n_step) {
        n_grid.push_back(n);
    }
    const DatasetStream stream = dataset_stream(config, 0.2);
    const CurveSettings settings{OrderPolicy::selected(config.kernel.max_order), RiskQuantity::general_bound,
                                 config.kernel, config.params, config.sigma_policy, config.convention};

    auto start = std::chrono::steady_clock::now();
    const auto serial = trial_mean_curve(stream, n_grid, settings, 1);
    const double serial_s = seconds_since(start);

    start = std::chrono::steady_clock::now();
    const auto parallel = trial_mean_curve(stream, n_grid, settings, threads);
    const double parallel_s = seconds_since(start);

    const bool identical = serial.size() == parallel.size() &&
                           std::memcmp(serial.data(), parallel.data(), serial.size() * sizeof(double)) == 0;
    const std::size_t evaluations = trials * n_grid.size();
    std::cout << "workload: " << trials << " trials x " << n_grid.size() << " n values (selection over M = "
              << config.kernel.max_order << ")\n";
    std::cout << "serial   1 worker : " << serial_s << " s, " << evaluations / serial_s << " selections/s\n";
    std::cout << "openmp " << threads << " worker(s): " << parallel_s << " s, " << evaluations / parallel_s
              << " selections/s, speedup " << serial_s / parallel_s << "\n";
    std::cout << "outputs identical: " << (identical ? "yes" : "NO") << "\n";
    return identical ? 0 : 1;
}

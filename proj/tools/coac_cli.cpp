// coac: fitting, order selection, sample-complexity queries and experiment
// reproduction from the command line.
//
// Exit codes: 0 success, 2 usage or validation, 3 rank deficiency,
// 4 too few samples for the requested validation multiplier.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coac/bounds.hpp"
#include "coac/cv.hpp"
#include "coac/dataset_io.hpp"
#include "coac/error.hpp"
#include "coac/parallel.hpp"
#include "coac/regression.hpp"
#include "coac/selection.hpp"
#include "coac/serialize.hpp"
#include "coac/simharness.hpp"

namespace fs = std::filesystem;
using namespace coac;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInsufficient = 4;

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::rank_deficient: return kExitNumerical;
    case ErrorCode::insufficient_samples: return kExitInsufficient;
    default: return kExitUsage;
    }
}

void emit(const Json& doc, const std::string& out_path)
{
    const std::string text = doc.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::invalid_argument, "cannot write '" + out_path + "'");
    }
    out << text;
}

KernelSpec kernel_for(const std::string& family, std::size_t max_order)
{
    KernelSpec kernel;
    kernel.family = kernel_family_from_string(family);
    if (kernel.family == KernelFamily::custom_column_functions) {
        throw Error(ErrorCode::invalid_argument, "custom kernels are only available through the library");
    }
    kernel.max_order = max_order;
    return kernel;
}

struct NoiseFlags {
    std::optional<double> noise_var;
    bool estimate = false;

    void add_to(CLI::App& cmd)
    {
        auto* known = cmd.add_option("--noise-var", noise_var, "Known noise variance (oracle policy)")
                          ->check(CLI::PositiveNumber);
        auto* est = cmd.add_flag("--estimate-noise", estimate,
                                 "Use the midpoint of the validated variance range at the top order");
        known->excludes(est);
        est->excludes(known);
    }

    SigmaPolicy policy() const
    {
        if (!noise_var && !estimate) {
            throw Error(ErrorCode::invalid_argument, "one of --noise-var or --estimate-noise is required");
        }
        return noise_var ? SigmaPolicy::oracle : SigmaPolicy::estimated;
    }

    Dataset apply(const Dataset& dataset) const { return dataset.with_noise_var(noise_var); }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Confidence-validated regression order selection and sample complexity"};
    app.set_version_flag("--version", std::string(COAC_VERSION));
    app.require_subcommand(1);

    // fit
    std::string fit_input, fit_out, fit_kernel = "poly";
    std::size_t fit_order = 1;
    auto* fit_cmd = app.add_subcommand("fit", "Least-squares fit of one order");
    fit_cmd->add_option("input", fit_input, "CSV with x,y[,y_bar] columns")->required();
    fit_cmd->add_option("--order,-m", fit_order, "Model order")->required()->check(CLI::PositiveNumber);
    fit_cmd->add_option("--kernel", fit_kernel, "poly or poly-intercept")->check(CLI::IsMember({"poly", "poly-intercept"}));
    fit_cmd->add_option("--out,-o", fit_out, "Write JSON here instead of stdout");

    // select
    std::string sel_input, sel_out, sel_kernel = "poly", sel_convention = "canonical";
    std::size_t sel_max_order = 10;
    std::optional<std::size_t> sel_cap;
    std::optional<double> sel_epsilon;
    ConfidenceParams sel_params;
    NoiseFlags sel_noise;
    auto* sel_cmd = app.add_subcommand("select", "Choose the order minimising the d2NMSE upper bound");
    sel_cmd->add_option("input", sel_input, "CSV with x,y[,y_bar] columns")->required();
    sel_cmd->add_option("--max-order,-M", sel_max_order, "Largest order compared")->check(CLI::PositiveNumber);
    sel_cmd->add_option("--alpha", sel_params.alpha, "Validation multiplier")->check(CLI::NonNegativeNumber);
    sel_cmd->add_option("--beta", sel_params.beta, "Confidence multiplier")->check(CLI::NonNegativeNumber);
    sel_noise.add_to(*sel_cmd);
    sel_cmd->add_option("--convention", sel_convention, "canonical or eq85")
        ->check(CLI::IsMember({"canonical", "eq85"}));
    sel_cmd->add_option("--kernel", sel_kernel, "poly or poly-intercept")->check(CLI::IsMember({"poly", "poly-intercept"}));
    sel_cmd->add_option("--validate-cap", sel_cap, "Grow M up to this value while the minimum sits on the cap")
        ->check(CLI::PositiveNumber);
    sel_cmd->add_option("--epsilon", sel_epsilon, "Stop growing M once the bound at the cap meets this")
        ->check(CLI::PositiveNumber);
    sel_cmd->add_option("--out,-o", sel_out, "Write JSON here instead of stdout");

    // sample-complexity
    std::size_t sc_order = 1;
    double sc_epsilon = 0.0;
    double sc_beta = 2.0;
    auto* sc_cmd = app.add_subcommand("sample-complexity", "Minimum n for a known order");
    sc_cmd->add_option("--order,-m", sc_order, "Model order")->required()->check(CLI::PositiveNumber);
    sc_cmd->add_option("--epsilon", sc_epsilon, "Target d2NMSE")->required();
    sc_cmd->add_option("--beta", sc_beta, "Confidence multiplier")->check(CLI::NonNegativeNumber);

    // noise-range
    std::string nr_input, nr_kernel = "poly";
    std::size_t nr_order = 1;
    double nr_alpha = 2.0;
    auto* nr_cmd = app.add_subcommand("noise-range", "Validated noise variance interval at one order");
    nr_cmd->add_option("input", nr_input, "CSV with x,y[,y_bar] columns")->required();
    nr_cmd->add_option("--order,-m", nr_order, "Model order")->required()->check(CLI::PositiveNumber);
    nr_cmd->add_option("--alpha", nr_alpha, "Validation multiplier")->check(CLI::NonNegativeNumber);
    nr_cmd->add_option("--kernel", nr_kernel, "poly or poly-intercept")->check(CLI::IsMember({"poly", "poly-intercept"}));

    // simulate
    std::string sim_config, sim_table, sim_out = ".";
    std::optional<std::uint64_t> sim_seed;
    std::optional<std::size_t> sim_trials;
    int sim_threads = default_worker_count();
    auto* sim_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment and write CSV tables");
    sim_cmd->add_option("--config,-c", sim_config, "JSON config; omitted fields take the table defaults");
    sim_cmd->add_option("--table,-t", sim_table, "1, 2, 3 or figs")->required()->check(CLI::IsMember({"1", "2", "3", "figs"}));
    sim_cmd->add_option("--out,-o", sim_out, "Output directory");
    sim_cmd->add_option("--seed", sim_seed, "Override master_seed");
    sim_cmd->add_option("--trials", sim_trials, "Override trials")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--threads,-j", sim_threads, "Worker threads (capped by COAC_THREADS)")
        ->check(CLI::PositiveNumber);

    // compare-cv
    std::string cmp_input, cmp_kernel = "poly", cmp_convention = "canonical";
    std::size_t cmp_max_order = 10, cmp_folds = 5;
    std::uint64_t cmp_seed = 1;
    ConfidenceParams cmp_params;
    NoiseFlags cmp_noise;
    auto* cmp_cmd = app.add_subcommand("compare-cv", "Proposed selection next to k-fold cross-validation");
    cmp_cmd->add_option("input", cmp_input, "CSV with x,y[,y_bar] columns")->required();
    cmp_cmd->add_option("--max-order,-M", cmp_max_order, "Largest order compared")->check(CLI::PositiveNumber);
    cmp_cmd->add_option("--folds,-k", cmp_folds, "Number of folds")->check(CLI::Range(2, 1 << 20));
    cmp_cmd->add_option("--seed", cmp_seed, "Fold shuffle seed");
    cmp_cmd->add_option("--alpha", cmp_params.alpha, "Validation multiplier")->check(CLI::NonNegativeNumber);
    cmp_cmd->add_option("--beta", cmp_params.beta, "Confidence multiplier")->check(CLI::NonNegativeNumber);
    cmp_noise.add_to(*cmp_cmd);
    cmp_cmd->add_option("--convention", cmp_convention, "canonical or eq85")
        ->check(CLI::IsMember({"canonical", "eq85"}));
    cmp_cmd->add_option("--kernel", cmp_kernel, "poly or poly-intercept")->check(CLI::IsMember({"poly", "poly-intercept"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*fit_cmd) {
            const Dataset dataset = load_dataset_csv(fit_input);
            const KernelSpec kernel = kernel_for(fit_kernel, fit_order);
            emit(to_json(fit(dataset, fit_order, kernel), kernel), fit_out);
        } else if (*sel_cmd) {
            const SigmaPolicy policy = sel_noise.policy();
            const Dataset dataset = sel_noise.apply(load_dataset_csv(sel_input));
            const KernelSpec kernel = kernel_for(sel_kernel, sel_max_order);
            const Convention convention = convention_from_string(sel_convention);
            SelectionReport report;
            if (sel_cap) {
                report = validate_order_cap(dataset, sel_max_order, *sel_cap, kernel, sel_params, policy, convention,
                                            sel_epsilon);
            } else {
                if (sel_epsilon) {
                    throw Error(ErrorCode::invalid_argument, "--epsilon only applies together with --validate-cap");
                }
                report = select_order(dataset, sel_max_order, kernel, sel_params, policy, convention);
            }
            emit(to_json(report), sel_out);
        } else if (*sc_cmd) {
            if (!(sc_epsilon > 0.0)) {
                throw Error(ErrorCode::nonpositive_epsilon, "--epsilon must be positive");
            }
            std::cout << sample_complexity_known_order(sc_order, sc_epsilon, sc_beta) << "\n";
        } else if (*nr_cmd) {
            const Dataset dataset = load_dataset_csv(nr_input);
            const KernelSpec kernel = kernel_for(nr_kernel, nr_order);
            const FitResult fitted = fit(dataset, nr_order, kernel);
            emit(to_json(validate_noise_variance(fitted.r_ms, nr_order, dataset.size(), nr_alpha)), "");
        } else if (*sim_cmd) {
            const TableKind kind = table_kind_from_string(sim_table);
            ExperimentConfig config = default_config(kind);
            if (!sim_config.empty()) {
                std::ifstream in(sim_config);
                if (!in) {
                    throw Error(ErrorCode::invalid_argument, "cannot open config '" + sim_config + "'");
                }
                Json doc;
                try {
                    doc = Json::parse(in);
                } catch (const nlohmann::json::parse_error& e) {
                    throw Error(ErrorCode::parse_error, sim_config + ": " + e.what());
                }
                config = config_from_json(doc, config);
            }
            if (sim_seed) {
                config.master_seed = *sim_seed;
            }
            if (sim_trials) {
                config.trials = *sim_trials;
            }
            validate(config);
            const int threads = capped_worker_count(sim_threads);

            fs::create_directories(sim_out);
            std::vector<OutputFile> outputs;
            for (const Table& table : run_experiment(config, kind, threads)) {
                const fs::path path = fs::path(sim_out) / (table.name + ".csv");
                std::ofstream out(path, std::ios::binary);
                if (!out) {
                    throw Error(ErrorCode::invalid_argument, "cannot write '" + path.string() + "'");
                }
                out << table.to_csv();
                outputs.push_back({path.filename().string(), table.rows.size(), table.deterministic});
            }
            const fs::path manifest_path = fs::path(sim_out) / (std::string(to_string(kind)) + "_manifest.json");
            emit(manifest(config, kind, outputs), manifest_path.string());
            std::cout << manifest_path.string() << "\n";
        } else if (*cmp_cmd) {
            const SigmaPolicy policy = cmp_noise.policy();
            const Dataset dataset = cmp_noise.apply(load_dataset_csv(cmp_input));
            const KernelSpec kernel = kernel_for(cmp_kernel, cmp_max_order);
            const SelectionReport proposed = select_order(dataset, cmp_max_order, kernel, cmp_params, policy,
                                                          convention_from_string(cmp_convention));
            const CvReport cv = kfold_select_order(Dataset(dataset.x(), dataset.y()), cmp_max_order, cmp_folds,
                                                   kernel, cmp_seed);
            emit(Json{{"schema_version", kSchemaVersion},
                      {"kind", "compare_cv"},
                      {"proposed", to_json(proposed)},
                      {"cv", to_json(cv)}},
                 "");
        }
    } catch (const Error& e) {
        std::cerr << "coac: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "coac: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitOk;
}

#include "coac/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "coac/error.hpp"

namespace coac {

namespace {

void require_schema(const Json& doc, std::string_view what)
{
    if (!doc.is_object() || !doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != kSchemaVersion) {
        throw Error(ErrorCode::parse_error,
                    std::string(what) + ": missing or unsupported schema_version (expected " +
                        std::to_string(kSchemaVersion) + ")");
    }
}

// Collects one diagnostic per bad field instead of stopping at the first.
class FieldReader {
public:
    FieldReader(const Json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

    bool has(const char* key) const { return doc_.contains(key); }

    void count(const char* key, std::size_t& out)
    {
        if (!has(key)) {
            return;
        }
        const Json& v = doc_[key];
        if (!v.is_number_unsigned()) {
            fail(key, "expected a non-negative integer");
            return;
        }
        out = v.get<std::size_t>();
    }

    void seed(const char* key, std::uint64_t& out)
    {
        if (!has(key)) {
            return;
        }
        const Json& v = doc_[key];
        if (!v.is_number_unsigned()) {
            fail(key, "expected a non-negative integer");
            return;
        }
        out = v.get<std::uint64_t>();
    }

    void reals(const char* key, std::vector<double>& out)
    {
        if (!has(key)) {
            return;
        }
        const Json& v = doc_[key];
        if (!v.is_array() || !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number(); })) {
            fail(key, "expected an array of numbers");
            return;
        }
        out = v.get<std::vector<double>>();
    }

    void counts(const char* key, std::vector<std::size_t>& out)
    {
        if (!has(key)) {
            return;
        }
        const Json& v = doc_[key];
        if (!v.is_array() ||
            !std::all_of(v.begin(), v.end(), [](const Json& e) { return e.is_number_unsigned(); })) {
            fail(key, "expected an array of non-negative integers");
            return;
        }
        out = v.get<std::vector<std::size_t>>();
    }

    template <typename Parse>
    void text(const char* key, Parse&& parse)
    {
        if (!has(key)) {
            return;
        }
        const Json& v = doc_[key];
        if (!v.is_string()) {
            fail(key, "expected a string");
            return;
        }
        try {
            parse(v.get<std::string>());
        } catch (const Error& e) {
            fail(key, e.what());
        }
    }

    void fail(const std::string& key, const std::string& message) { errors_.push_back(key + ": " + message); }

private:
    const Json& doc_;
    std::vector<std::string>& errors_;
};

bool read_params(const Json& v, ConfidenceParams& out)
{
    if (!v.is_object()) {
        return false;
    }
    for (const auto& [key, value] : v.items()) {
        if ((key != "alpha" && key != "beta") || !value.is_number()) {
            return false;
        }
    }
    if (v.contains("alpha")) {
        out.alpha = v["alpha"].get<double>();
    }
    if (v.contains("beta")) {
        out.beta = v["beta"].get<double>();
    }
    return true;
}

} // namespace

Json to_json(const ConfidenceParams& params)
{
    return Json{{"alpha", params.alpha}, {"beta", params.beta}, {"p_alpha", params.p_alpha()},
                {"p_beta", params.p_beta()}};
}

Json to_json(const FitResult& fit, const KernelSpec& kernel)
{
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "fit"},
                {"kernel", std::string(to_string(kernel.family))},
                {"order", fit.order},
                {"n", fit.n},
                {"theta_hat", fit.theta_hat},
                {"r_ms", fit.r_ms}};
}

Json to_json(const NoiseVarianceRange& range)
{
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "noise_range"},
                {"low", range.low},
                {"high", range.high},
                {"midpoint", range.midpoint()},
                {"p_alpha", range.p_alpha},
                {"source_r_ms", range.source_r_ms},
                {"m", range.m},
                {"n", range.n}};
}

Json to_json(const RiskBounds& bounds)
{
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "risk_bounds"},
                {"mode", std::string(to_string(bounds.mode))},
                {"m", bounds.m},
                {"n", bounds.n},
                {"r_n_low", bounds.r_n_low},
                {"r_n_high", bounds.r_n_high},
                {"r_2n_low", bounds.r_2n_low},
                {"r_2n_high", bounds.r_2n_high},
                {"params", to_json(bounds.params)},
                {"sigma_sq_used", bounds.sigma_sq_used}};
}

Json to_json(const SelectionReport& report)
{
    Json excluded = Json::array();
    for (const auto& e : report.excluded) {
        excluded.push_back(Json{{"order", e.order}, {"reason", std::string(to_string(e.reason))}});
    }
    Json noise_range = nullptr;
    if (report.noise_range) {
        noise_range = to_json(*report.noise_range);
        noise_range.erase("schema_version");
        noise_range.erase("kind");
    }
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "selection"},
                {"n", report.n},
                {"max_order", report.max_order},
                {"m_grid", report.m_grid},
                {"bound_curve", report.bound_curve},
                {"r_ms_curve", report.r_ms_curve},
                {"m_star_hat", report.m_star_hat},
                {"epsilon_min", report.epsilon_min},
                {"params", to_json(report.params)},
                {"sigma_policy", std::string(to_string(report.sigma_policy))},
                {"convention", std::string(to_string(report.convention))},
                {"sigma_sq_used", report.sigma_sq_used},
                {"noise_range", noise_range},
                {"boundary_verdict", std::string(to_string(report.boundary_verdict))},
                {"excluded", excluded},
                {"theta_hat", report.theta_hat}};
}

Json to_json(const CvReport& report)
{
    Json curve = Json::array();
    for (double v : report.cv_error_curve) {
        curve.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
    }
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "cv"},
                {"k", report.k},
                {"n", report.n},
                {"seed", report.seed},
                {"m_grid", report.m_grid},
                {"cv_error_curve", curve},
                {"m_star_hat", report.m_star_hat},
                {"theta_hat", report.refit.theta_hat},
                {"r_ms", report.refit.r_ms},
                {"wall_time_ns", report.wall_time_ns}};
}

Json to_json(const ExperimentConfig& config)
{
    Json curve_params = Json::array();
    for (const auto& p : config.curve_params) {
        curve_params.push_back(Json{{"alpha", p.alpha}, {"beta", p.beta}});
    }
    return Json{{"schema_version", kSchemaVersion},
                {"truth_theta", config.truth_theta},
                {"x_interval", {config.x_low, config.x_high}},
                {"kernel",
                 {{"family", std::string(to_string(config.kernel.family))}, {"max_order", config.kernel.max_order}}},
                {"noise_var_grid", config.noise_var_grid},
                {"n_grid", config.n_grid},
                {"trials", config.trials},
                {"params", {{"alpha", config.params.alpha}, {"beta", config.params.beta}}},
                {"epsilon_grid", config.epsilon_grid},
                {"master_seed", config.master_seed},
                {"convention", std::string(to_string(config.convention))},
                {"sigma_policy", std::string(to_string(config.sigma_policy))},
                {"cv_folds", config.cv_folds},
                {"curve_n", config.curve_n},
                {"curve_params", curve_params}};
}

FitResult fit_from_json(const Json& doc)
{
    require_schema(doc, "fit");
    try {
        FitResult fit;
        fit.order = doc.at("order").get<std::size_t>();
        fit.n = doc.at("n").get<std::size_t>();
        fit.theta_hat = doc.at("theta_hat").get<Vector>();
        fit.r_ms = doc.at("r_ms").get<double>();
        return fit;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("fit: ") + e.what());
    }
}

SelectionReport selection_from_json(const Json& doc)
{
    require_schema(doc, "selection");
    try {
        SelectionReport report;
        report.n = doc.at("n").get<std::size_t>();
        report.max_order = doc.at("max_order").get<std::size_t>();
        report.m_grid = doc.at("m_grid").get<std::vector<std::size_t>>();
        report.bound_curve = doc.at("bound_curve").get<std::vector<double>>();
        report.r_ms_curve = doc.at("r_ms_curve").get<std::vector<double>>();
        report.m_star_hat = doc.at("m_star_hat").get<std::size_t>();
        report.epsilon_min = doc.at("epsilon_min").get<double>();
        report.params.alpha = doc.at("params").at("alpha").get<double>();
        report.params.beta = doc.at("params").at("beta").get<double>();
        report.sigma_policy = sigma_policy_from_string(doc.at("sigma_policy").get<std::string>());
        report.convention = convention_from_string(doc.at("convention").get<std::string>());
        report.sigma_sq_used = doc.at("sigma_sq_used").get<double>();
        const Json& range = doc.at("noise_range");
        if (!range.is_null()) {
            report.noise_range = NoiseVarianceRange{range.at("low").get<double>(),
                                                    range.at("high").get<double>(),
                                                    range.at("p_alpha").get<double>(),
                                                    range.at("source_r_ms").get<double>(),
                                                    range.at("m").get<std::size_t>(),
                                                    range.at("n").get<std::size_t>()};
        }
        const std::string verdict = doc.at("boundary_verdict").get<std::string>();
        if (verdict == to_string(BoundaryVerdict::interior_minimum)) {
            report.boundary_verdict = BoundaryVerdict::interior_minimum;
        } else if (verdict == to_string(BoundaryVerdict::at_cap_extend_M)) {
            report.boundary_verdict = BoundaryVerdict::at_cap_extend_M;
        } else {
            throw Error(ErrorCode::parse_error, "selection: unknown boundary_verdict '" + verdict + "'");
        }
        for (const Json& e : doc.at("excluded")) {
            const std::string reason = e.at("reason").get<std::string>();
            ErrorCode code = ErrorCode::invalid_argument;
            bool known = false;
            for (ErrorCode c : {ErrorCode::rank_deficient, ErrorCode::bad_shape, ErrorCode::kappa_domain}) {
                if (reason == to_string(c)) {
                    code = c;
                    known = true;
                }
            }
            if (!known) {
                throw Error(ErrorCode::parse_error, "selection: unknown exclusion reason '" + reason + "'");
            }
            report.excluded.push_back({e.at("order").get<std::size_t>(), code});
        }
        report.theta_hat = doc.at("theta_hat").get<Vector>();
        return report;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::parse_error, std::string("selection: ") + e.what());
    }
}

ExperimentConfig config_from_json(const Json& doc, ExperimentConfig base)
{
    if (!doc.is_object()) {
        throw Error(ErrorCode::invalid_argument, "config: expected a JSON object");
    }
    static const std::set<std::string> known{"schema_version", "truth_theta", "x_interval",   "kernel",
                                             "noise_var_grid", "n_grid",      "trials",       "params",
                                             "epsilon_grid",   "master_seed", "convention",   "sigma_policy",
                                             "cv_folds",       "curve_n",     "curve_params", "table"};
    std::vector<std::string> errors;
    for (const auto& [key, value] : doc.items()) {
        if (!known.contains(key)) {
            errors.push_back(key + ": unknown field");
        }
    }
    if (doc.contains("schema_version") &&
        (!doc["schema_version"].is_number_integer() || doc["schema_version"].get<int>() != kSchemaVersion)) {
        errors.push_back("schema_version: expected " + std::to_string(kSchemaVersion));
    }

    FieldReader reader(doc, errors);
    reader.reals("truth_theta", base.truth_theta);
    if (reader.has("x_interval")) {
        const Json& v = doc["x_interval"];
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            base.x_low = v[0].get<double>();
            base.x_high = v[1].get<double>();
        } else {
            reader.fail("x_interval", "expected [low, high]");
        }
    }
    if (reader.has("kernel")) {
        const Json& v = doc["kernel"];
        if (!v.is_object()) {
            reader.fail("kernel", "expected an object with family and max_order");
        } else {
            std::vector<std::string> kernel_errors;
            FieldReader kernel_reader(v, kernel_errors);
            kernel_reader.text("family", [&](const std::string& s) { base.kernel.family = kernel_family_from_string(s); });
            kernel_reader.count("max_order", base.kernel.max_order);
            for (const auto& [key, value] : v.items()) {
                if (key != "family" && key != "max_order") {
                    kernel_errors.push_back(key + ": unknown field");
                }
            }
            for (const auto& e : kernel_errors) {
                errors.push_back("kernel." + e);
            }
        }
    }
    reader.reals("noise_var_grid", base.noise_var_grid);
    reader.counts("n_grid", base.n_grid);
    reader.count("trials", base.trials);
    if (reader.has("params") && !read_params(doc["params"], base.params)) {
        reader.fail("params", "expected {\"alpha\": number, \"beta\": number}");
    }
    reader.reals("epsilon_grid", base.epsilon_grid);
    reader.seed("master_seed", base.master_seed);
    reader.text("convention", [&](const std::string& s) { base.convention = convention_from_string(s); });
    reader.text("sigma_policy", [&](const std::string& s) { base.sigma_policy = sigma_policy_from_string(s); });
    reader.count("cv_folds", base.cv_folds);
    reader.count("curve_n", base.curve_n);
    if (reader.has("curve_params")) {
        const Json& v = doc["curve_params"];
        std::vector<ConfidenceParams> parsed;
        bool ok = v.is_array();
        if (ok) {
            for (const Json& e : v) {
                ConfidenceParams p;
                ok = ok && read_params(e, p);
                parsed.push_back(p);
            }
        }
        if (ok) {
            base.curve_params = std::move(parsed);
        } else {
            reader.fail("curve_params", "expected an array of {\"alpha\": number, \"beta\": number}");
        }
    }

    if (errors.empty()) {
        errors = validation_errors(base);
    }
    if (!errors.empty()) {
        std::string message = "invalid experiment config";
        for (const auto& e : errors) {
            message += "\n  " + e;
        }
        throw Error(ErrorCode::invalid_argument, message);
    }
    return base;
}

Json manifest(const ExperimentConfig& config, TableKind kind, const std::vector<OutputFile>& outputs)
{
    Json files = Json::array();
    for (const auto& f : outputs) {
        files.push_back(Json{{"path", f.path}, {"rows", f.rows}, {"deterministic", f.deterministic}});
    }
    return Json{{"schema_version", kSchemaVersion},
                {"kind", "manifest"},
                {"version", COAC_VERSION},
                {"table", std::string(to_string(kind))},
                {"config", to_json(config)},
                {"outputs", files}};
}

} // namespace coac

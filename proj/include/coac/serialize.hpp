#pragma once

// JSON forms of reports and experiment configs. Every top-level document
// carries "schema_version"; readers reject versions they do not know.

#include <string>
#include <vector>

#include <json.hpp>

#include "coac/bounds.hpp"
#include "coac/cv.hpp"
#include "coac/regression.hpp"
#include "coac/selection.hpp"
#include "coac/simharness.hpp"

namespace coac {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json to_json(const FitResult& fit, const KernelSpec& kernel);
Json to_json(const SelectionReport& report);
Json to_json(const CvReport& report);
Json to_json(const NoiseVarianceRange& range);
Json to_json(const RiskBounds& bounds);
Json to_json(const ConfidenceParams& params);
Json to_json(const ExperimentConfig& config);

FitResult fit_from_json(const Json& doc);
SelectionReport selection_from_json(const Json& doc);

/// Fields absent from `doc` keep their value in `base`. Unknown fields and
/// type errors are collected and reported together as InvalidArgument, one
/// line per field; the merged config is then validated the same way.
ExperimentConfig config_from_json(const Json& doc, ExperimentConfig base);

struct OutputFile {
    std::string path;
    std::size_t rows;
    bool deterministic;
};

/// Config echo plus the written files. Contains nothing run-dependent so it
/// is identical across reruns and worker counts.
Json manifest(const ExperimentConfig& config, TableKind kind, const std::vector<OutputFile>& outputs);

} // namespace coac

#ifndef MFKRIG_IO_HPP
#define MFKRIG_IO_HPP

#include <nlohmann/json.hpp>
#include <string>

#include "mfkrig/multifidelity.hpp"
#include "mfkrig/rare_event.hpp"

namespace mfkrig {

using json = nlohmann::ordered_json;

/// Dataset CSV: header `x1,...,xd,y`, UTF-8, '.' decimal separator.
Dataset read_dataset_csv(const std::string& path);
void write_dataset_csv(const std::string& path, const Dataset& data);

/// Points-only CSV (header `x1,...,xd`), e.g. a candidate grid.
MatrixXd read_points_csv(const std::string& path);

void write_predictions_csv(const std::string& path,
                           const Eigen::Ref<const MatrixXd>& points,
                           const VectorXd& mean, const VectorXd& var);

/// JSON model documents; doubles round-trip exactly, so a reloaded model
/// reproduces predictions bit-for-bit.
json to_json(const KrigingModel& model);
KrigingModel kriging_from_json(const json& doc);

json to_json(const MultiFidelityModel& model);
MultiFidelityModel multifidelity_from_json(const json& doc);

void save_model(const std::string& path, const MultiFidelityModel& model);
MultiFidelityModel load_model(const std::string& path);

/// Multi-fidelity data bundle: a JSON manifest listing levels in ascending
/// fidelity, each naming a CSV dataset file (relative to the manifest) and a
/// label:  {"levels": [{"level": 1, "label": "...", "csv": "..."}, ...]}
MultiFidelityDataset read_bundle(const std::string& manifest_path);

/// Environment config document:
///   {"distribution": "uniform", "lower": [...], "upper": [...],
///    "description": "..."}
EnvironmentDistribution env_from_json(const json& doc);
json to_json(const EnvironmentDistribution& env);
EnvironmentDistribution read_env_config(const std::string& path);

json to_json(const ProbabilityEstimate& est, const EventSpec& spec);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& doc);

}  // namespace mfkrig

#endif  // MFKRIG_IO_HPP

#pragma once

#include "sdm/decoder/models.hpp"

#include <json.hpp>

#include <filesystem>

namespace sdm {

/// Structured-text model form: layout tag, weights, bias, hyperparameters and
/// feature provenance. Doubles survive the round trip exactly.
nlohmann::json to_json(const LinearModel& model);
LinearModel linear_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const KernelModel& model);
KernelModel kernel_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeatureProvenance& provenance);
FeatureProvenance provenance_from_json(const nlohmann::json& j);

void save_model(const LinearModel& model, const std::filesystem::path& file);
LinearModel load_linear_model(const std::filesystem::path& file);

}  // namespace sdm

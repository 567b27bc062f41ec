#ifndef MINAR_SERIALIZE_HPP
#define MINAR_SERIALIZE_HPP

#include <string>

#include "json.hpp"

#include "minar/estimation.hpp"
#include "minar/evaluation.hpp"
#include "minar/model.hpp"

namespace minar {

// Model document: {"n": int, "A": row-major array, "innovations": {...}}.
nlohmann::json model_to_json(const MinarModel& model);
MinarModel model_from_json(const nlohmann::json& j);

nlohmann::json layout_to_json(const ParameterLayout& layout);
ParameterLayout layout_from_json(const nlohmann::json& j);

// Fit report: {theta, se, loglik, converged, iterations, layout, model, ...}.
nlohmann::json fitted_to_json(const FittedModel& fit);
FittedModel fitted_from_json(const nlohmann::json& j);

// Experiment grid document for the simulation study.
nlohmann::json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);

// Writes via a temporary file and renames on success, so failures never
// leave partial output behind.
void write_text_file_atomic(const std::string& path, const std::string& contents);

} // namespace minar

#endif

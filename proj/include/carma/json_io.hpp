#pragma once

#include <string>

#include "json.hpp"  // vendored nlohmann/json

#include "carma/levy.hpp"
#include "carma/model.hpp"
#include "carma/qml.hpp"
#include "carma/recovery.hpp"

namespace carma::io {

using json = nlohmann::json;

/// LevyModel <-> {"family": ..., "params": {...}}; exact round-trip.
json to_json(const LevyModel& model);
LevyModel levy_from_json(const json& j);

/// CarmaSpec <-> row-major matrix arrays with explicit dims; exact round-trip.
json to_json(const CarmaSpec& spec);
CarmaSpec carma_spec_from_json(const json& j);

json to_json(const StateSpace& ss);
StateSpace state_space_from_json(const json& j);

json to_json(const FitResult& fit);

json to_json(const IncrementDiagnostics& diag);

/// Parametrization from {"family": ..., "box": [[lo,hi],...], ...}.
Parametrization parametrization_from_json(const json& j);

json matrix_to_json(const MatrixXd& m);
MatrixXd matrix_from_json(const json& j);
json vector_to_json(const VectorXd& v);
VectorXd vector_from_json(const json& j);

}  // namespace carma::io

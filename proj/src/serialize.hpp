#ifndef UREGM_SERIALIZE_HPP
#define UREGM_SERIALIZE_HPP

#include <json.hpp>
#include <string>
#include <variant>

#include "ensemble.hpp"
#include "evaluation.hpp"
#include "ga.hpp"
#include "learners.hpp"

namespace uregm {

using json = nlohmann::json;

// Shortest round-trip decimal rendering; the one float format used in every
// CSV the library writes.
std::string format_double(double v);

// Persisted artifacts are canonical: identical inputs and seeds produce
// byte-identical JSON. Wall-clock timing fields are therefore serialized as
// 0; measured times live in run manifests and rendered text reports.
json ga_result_to_json(const GaResult& result);
GaResult ga_result_from_json(const json& j);

json learner_to_json(const FittedLearner& model);
FittedLearner learner_from_json(const json& j);

json uregm_model_to_json(const UregmModel& model);
UregmModel uregm_model_from_json(const json& j);

json report_to_json(const EvaluationReport& report);

// Any trainable artifact the CLI can persist or load: a single learner or an
// ensemble. Dispatch is on the top-level "kind" field.
using AnyModel = std::variant<FittedLearner, UregmModel>;

json model_to_json(const AnyModel& model);
AnyModel model_from_json(const json& j);
void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

Eigen::VectorXd predict_any(const AnyModel& model, const Dataset& rows);

}  // namespace uregm

#endif

#pragma once

#include <ostream>
#include <string>

#include "json.hpp"

#include "ccts/attribution/matrix.hpp"

namespace ccts::attribution {

// Full result including per-sample effects and the engine configuration.
nlohmann::json to_json(const AttributionResult& r);
AttributionResult result_from_json(const nlohmann::json& j);  // throws ParseError

// Header `concept,channel,kind,ate,low,high,significant,n_used,n_skipped`;
// the global column is written as channel "global"; missing cells leave the
// numeric fields empty.
void write_csv(std::ostream& os, const AttributionResult& r);

void save_result(const AttributionResult& r, const std::string& path);
AttributionResult load_result(const std::string& path);

}  // namespace ccts::attribution

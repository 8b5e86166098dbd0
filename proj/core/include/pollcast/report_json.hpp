#pragma once

#include <nlohmann/json.hpp>

#include "pollcast/pipeline.hpp"

namespace pollcast {

// Wire form of a forecast, shared by the service and the CLI.
nlohmann::json forecast_to_json(const ForecastReport& report);
ForecastReport forecast_from_json(const nlohmann::json& doc);

nlohmann::json vote_event_to_json(const VoteRecord& record);

}  // namespace pollcast

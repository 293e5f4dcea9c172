#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sjlt/oracle.hpp"
#include "sjlt/planner.hpp"

namespace sjlt::reports {

nlohmann::json to_json(const planner::PlanResult &r);
nlohmann::json to_json(const std::vector<planner::BoundsRow> &rows);
nlohmann::json to_json(const oracle::TrialReport &r);
nlohmann::json to_json(const oracle::MultinomialReport &r);
nlohmann::json to_json(const oracle::PsiEnvelopeReport &r);
nlohmann::json to_json(const oracle::ChernoffGridReport &r);
nlohmann::json to_json(const oracle::MomentSweepReport &r);

/// Header line plus one data line.
std::string to_csv(const planner::PlanResult &r);
std::string to_csv(const oracle::TrialReport &r);

}  // namespace sjlt::reports

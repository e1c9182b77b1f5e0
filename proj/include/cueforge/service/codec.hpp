#pragma once

#include "cueforge/env/env.hpp"
#include "cueforge/geometry/locate.hpp"
#include "cueforge/shotplan/shotplan.hpp"

#include "json.hpp"

namespace cueforge {

using Json = nlohmann::ordered_json;

// {"variant":"2ball","turn_index":0,"balls":[{"id":0,"class":"cue","x":..,"y":..}]}
// "variant" may be omitted and is then inferred; "class" defaults by id.
// Throws ParseError on malformed input; the result is not validated.
TableState state_from_json(const Json& j);
Json state_to_json(const TableState& s);

// {"alpha_index":..,"rho_index":..}; alpha_deg is accepted instead of alpha_index.
Shot shot_from_json(const Json& j);
Json shot_to_json(const Shot& s);

Json event_to_json(const Event& e);
Json events_to_json(const std::vector<Event>& events);
Json reward_to_json(const RewardBreakdown& r);
Json verdict_to_json(const ShotVerdict& v);
Json scored_to_json(const ScoredShot& s);
Json suggestion_to_json(const Suggestion& s);
Json step_to_json(const StepResult& r);

// {"balls":[{"class","x","y"}],"rmse_px"} plus diagnostics.
Json locate_to_json(const LocateResult& r);

// Structured body for a failed request; geometry failures carry counts.
Json error_json(const std::exception& e);

} // namespace cueforge

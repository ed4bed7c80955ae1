#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gaitkb/analysis.hpp"
#include "gaitkb/eks.hpp"
#include "gaitkb/grf.hpp"

namespace gaitkb::wire {

// JSON payloads shared by the HTTP service and the CLI's --json mode.
// Documented in docs/formats.md.

using Params = std::vector<std::pair<std::string, std::string>>;

/// Filter clauses from key/value pairs: gender=female[,male...],
/// age=LO:HI, body_height=LO:HI, body_mass=LO:HI. Unknown keys are ignored
/// so other query parameters can travel alongside. Throws InvalidRange.
DemographicFilter parse_filter(const Params& params);
/// Parses "key=value" strings as passed on the command line.
DemographicFilter parse_filter_args(const std::vector<std::string>& args);
bool has_filter_params(const Params& params);

nlohmann::json filter_to_json(const DemographicFilter& filter);
DemographicFilter filter_from_json(const nlohmann::json& doc);

nlohmann::json stps_to_json(const StpVector& stps);
nlohmann::json stats_to_json(const DistributionStats& stats);
nlohmann::json match_report(const std::vector<MatchResult>& results, const DemographicFilter& filter,
                            double epsilon);
nlohmann::json itbp_to_json(const ItbpData& row);
nlohmann::json parameters_report(std::string_view category_id, const std::vector<ItbpData>& rows,
                                 const DemographicFilter& filter);
nlohmann::json tree_to_json(const KnowledgeStore& store);
nlohmann::json processed_trial_to_json(const ProcessedTrial& processed);

/// Canonical text form; byte-identical output for identical documents.
std::string render(const nlohmann::json& doc);

}  // namespace gaitkb::wire

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gaitkb/eks.hpp"
#include "gaitkb/grf.hpp"

namespace gaitkb {

inline constexpr double kDefaultEpsilon = 1e-6;

enum class ParamState { InRange, OutOfRange, NoData };
std::string_view to_string(ParamState state);

using GraphicalSummary = std::array<ParamState, kStpCount>;

struct MatchScore {
  double score = 0.0;
  int n_used = 0;
};

/// c = sum_i sigma_i / max(|mu_i - x_i|^2, eps) over the STPs where the
/// patient has a value and the category distribution is non-empty.
/// `stats` is indexed by stp_id - 1. Throws InvalidEpsilon unless eps > 0.
MatchScore match_score(const StpVector& patient, std::span<const DistributionStats, kStpCount> stats,
                       double epsilon = kDefaultEpsilon);

/// Three-state comparison of each patient value with the category range;
/// boundaries count as in range. `ranges` is indexed by stp_id - 1.
GraphicalSummary graphical_summary(const StpVector& patient, std::span<const ParameterRange, kStpCount> ranges);

/// Filtered statistics and effective ranges of one category. Manual ranges are
/// kept as-is; automatic ranges are the extrema of the filtered members.
struct CategoryView {
  std::string category_id;
  std::string category_name;
  bool manual_override = false;
  std::size_t member_count = 0;  // after filtering
  std::array<DistributionStats, kStpCount> stats;
  std::array<ParameterRange, kStpCount> ranges;
};

struct MatchResult {
  std::string category_id;
  std::string category_name;
  double score = 0.0;
  GraphicalSummary summary{};
  int n_used = 0;
  double epsilon = kDefaultEpsilon;
  bool manual_override = false;
};

MatchResult match_category(const StpVector& patient, const CategoryView& view, double epsilon);

/// Score desc, then name asc, then id asc.
void sort_matches(std::vector<MatchResult>& results);

// Parallel kernels (OpenMP). Results are identical to the serial versions in
// gaitkb::reference, which the tests use as oracle.
CategoryView category_view(const GaitCategory& category, const DemographicFilter& filter);
std::vector<CategoryView> category_views(const KnowledgeStore& store, const DemographicFilter& filter);
std::vector<MatchResult> rank_categories(const StpVector& patient, const KnowledgeStore& store,
                                         const DemographicFilter& filter = {},
                                         double epsilon = kDefaultEpsilon);
std::vector<std::vector<MatchResult>> rank_batch(std::span<const StpVector> patients, const KnowledgeStore& store,
                                                 const DemographicFilter& filter = {},
                                                 double epsilon = kDefaultEpsilon);

namespace reference {
CategoryView category_view(const GaitCategory& category, const DemographicFilter& filter);
std::vector<CategoryView> category_views(const KnowledgeStore& store, const DemographicFilter& filter);
std::vector<MatchResult> rank_categories(const StpVector& patient, const KnowledgeStore& store,
                                         const DemographicFilter& filter = {},
                                         double epsilon = kDefaultEpsilon);
std::vector<std::vector<MatchResult>> rank_batch(std::span<const StpVector> patients, const KnowledgeStore& store,
                                                 const DemographicFilter& filter = {},
                                                 double epsilon = kDefaultEpsilon);
}  // namespace reference

struct CategoryDifference {
  int stp_id = 0;
  double d = 0.0;           // +inf when degenerate
  bool degenerate = false;  // zero variance sum with distinct means
};

/// d = (mu_k - mu_l)^2 / (sigma_k^2 + sigma_l^2). Throws EmptyDistribution.
CategoryDifference category_difference(const DistributionStats& k, const DistributionStats& l);

/// Parameter-explorer row: norm vs selected category for one STP.
struct ItbpData {
  int stp_id = 0;
  DistributionStats norm_stats;
  DistributionStats selected_stats;
  std::optional<double> patient_value_left;
  std::optional<double> patient_value_right;
  std::optional<CategoryDifference> difference;  // absent if either side is empty
};

ItbpData itbp_data(const KnowledgeStore& store, std::string_view selected_category_id, int stp_id,
                   const StpVector* patient, const DemographicFilter& filter = {});

std::vector<ItbpData> itbp_table(const KnowledgeStore& store, std::string_view selected_category_id,
                                 const StpVector* patient, const DemographicFilter& filter = {});

}  // namespace gaitkb
